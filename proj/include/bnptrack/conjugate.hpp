#pragma once

#include <span>
#include <vector>

#include "bnptrack/linalg.hpp"
#include "bnptrack/random.hpp"

namespace bnpt {

// Gaussian component parameters theta = (mean, cov).
struct ClusterParams {
    Vector mean;
    Matrix cov;
    friend bool operator==(const ClusterParams& a, const ClusterParams& b) {
        return a.mean.size() == b.mean.size() && a.cov.rows() == b.cov.rows() && a.mean == b.mean && a.cov == b.cov;
    }
};

// Normal-inverse-Wishart: cov ~ IW(nu, psi), mean | cov ~ N(mu0, cov / lambda).
struct GaussianNIW {
    Vector mu0;
    double lambda = 1.0;
    double nu = 4.0;
    Matrix psi;

    int dim() const { return static_cast<int>(mu0.size()); }
    void validate() const;
    friend bool operator==(const GaussianNIW& a, const GaussianNIW& b) {
        return a.mu0.size() == b.mu0.size() && a.psi.rows() == b.psi.rows() && a.mu0 == b.mu0 &&
               a.lambda == b.lambda && a.nu == b.nu && a.psi == b.psi;
    }
};

GaussianNIW niw_posterior(const GaussianNIW& prior, std::span<const Vector> data);

// Log posterior-predictive density (multivariate Student-t). Needs lambda > 0.
double niw_predictive(const GaussianNIW& prior, const Vector& y);
StudentTDensity niw_predictive_density(const GaussianNIW& prior);

ClusterParams niw_sample(const GaussianNIW& prior, Rng& rng);
Matrix sample_inverse_wishart(double dof, const Matrix& scale, Rng& rng);

// Posterior of a Gaussian mean with prior N(center, prior_cov) after observing
// `data` with known covariance `obs_cov`. prior_cov may be singular.
struct GaussianBelief {
    Vector mean;
    Matrix cov;
};
GaussianBelief gaussian_mean_posterior(const Vector& center, const Matrix& prior_cov, const Matrix& obs_cov,
                                       std::span<const Vector> data);

}  // namespace bnpt
