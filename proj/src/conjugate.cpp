#include "bnptrack/conjugate.hpp"

#include <cmath>
#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

void GaussianNIW::validate() const {
    const int p = dim();
    if (p < 1) throw DimensionError("NIW: empty mean vector");
    if (psi.rows() != p || psi.cols() != p) throw DimensionError("NIW: Psi does not match mu0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("NIW: lambda must be >= 0");
    if (!(nu > p - 1)) throw ParameterError("NIW: nu must exceed dim - 1");
    if ((psi - psi.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, psi.cwiseAbs().maxCoeff()))
        throw ParameterError("NIW: Psi is not symmetric");
    cholesky_lower(psi, "NIW Psi");
}

GaussianNIW niw_posterior(const GaussianNIW& prior, std::span<const Vector> data) {
    if (data.empty()) return prior;
    const int p = prior.dim();
    const double n = static_cast<double>(data.size());
    Vector mean = Vector::Zero(p);
    for (const auto& y : data) {
        if (y.size() != p) throw DimensionError("niw_posterior: observation dimension mismatch");
        mean += y;
    }
    mean /= n;
    Matrix scatter = Matrix::Zero(p, p);
    for (const auto& y : data) {
        Vector r = y - mean;
        scatter.noalias() += r * r.transpose();
    }
    GaussianNIW post;
    post.lambda = prior.lambda + n;
    post.nu = prior.nu + n;
    post.mu0 = (prior.lambda * prior.mu0 + n * mean) / post.lambda;
    Vector dm = mean - prior.mu0;
    post.psi = symmetrize(prior.psi + scatter + (prior.lambda * n / post.lambda) * (dm * dm.transpose()));
    return post;
}

StudentTDensity niw_predictive_density(const GaussianNIW& prior) {
    const int p = prior.dim();
    if (!(prior.lambda > 0.0)) throw ParameterError("niw_predictive: lambda must be positive for a proper predictive");
    const double dof = prior.nu - p + 1.0;
    Matrix scale = prior.psi * ((prior.lambda + 1.0) / (prior.lambda * dof));
    return StudentTDensity(prior.mu0, scale, dof);
}

double niw_predictive(const GaussianNIW& prior, const Vector& y) {
    if (y.size() != prior.dim()) throw DimensionError("niw_predictive: dimension mismatch");
    return niw_predictive_density(prior).log_density(y);
}

Matrix sample_inverse_wishart(double dof, const Matrix& scale, Rng& rng) {
    const int p = static_cast<int>(scale.rows());
    if (!(dof > p - 1)) throw ParameterError("inverse Wishart: dof must exceed dim - 1");
    // Bartlett decomposition of W ~ Wishart(dof, scale^{-1}); return W^{-1}.
    Matrix scale_inv = cholesky_lower(scale, "inverse Wishart scale").triangularView<Eigen::Lower>().solve(
        Matrix::Identity(p, p));
    scale_inv = scale_inv.transpose() * scale_inv;
    Matrix l = cholesky_lower(symmetrize(scale_inv), "inverse Wishart scale inverse");
    Matrix a = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        a(i, i) = std::sqrt(2.0 * sample_gamma(0.5 * (dof - i), 1.0, rng));
        for (int j = 0; j < i; ++j) a(i, j) = sample_normal(rng);
    }
    Matrix m = l * a;  // W = m m^T
    Matrix m_inv = m.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p));
    return symmetrize(m_inv.transpose() * m_inv);
}

ClusterParams niw_sample(const GaussianNIW& prior, Rng& rng) {
    if (!(prior.lambda > 0.0)) throw ParameterError("niw_sample: lambda must be positive");
    ClusterParams out;
    out.cov = sample_inverse_wishart(prior.nu, prior.psi, rng);
    Matrix l = cholesky_lower(out.cov / prior.lambda, "sampled covariance");
    out.mean = sample_mvn_chol(prior.mu0, l, rng);
    return out;
}

GaussianBelief gaussian_mean_posterior(const Vector& center, const Matrix& prior_cov, const Matrix& obs_cov,
                                       std::span<const Vector> data) {
    if (data.empty()) return {center, prior_cov};
    const double n = static_cast<double>(data.size());
    Vector ybar = Vector::Zero(center.size());
    for (const auto& y : data) {
        if (y.size() != center.size()) throw DimensionError("gaussian_mean_posterior: dimension mismatch");
        ybar += y;
    }
    ybar /= n;
    Matrix s = prior_cov + obs_cov / n;
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError("gaussian_mean_posterior: innovation covariance not positive definite");
    Matrix gain = llt.solve(prior_cov).transpose();  // prior_cov * s^{-1}
    GaussianBelief b;
    b.mean = center + gain * (ybar - center);
    b.cov = symmetrize(prior_cov - gain * prior_cov);
    return b;
}

}  // namespace bnpt
