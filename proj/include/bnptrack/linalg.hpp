#pragma once

#include <Eigen/Dense>

namespace bnpt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMaxDensityDim = 16;

// Lower Cholesky factor; throws NumericalError if `a` is not positive definite.
Matrix cholesky_lower(const Matrix& a, const char* what = "matrix");

Matrix symmetrize(const Matrix& a);

// Multivariate normal with the factorization cached so repeated evaluation
// does not allocate.
class GaussianDensity {
public:
    GaussianDensity() = default;
    GaussianDensity(Vector mean, const Matrix& cov);

    double log_density(const Vector& x) const;
    const Vector& mean() const { return mean_; }
    int dim() const { return static_cast<int>(mean_.size()); }

private:
    Vector mean_;
    Matrix chol_;
    double log_norm_ = 0.0;
};

// Multivariate Student-t with location `mean`, scale matrix `scale`, `dof` degrees of freedom.
class StudentTDensity {
public:
    StudentTDensity() = default;
    StudentTDensity(Vector mean, const Matrix& scale, double dof);

    double log_density(const Vector& x) const;
    int dim() const { return static_cast<int>(mean_.size()); }

private:
    Vector mean_;
    Matrix chol_;
    double dof_ = 1.0;
    double log_norm_ = 0.0;
};

// Squared Mahalanobis norm of r under L L^T, by forward substitution.
double mahalanobis_sq(const Matrix& chol, const double* r, int dim);

}  // namespace bnpt
