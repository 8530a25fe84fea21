#include "bnptrack/linalg.hpp"

#include <cmath>
#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

Matrix cholesky_lower(const Matrix& a, const char* what) {
    if (a.rows() != a.cols()) throw DimensionError(std::string(what) + " is not square");
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + " is not positive definite");
    Matrix l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i)))
            throw NumericalError(std::string(what) + " is not positive definite");
    return l;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double mahalanobis_sq(const Matrix& chol, const double* r, int dim) {
    double y[kMaxDensityDim];
    double q = 0.0;
    for (int i = 0; i < dim; ++i) {
        double s = r[i];
        for (int j = 0; j < i; ++j) s -= chol(i, j) * y[j];
        y[i] = s / chol(i, i);
        q += y[i] * y[i];
    }
    return q;
}

namespace {

double half_log_det(const Matrix& chol) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < chol.rows(); ++i) s += std::log(chol(i, i));
    return s;
}

}  // namespace

GaussianDensity::GaussianDensity(Vector mean, const Matrix& cov) : mean_(std::move(mean)) {
    if (cov.rows() != mean_.size() || cov.cols() != mean_.size())
        throw DimensionError("gaussian density: covariance does not match mean");
    if (mean_.size() > kMaxDensityDim) throw DimensionError("gaussian density: dimension too large");
    chol_ = cholesky_lower(cov, "covariance");
    log_norm_ = -0.5 * static_cast<double>(mean_.size()) * std::log(2.0 * M_PI) - half_log_det(chol_);
}

double GaussianDensity::log_density(const Vector& x) const {
    const int d = dim();
    if (x.size() != d) throw DimensionError("gaussian density: argument has wrong dimension");
    double r[kMaxDensityDim];
    for (int i = 0; i < d; ++i) r[i] = x[i] - mean_[i];
    return log_norm_ - 0.5 * mahalanobis_sq(chol_, r, d);
}

StudentTDensity::StudentTDensity(Vector mean, const Matrix& scale, double dof)
    : mean_(std::move(mean)), dof_(dof) {
    if (!(dof > 0.0)) throw ParameterError("student-t: dof must be positive");
    if (scale.rows() != mean_.size() || scale.cols() != mean_.size())
        throw DimensionError("student-t: scale does not match mean");
    if (mean_.size() > kMaxDensityDim) throw DimensionError("student-t: dimension too large");
    chol_ = cholesky_lower(scale, "student-t scale");
    const double p = static_cast<double>(mean_.size());
    log_norm_ = std::lgamma(0.5 * (dof + p)) - std::lgamma(0.5 * dof) - 0.5 * p * std::log(dof * M_PI) -
                half_log_det(chol_);
}

double StudentTDensity::log_density(const Vector& x) const {
    const int d = dim();
    if (x.size() != d) throw DimensionError("student-t: argument has wrong dimension");
    double r[kMaxDensityDim];
    for (int i = 0; i < d; ++i) r[i] = x[i] - mean_[i];
    const double q = mahalanobis_sq(chol_, r, d);
    return log_norm_ - 0.5 * (dof_ + d) * std::log1p(q / dof_);
}

}  // namespace bnpt
