#include "bnptrack/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t a = splitmix64(seed);
    std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sample_normal(Rng& rng) {
    // Box-Muller on our own uniforms so the stream is reproducible across
    // standard library implementations.
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double sample_gamma(double shape, double rate, Rng& rng) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
        throw ParameterError("gamma: shape and rate must be positive and finite");
    if (shape < 1.0) {
        // Boost to shape+1 and scale by U^(1/shape).
        double u = uniform01(rng);
        while (u <= 0.0) u = uniform01(rng);
        return sample_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform01(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_beta(double a, double b, Rng& rng) {
    if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("beta: parameters must be positive");
    double x = sample_gamma(a, 1.0, rng);
    double y = sample_gamma(b, 1.0, rng);
    double s = x + y;
    if (s <= 0.0) {
        // Both underflowed; fall back on the ratio of log-uniforms limit.
        return uniform01(rng) < a / (a + b) ? 1.0 : 0.0;
    }
    return x / s;
}

std::vector<double> sample_dirichlet(std::span<const double> conc, Rng& rng) {
    std::vector<double> out(conc.size());
    double s = 0.0;
    for (std::size_t i = 0; i < conc.size(); ++i) {
        out[i] = sample_gamma(conc[i], 1.0, rng);
        s += out[i];
    }
    if (s <= 0.0) throw NumericalError("dirichlet: all gamma draws underflowed");
    for (double& v : out) v /= s;
    return out;
}

Eigen::VectorXd sample_mvn_chol(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol,
                                Rng& rng) {
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sample_normal(rng);
    return mean + chol.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size())
        throw DimensionError("sample_mvn: covariance does not match mean");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return sample_mvn_chol(mean, llt.matrixL(), rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff()))
        throw NumericalError("sample_mvn: covariance is not positive semi-definite");
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sample_normal(rng) * std::sqrt(std::max(ev[i], 0.0));
    return mean + es.eigenvectors() * z;
}

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
    if (weights.empty()) throw ParameterError("sample_categorical: empty weight vector");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw NumericalError("sample_categorical: weight " + std::to_string(w) + " is not a finite non-negative number");
        total += w;
    }
    if (!(total > 0.0)) throw NumericalError("sample_categorical: all weights are zero");
    double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return weights.size() - 1;
}

std::size_t sample_log_categorical(std::span<const double> log_weights, Rng& rng) {
    if (log_weights.empty()) throw ParameterError("sample_log_categorical: empty weight vector");
    double mx = -std::numeric_limits<double>::infinity();
    for (double lw : log_weights) {
        if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity())
            throw NumericalError("sample_log_categorical: log-weight is NaN or +inf");
        mx = std::max(mx, lw);
    }
    if (mx == -std::numeric_limits<double>::infinity())
        throw NumericalError("sample_log_categorical: all weights are zero");
    double total = 0.0;
    for (double lw : log_weights) total += std::exp(lw - mx);
    double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        acc += std::exp(log_weights[i] - mx);
        if (u < acc) return i;
    }
    for (std::size_t i = log_weights.size(); i-- > 0;)
        if (log_weights[i] > -std::numeric_limits<double>::infinity()) return i;
    return log_weights.size() - 1;
}

}  // namespace bnpt
