#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bnpt {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Independent generator for (seed, stream). Streams are used for
// per-run and per-tracker generators so results do not depend on
// scheduling order.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

double uniform01(Rng& rng);  // in [0, 1)
double sample_normal(Rng& rng);
double sample_gamma(double shape, double rate, Rng& rng);
double sample_beta(double a, double b, Rng& rng);
std::vector<double> sample_dirichlet(std::span<const double> conc, Rng& rng);

// Draw N(mean, L L^T) given the lower Cholesky factor L.
Eigen::VectorXd sample_mvn_chol(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol,
                                Rng& rng);
// Draw N(mean, cov) for a symmetric positive semi-definite cov.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);

// Index drawn proportionally to non-negative weights (need not sum to 1).
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);
// Same, for log-weights. Entries equal to -inf have zero mass.
std::size_t sample_log_categorical(std::span<const double> log_weights, Rng& rng);

}  // namespace bnpt
