#include "bnptrack/concentration.hpp"

#include <algorithm>
#include <cmath>

#include "bnptrack/errors.hpp"

namespace bnpt {

void GammaPrior::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw ParameterError("gamma hyperprior needs a > 0 and b > 0");
}

namespace {

double positive(double x) { return std::max(x, 1e-300); }

}  // namespace

double sample_alpha(std::size_t D, std::size_t n, const GammaPrior& prior, double current_alpha, Rng& rng) {
    prior.validate();
    if (!(current_alpha > 0.0)) throw ParameterError("sample_alpha: current alpha must be positive");
    if (n == 0) return positive(sample_gamma(prior.a, prior.b, rng));
    if (D == 0 || D > n) throw ParameterError("sample_alpha: need 1 <= D <= n");
    const double eta = sample_beta(current_alpha + 1.0, static_cast<double>(n), rng);
    const double rate = prior.b - std::log(positive(eta));
    const double shape_hi = prior.a + static_cast<double>(D);
    const double odds = (shape_hi - 1.0) / (static_cast<double>(n) * rate);
    const double pi = odds / (1.0 + odds);
    const double shape = uniform01(rng) < pi ? shape_hi : shape_hi - 1.0;
    if (!(shape > 0.0)) return positive(sample_gamma(shape_hi, rate, rng));
    return positive(sample_gamma(shape, rate, rng));
}

double sample_alpha(const AlphaContext& ctx, const GammaPrior& prior, double current_alpha, Rng& rng) {
    prior.validate();
    if (!(current_alpha > 0.0)) throw ParameterError("sample_alpha: current alpha must be positive");
    if (ctx.n == 0) return positive(sample_gamma(prior.a, prior.b, rng));
    const double eta = sample_beta(ctx.transitioned_mass + current_alpha, static_cast<double>(ctx.n), rng);
    double births = 0.0;
    for (std::size_t before : ctx.clusters_before_birth) {
        const double p = current_alpha / (current_alpha + static_cast<double>(before) * ctx.d);
        if (p >= 1.0 || uniform01(rng) < p) births += 1.0;
    }
    return positive(sample_gamma(prior.a + births, prior.b - std::log(positive(eta)), rng));
}

}  // namespace bnpt
