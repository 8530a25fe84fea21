#pragma once

#include <cstddef>
#include <vector>

#include "bnptrack/random.hpp"

namespace bnpt {

// Gamma(a, b) with rate b.
struct GammaPrior {
    double a = 1.0;
    double b = 0.1;
    void validate() const;
    friend bool operator==(const GammaPrior&, const GammaPrior&) = default;
};

// Escobar-West auxiliary-variable update of a DP concentration given D
// occupied clusters among n items.
double sample_alpha(std::size_t D, std::size_t n, const GammaPrior& prior, double current_alpha, Rng& rng);

// Concentration update for the time-dependent priors. Items are replayed in
// index order: `clusters_before_birth` holds, for every cluster opened by a
// birth, the number of distinct clusters already occupied at that moment.
// transitioned_mass is the total V* of surviving previous clusters.
struct AlphaContext {
    std::size_t n = 0;
    double transitioned_mass = 0.0;
    double d = 0.0;
    std::vector<std::size_t> clusters_before_birth;
};

double sample_alpha(const AlphaContext& ctx, const GammaPrior& prior, double current_alpha, Rng& rng);

}  // namespace bnpt
