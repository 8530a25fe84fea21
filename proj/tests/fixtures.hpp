#pragma once
// Hand-built states for the prior and sampler tests.

#include <vector>

#include "bnptrack/ddp_emm.hpp"

namespace fixture {

inline bnpt::Vector v2(double a, double b) {
    bnpt::Vector v(2);
    v << a, b;
    return v;
}

inline bnpt::GaussianNIW base_measure(double spread = 100.0, double noise = 4.0) {
    bnpt::GaussianNIW h;
    h.mu0 = bnpt::Vector::Zero(2);
    h.nu = 10.0;
    h.psi = bnpt::Matrix::Identity(2, 2) * noise * (h.nu - 3.0);
    h.lambda = noise / (spread * spread);
    return h;
}

inline bnpt::KernelConfig still_kernel() {
    bnpt::KernelConfig c;
    c.sigma_w = 0.0;
    c.sigma_u = 0.0;
    c.motion = bnpt::MotionModel::constant_velocity;
    c.param_walk_cov = bnpt::Matrix::Zero(2, 2);
    return c;
}

// Previous-step state with the given cluster sizes; objects interleaved across clusters.
inline bnpt::ClusterState previous_state(const std::vector<int>& sizes, bnpt::Rng& rng) {
    bnpt::ClusterState s;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        s.track_ids.push_back(100 + j);
        s.origins.push_back(std::nullopt);
        s.unique_params.push_back({v2(200.0 * bnpt::sample_normal(rng), 200.0 * bnpt::sample_normal(rng)),
                                   bnpt::Matrix::Identity(2, 2) * 4.0});
        s.sizes.push_back(sizes[j]);
    }
    std::vector<int> left = sizes;
    bool more = true;
    while (more) {
        more = false;
        for (std::size_t j = 0; j < sizes.size(); ++j)
            if (left[j] > 0) {
                --left[j];
                s.assignments.push_back(bnpt::ClusterLabel{j});
                const auto& m = s.unique_params[j].mean;
                s.object_states.push_back(bnpt::TargetState{m[0], m[1], 1.0, -1.0, std::nullopt});
                more = true;
            }
    }
    return s;
}

// Transitioned state whose surviving counts are exactly `vstar` (entries may be 0).
inline bnpt::TransitionedState transitioned(const std::vector<int>& vstar, bnpt::Rng& rng, int extra = 1) {
    std::vector<int> sizes;
    for (int v : vstar) sizes.push_back(v + extra);
    const bnpt::ClusterState prev = previous_state(sizes, rng);
    bnpt::TransitionedState t = bnpt::transition_step(prev, 1.0, still_kernel(), rng);
    for (std::size_t o = 0; o < vstar.size(); ++o) t.set_surviving_count(o, vstar[o]);
    return t;
}

inline std::vector<int> random_counts(bnpt::Rng& rng, int max_clusters, int max_size, bool allow_zero) {
    const int D = static_cast<int>(bnpt::uniform01(rng) * (max_clusters + 1));
    std::vector<int> v;
    for (int j = 0; j < D; ++j)
        v.push_back((allow_zero ? 0 : 1) + static_cast<int>(bnpt::uniform01(rng) * max_size));
    return v;
}

// Random occupancy consistent with `t`: some current clusters continue
// distinct surviving previous clusters, the rest are births.
struct RandomOccupancy {
    std::vector<int> sizes;
    std::vector<std::optional<std::size_t>> origins;
    bnpt::Occupancy view() const { return bnpt::Occupancy{sizes, origins}; }
};

inline RandomOccupancy random_occupancy(const bnpt::TransitionedState& t, bnpt::Rng& rng, int max_births = 3) {
    RandomOccupancy o;
    for (std::size_t j = 0; j < t.previous_clusters(); ++j)
        if (t.cluster_alive[j] && bnpt::uniform01(rng) < 0.5) {
            o.sizes.push_back(1 + static_cast<int>(bnpt::uniform01(rng) * 4));
            o.origins.push_back(j);
        }
    const int births = static_cast<int>(bnpt::uniform01(rng) * (max_births + 1));
    for (int b = 0; b < births; ++b) {
        o.sizes.push_back(1 + static_cast<int>(bnpt::uniform01(rng) * 4));
        o.origins.push_back(std::nullopt);
    }
    // shuffle cluster order
    for (std::size_t i = o.sizes.size(); i > 1; --i) {
        const std::size_t k = static_cast<std::size_t>(bnpt::uniform01(rng) * i);
        std::swap(o.sizes[i - 1], o.sizes[k]);
        std::swap(o.origins[i - 1], o.origins[k]);
    }
    return o;
}

}  // namespace fixture
