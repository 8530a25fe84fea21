#pragma once

#include <vector>

#include "bnptrack/ddp_emm.hpp"

namespace bnpt {

struct PYClusterState {
    ClusterState clusters;
    PYParams params;
    std::vector<bool> eta;  // survival flag per previous-step cluster
};

// Pitman-Yor case rule. Masses: (V* eta + V - d), (V* eta - d), (|D| d + alpha),
// normalized by their actual total. With d = 0 the output is bitwise equal to
// ddp_case_probs.
void dpy_case_probs(const TransitionedState& trans, const Occupancy& current, const PYParams& p,
                    CaseProbabilities& out);
CaseProbabilities dpy_case_probs(const TransitionedState& trans, const ClusterState& current, const PYParams& p);

PYClusterState dpy_draw_prior(const TransitionedState& trans, std::size_t n_objects, const PYParams& p,
                              const GaussianNIW& H, const KernelConfig& cfg, Rng& rng, TrackIdSource& ids);

// Draw of the posterior random measure given a PY partition:
//   B ~ Beta(N - D d, alpha + D d), (pi_1..pi_D) ~ Dir(V_1 - d, ..., V_D - d),
// atoms weighted B pi_i, remaining mass 1 - B for a PY(d, alpha + D d) continuation.
struct PosteriorMeasure {
    std::vector<double> weights;
    std::vector<ClusterParams> atoms;
    double residual = 0.0;
    PYParams residual_process;
};

PosteriorMeasure py_posterior_measure(const PYClusterState& state, Rng& rng);

}  // namespace bnpt
