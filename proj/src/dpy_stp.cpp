#include "bnptrack/dpy_stp.hpp"

#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

void dpy_case_probs(const TransitionedState& trans, const Occupancy& current, const PYParams& p,
                    CaseProbabilities& out) {
    p.validate();
    if (current.origins.size() != current.sizes.size()) throw InvariantError("occupancy arrays disagree in length");
    const std::size_t D = current.sizes.size();
    const double d = p.d;
    out.taken_scratch.assign(trans.previous_clusters(), 0);
    out.selected.resize(D);
    for (std::size_t j = 0; j < D; ++j) {
        double vstar = 0.0;
        if (current.origins[j]) {
            const std::size_t o = *current.origins[j];
            if (o >= trans.previous_clusters() || !trans.cluster_alive[o])
                throw InvariantError("current cluster continues a previous cluster that did not survive");
            out.taken_scratch[o] = 1;
            vstar = static_cast<double>(trans.surviving_sizes[o]);
        }
        out.selected[j] = (static_cast<double>(current.sizes[j]) + vstar) - d;
        if (out.selected[j] < 0.0) throw InvariantError("dpy_case_probs: negative Case-1 mass");
    }
    out.unselected.clear();
    out.unselected_origin.clear();
    for (std::size_t o = 0; o < trans.previous_clusters(); ++o) {
        if (!trans.cluster_alive[o] || out.taken_scratch[o]) continue;
        const double m = static_cast<double>(trans.surviving_sizes[o]) - d;
        if (m < 0.0) throw InvariantError("dpy_case_probs: negative Case-2 mass for cluster " + std::to_string(o));
        out.unselected_origin.push_back(o);
        out.unselected.push_back(m);
    }
    out.birth = static_cast<double>(D) * d + p.alpha;
    // first object of an empty urn: a new cluster whatever the sign of alpha
    if (D == 0 && out.unselected.empty()) out.birth = 1.0;
    if (out.birth < 0.0) throw InvariantError("dpy_case_probs: negative birth mass");
    const double g = out.total();
    if (!(g > 0.0)) throw InvariantError("dpy_case_probs: total mass is not positive");
    for (double& v : out.selected) v /= g;
    for (double& v : out.unselected) v /= g;
    out.birth /= g;
}

CaseProbabilities dpy_case_probs(const TransitionedState& trans, const ClusterState& current, const PYParams& p) {
    CaseProbabilities out;
    dpy_case_probs(trans, occupancy_of(current), p, out);
    return out;
}

PYClusterState dpy_draw_prior(const TransitionedState& trans, std::size_t n_objects, const PYParams& p,
                              const GaussianNIW& H, const KernelConfig& cfg, Rng& rng, TrackIdSource& ids) {
    trans.validate();
    PYClusterState out;
    out.params = p;
    out.eta = trans.cluster_alive;
    ClusterState& s = out.clusters;
    const bool kinematic = !trans.beliefs.empty();
    std::vector<std::size_t> used(trans.previous_clusters(), 0);
    CaseProbabilities cp;
    std::vector<double> w;
    for (std::size_t l = 0; l < n_objects; ++l) {
        dpy_case_probs(trans, occupancy_of(s), p, cp);
        w.assign(cp.selected.begin(), cp.selected.end());
        w.insert(w.end(), cp.unselected.begin(), cp.unselected.end());
        w.push_back(cp.birth);
        std::size_t k = sample_categorical(w, rng);
        const std::size_t D = s.cluster_count();
        if (k >= D) {
            if (k < D + cp.unselected.size()) {
                const std::size_t o = cp.unselected_origin[k - D];
                open_cluster(s, trans.track_ids[o], o, trans.params[o],
                             kinematic ? std::optional(trans.beliefs[o]) : std::nullopt);
            } else {
                ClusterParams theta = niw_sample(H, rng);
                std::optional<KinematicBelief> b;
                if (kinematic && theta.mean.size() == 2)
                    b = initial_belief(theta.mean, theta.cov, cfg.birth_velocity_sd);
                open_cluster(s, ids.take(), std::nullopt, std::move(theta), b);
            }
            k = D;
        }
        ++s.sizes[k];
        s.assignments.push_back(ClusterLabel{k});
        s.object_states.push_back(draw_object_state(s, k, trans, used, cfg, rng));
    }
    return out;
}

PosteriorMeasure py_posterior_measure(const PYClusterState& state, Rng& rng) {
    const PYParams& p = state.params;
    p.validate();
    if (!(p.d > 0.0))
        throw PreconditionError("py_posterior_measure needs d > 0; with d = 0 use the Dirichlet-process posterior");
    const ClusterState& s = state.clusters;
    s.validate();
    const std::size_t D = s.cluster_count();
    if (D == 0) throw PreconditionError("py_posterior_measure needs at least one occupied cluster");
    const double N = static_cast<double>(s.object_count());
    const double Dd = static_cast<double>(D) * p.d;
    const double b = sample_beta(N - Dd, p.alpha + Dd, rng);
    std::vector<double> conc(D);
    for (std::size_t j = 0; j < D; ++j) conc[j] = s.sizes[j] - p.d;
    std::vector<double> pi = sample_dirichlet(conc, rng);
    PosteriorMeasure m;
    m.atoms = s.unique_params;
    m.weights.resize(D);
    for (std::size_t j = 0; j < D; ++j) m.weights[j] = b * pi[j];
    m.residual = 1.0 - b;
    m.residual_process = PYParams{p.d, p.alpha + Dd};
    return m;
}

}  // namespace bnpt
