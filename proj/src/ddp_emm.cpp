#include "bnptrack/ddp_emm.hpp"

#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

void ClusterState::validate() const {
    const std::size_t D = sizes.size();
    if (track_ids.size() != D || origins.size() != D || unique_params.size() != D)
        throw InvariantError("cluster state: per-cluster arrays disagree in length");
    if (!beliefs.empty() && beliefs.size() != D) throw InvariantError("cluster state: belief count mismatch");
    if (object_states.size() != assignments.size())
        throw InvariantError("cluster state: object_states and assignments differ in length");
    std::vector<int> count(D, 0);
    for (const auto& a : assignments) {
        if (a.id >= D) throw InvariantError("cluster state: assignment refers to a missing cluster");
        ++count[a.id];
    }
    for (std::size_t j = 0; j < D; ++j) {
        if (sizes[j] < 1) throw InvariantError("cluster state: empty cluster " + std::to_string(j));
        if (count[j] != sizes[j]) throw InvariantError("cluster state: size of cluster " + std::to_string(j) + " does not match its assignments");
        for (std::size_t i = 0; i < j; ++i)
            if (origins[i] && origins[j] && *origins[i] == *origins[j])
                throw InvariantError("cluster state: two clusters continue the same previous cluster");
    }
}

std::size_t TransitionedState::alive_count() const {
    std::size_t n = 0;
    for (bool a : cluster_alive) n += a ? 1 : 0;
    return n;
}

int TransitionedState::transitioned_mass() const {
    int m = 0;
    for (std::size_t j = 0; j < surviving_sizes.size(); ++j)
        if (cluster_alive[j]) m += surviving_sizes[j];
    return m;
}

void TransitionedState::validate() const {
    const std::size_t D = surviving_sizes.size();
    if (cluster_alive.size() != D || params.size() != D || kernels.size() != D || track_ids.size() != D)
        throw InvariantError("transitioned state: per-cluster arrays disagree in length");
    if (!beliefs.empty() && beliefs.size() != D) throw InvariantError("transitioned state: belief count mismatch");
    if (surviving_states.size() != surviving_clusters.size())
        throw InvariantError("transitioned state: survivor arrays disagree in length");
    for (std::size_t j = 0; j < D; ++j)
        if ((surviving_sizes[j] == 0) == cluster_alive[j])
            throw InvariantError("transitioned state: V* = 0 must coincide with lambda = 0");
}

TransitionedState transition_step(const ClusterState& prev, double p_survive, const KernelConfig& cfg, Rng& rng) {
    if (!(p_survive >= 0.0 && p_survive <= 1.0)) throw ParameterError("p_survive must lie in [0, 1]");
    prev.validate();
    const std::size_t D = prev.cluster_count();
    const std::size_t N = prev.object_count();
    TransitionedState t;
    t.survivors.assign(N, false);
    t.surviving_sizes.assign(D, 0);
    t.cluster_alive.assign(D, false);
    t.params = prev.unique_params;
    t.kernels.resize(D);
    t.track_ids = prev.track_ids;
    t.propagated_states.reserve(N);
    t.object_clusters.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        t.survivors[i] = uniform01(rng) < p_survive;
        t.object_clusters.push_back(prev.assignments[i].id);
        t.propagated_states.push_back(propagate_state(prev.object_states[i], cfg, rng));
        if (!t.survivors[i]) continue;
        ++t.surviving_sizes[prev.assignments[i].id];
        t.surviving_clusters.push_back(prev.assignments[i].id);
        t.surviving_states.push_back(t.propagated_states.back());
    }
    const bool kinematic = cfg.kernel == ParamKernel::kinematic && !prev.beliefs.empty();
    if (kinematic) t.beliefs = prev.beliefs;
    for (std::size_t j = 0; j < D; ++j) {
        t.cluster_alive[j] = t.surviving_sizes[j] > 0;
        const ClusterParams& theta = prev.unique_params[j];
        if (cfg.param_walk_cov.rows() != theta.mean.size())
            throw DimensionError("transition_step: param_walk_cov does not match parameter dimension");
        if (kinematic) {
            if (theta.mean.size() != 2) throw DimensionError("kinematic parameter kernel needs 2-D positions");
            t.beliefs[j] = predict_belief(prev.beliefs[j], cfg);
            t.kernels[j].center = belief_position(t.beliefs[j]);
            t.kernels[j].cov = Matrix(belief_position_cov(t.beliefs[j])) + cfg.param_walk_cov;
            t.params[j].mean = sample_mvn(t.kernels[j].center, t.kernels[j].cov, rng);
        } else {
            t.kernels[j].center = theta.mean;
            t.kernels[j].cov = cfg.param_walk_cov;
            t.params[j] = param_walk(theta, cfg, rng);
        }
    }
    return t;
}

int TransitionedState::previous_size(std::size_t o) const {
    int n = 0;
    for (std::size_t c : object_clusters) n += c == o ? 1 : 0;
    return n;
}

void TransitionedState::set_surviving_count(std::size_t o, int count) {
    if (o >= previous_clusters()) throw ParameterError("set_surviving_count: cluster index out of range");
    if (count < 0 || count > previous_size(o)) throw ParameterError("set_surviving_count: count outside [0, cluster size]");
    if (surviving_sizes[o] == count) return;
    int marked = 0;
    for (std::size_t i = 0; i < object_clusters.size(); ++i) {
        if (object_clusters[i] != o) continue;
        survivors[i] = marked < count;
        marked += survivors[i] ? 1 : 0;
    }
    surviving_sizes[o] = count;
    cluster_alive[o] = count > 0;
    surviving_states.clear();
    surviving_clusters.clear();
    for (std::size_t i = 0; i < object_clusters.size(); ++i) {
        if (!survivors[i]) continue;
        surviving_states.push_back(propagated_states[i]);
        surviving_clusters.push_back(object_clusters[i]);
    }
}

int Occupancy::placed() const {
    int n = 0;
    for (int s : sizes) n += s;
    return n;
}

double CaseProbabilities::total() const {
    double s = 0.0;
    for (double v : selected) s += v;
    for (double v : unselected) s += v;
    return s + birth;
}

namespace {

// Marks previous clusters already continued by a current cluster and
// returns V* for current cluster j (0 for born clusters).
double attached_mass(const TransitionedState& trans, const Occupancy& cur, std::size_t j, std::vector<char>& taken) {
    if (!cur.origins[j]) return 0.0;
    const std::size_t o = *cur.origins[j];
    if (o >= trans.previous_clusters() || !trans.cluster_alive[o])
        throw InvariantError("current cluster continues a previous cluster that did not survive");
    taken[o] = 1;
    return static_cast<double>(trans.surviving_sizes[o]);
}

void normalize(CaseProbabilities& out) {
    const double g = out.total();
    if (!(g > 0.0)) throw InvariantError("case probabilities: total mass is not positive");
    for (double& v : out.selected) v /= g;
    for (double& v : out.unselected) v /= g;
    out.birth /= g;
}

}  // namespace

void ddp_case_probs(const TransitionedState& trans, const Occupancy& current, double alpha, CaseProbabilities& out) {
    if (!(alpha > 0.0)) throw ParameterError("ddp_case_probs: alpha must be positive");
    if (current.origins.size() != current.sizes.size()) throw InvariantError("occupancy arrays disagree in length");
    const std::size_t D = current.sizes.size();
    out.taken_scratch.assign(trans.previous_clusters(), 0);
    out.selected.resize(D);
    for (std::size_t j = 0; j < D; ++j) {
        const double vstar = attached_mass(trans, current, j, out.taken_scratch);
        out.selected[j] = static_cast<double>(current.sizes[j]) + vstar;
    }
    out.unselected.clear();
    out.unselected_origin.clear();
    for (std::size_t o = 0; o < trans.previous_clusters(); ++o) {
        if (!trans.cluster_alive[o] || out.taken_scratch[o]) continue;
        out.unselected_origin.push_back(o);
        out.unselected.push_back(static_cast<double>(trans.surviving_sizes[o]));
    }
    out.birth = alpha;
    normalize(out);
}

Occupancy occupancy_of(const ClusterState& s) { return Occupancy{s.sizes, s.origins}; }

CaseProbabilities ddp_case_probs(const TransitionedState& trans, const ClusterState& current, double alpha) {
    CaseProbabilities out;
    ddp_case_probs(trans, occupancy_of(current), alpha, out);
    return out;
}

TargetState draw_object_state(const ClusterState& s, std::size_t j, const TransitionedState& trans,
                              std::vector<std::size_t>& used_survivors, const KernelConfig& cfg, Rng& rng) {
    if (s.origins[j]) {
        const std::size_t o = *s.origins[j];
        std::size_t seen = 0;
        for (std::size_t m = 0; m < trans.surviving_clusters.size(); ++m) {
            if (trans.surviving_clusters[m] != o) continue;
            if (seen++ == used_survivors[o]) {
                ++used_survivors[o];
                return trans.surviving_states[m];
            }
        }
    }
    const ClusterParams& theta = s.unique_params[j];
    Vector pos = sample_mvn(theta.mean, theta.cov, rng);
    TargetState st;
    st.x = pos[0];
    st.y = pos.size() > 1 ? pos[1] : 0.0;
    if (!s.beliefs.empty()) {
        st.vx = s.beliefs[j].mean[1];
        st.vy = s.beliefs[j].mean[3];
    }
    if (cfg.motion == MotionModel::coordinated_turn) st.omega = 0.0;
    return st;
}

void open_cluster(ClusterState& s, std::uint64_t track_id, std::optional<std::size_t> origin, ClusterParams params,
                  std::optional<KinematicBelief> belief) {
    s.track_ids.push_back(track_id);
    s.origins.push_back(origin);
    s.unique_params.push_back(std::move(params));
    s.sizes.push_back(0);
    if (belief) {
        if (s.beliefs.size() + 1 != s.sizes.size()) throw InvariantError("open_cluster: belief bookkeeping out of step");
        s.beliefs.push_back(*belief);
    }
}

ClusterState ddp_draw_prior(const TransitionedState& trans, std::size_t n_objects, double alpha,
                            const GaussianNIW& H, const KernelConfig& cfg, Rng& rng, TrackIdSource& ids) {
    trans.validate();
    ClusterState s;
    const bool kinematic = !trans.beliefs.empty();
    std::vector<std::size_t> used(trans.previous_clusters(), 0);
    CaseProbabilities cp;
    std::vector<double> w;
    for (std::size_t l = 0; l < n_objects; ++l) {
        ddp_case_probs(trans, occupancy_of(s), alpha, cp);
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
    return s;
}

}  // namespace bnpt
