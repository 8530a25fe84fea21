#include "bnptrack/gibbs.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

void PriorConfig::validate() const {
    if (kind == PriorKind::ddp) {
        if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
    } else {
        PYParams{d, alpha}.validate();
    }
    if (alpha_prior) alpha_prior->validate();
}

void ChainConfig::validate() const {
    if (n_sweeps < 1) throw ParameterError("n_sweeps must be >= 1");
    if (burn_in < 0 || burn_in >= n_sweeps) throw ParameterError("burn_in must satisfy 0 <= burn_in < n_sweeps");
    if (thin < 1) throw ParameterError("thin must be >= 1");
    if (retained() < 1) throw ParameterError("chain retains no samples; increase n_sweeps or decrease thin");
}

void TrackerConfig::validate() const {
    prior.validate();
    base.validate();
    if (!(p_survive >= 0.0 && p_survive <= 1.0)) throw ParameterError("p_survive must lie in [0, 1]");
    kernel.validate();
    if (kernel.param_walk_cov.rows() != base.dim())
        throw DimensionError("param_walk_cov does not match the NIW dimension");
    if (kernel.kernel == ParamKernel::kinematic && base.dim() != 2)
        throw DimensionError("kinematic parameter kernel needs 2-D position features");
}

StepModel::StepModel(const TransitionedState& trans, const GaussianNIW& H, std::vector<Vector> features,
                     bool kinematic, double birth_velocity_sd)
    : trans_(&trans), base_(H), features_(std::move(features)), kinematic_(kinematic),
      birth_velocity_sd_(birth_velocity_sd) {
    base_.validate();
    trans.validate();
    const std::size_t N = features_.size();
    for (const auto& z : features_)
        if (z.size() != base_.dim()) throw DimensionError("measurement feature dimension does not match the NIW prior");
    log_birth_.resize(N);
    if (N > 0) {
        StudentTDensity t = niw_predictive_density(base_);
        for (std::size_t i = 0; i < N; ++i) log_birth_[i] = t.log_density(features_[i]);
    }
    const std::size_t P = trans.previous_clusters();
    log_kernel_.assign(P * N, -std::numeric_limits<double>::infinity());
    for (std::size_t o = 0; o < P; ++o) {
        if (N == 0) continue;
        GaussianDensity g(trans.kernels[o].center, trans.kernels[o].cov + trans.params[o].cov);
        for (std::size_t i = 0; i < N; ++i) log_kernel_[o * N + i] = g.log_density(features_[i]);
    }
}

ClusterParams draw_cluster_params(std::span<const Vector> data, const MeanKernel* kernel, const Matrix* carried_cov,
                                  const GaussianNIW& H, Rng& rng) {
    if (kernel) {
        if (!carried_cov) throw PreconditionError("draw_cluster_params: continued cluster needs its covariance");
        GaussianBelief b = gaussian_mean_posterior(kernel->center, kernel->cov, *carried_cov, data);
        return ClusterParams{sample_mvn(b.mean, b.cov, rng), *carried_cov};
    }
    return niw_sample(niw_posterior(H, data), rng);
}

namespace {

constexpr std::size_t kUnplaced = std::numeric_limits<std::size_t>::max();

TargetState state_of_cluster(const ClusterState& s, std::size_t j) {
    const Vector& m = s.unique_params[j].mean;
    TargetState st;
    st.x = m[0];
    st.y = m.size() > 1 ? m[1] : 0.0;
    if (!s.beliefs.empty()) {
        st.vx = s.beliefs[j].mean[1];
        st.vy = s.beliefs[j].mean[3];
    }
    return st;
}

class Sweeper {
public:
    Sweeper(const StepModel& m, PriorKind kind, double alpha, double d, const SweepObserver* observer)
        : m_(m), kind_(kind), alpha_(alpha), d_(d), observer_(observer) {
        if (kind_ == PriorKind::ddp) {
            if (!(alpha_ > 0.0)) throw ParameterError("alpha must be positive");
        } else {
            PYParams{d_, alpha_}.validate();
        }
    }

    void rebuild(const ClusterState& s) {
        dens_.clear();
        for (const auto& p : s.unique_params) dens_.emplace_back(p.mean, p.cov);
    }

    std::optional<std::uint64_t> remove(ClusterState& s, std::size_t i) {
        const std::size_t c = s.assignments[i].id;
        s.assignments[i].id = kUnplaced;
        if (--s.sizes[c] > 0) return std::nullopt;
        std::optional<std::uint64_t> reuse;
        if (!s.origins[c]) reuse = s.track_ids[c];
        s.track_ids.erase(s.track_ids.begin() + c);
        s.origins.erase(s.origins.begin() + c);
        s.unique_params.erase(s.unique_params.begin() + c);
        s.sizes.erase(s.sizes.begin() + c);
        if (!s.beliefs.empty()) s.beliefs.erase(s.beliefs.begin() + c);
        dens_.erase(dens_.begin() + c);
        for (auto& a : s.assignments)
            if (a.id != kUnplaced && a.id > c) --a.id;
        return reuse;
    }

    void place(ClusterState& s, std::size_t i, Rng& rng, TrackIdSource& ids, std::optional<std::uint64_t> reuse) {
        const TransitionedState& trans = m_.trans();
        if (kind_ == PriorKind::ddp)
            ddp_case_probs(trans, occupancy_of(s), alpha_, cp_);
        else
            dpy_case_probs(trans, occupancy_of(s), PYParams{d_, alpha_}, cp_);
        check_probabilities(i);
        if (observer_) (*observer_)(cp_);

        const Vector& z = m_.features()[i];
        const std::size_t D = s.cluster_count();
        logw_.clear();
        for (std::size_t j = 0; j < D; ++j) logw_.push_back(std::log(cp_.selected[j]) + dens_[j].log_density(z));
        for (std::size_t u = 0; u < cp_.unselected.size(); ++u)
            logw_.push_back(std::log(cp_.unselected[u]) + m_.log_kernel(cp_.unselected_origin[u], i));
        logw_.push_back(std::log(cp_.birth) + m_.log_birth(i));
        for (double w : logw_)
            if (std::isnan(w))
                throw NumericalError("gibbs sweep: NaN weight for measurement " + std::to_string(i) + " with " +
                                     std::to_string(D) + " occupied clusters");

        std::size_t k = sample_log_categorical(logw_, rng);
        if (k >= D) {
            std::span<const Vector> one(&z, 1);
            if (k < D + cp_.unselected.size()) {
                const std::size_t o = cp_.unselected_origin[k - D];
                ClusterParams theta = draw_cluster_params(one, &trans.kernels[o], &trans.params[o].cov, m_.base(), rng);
                std::optional<KinematicBelief> b;
                if (m_.kinematic())
                    b = trans.beliefs.empty() ? initial_belief(theta.mean, theta.cov, m_.birth_velocity_sd())
                                              : trans.beliefs[o];
                open_cluster(s, trans.track_ids[o], o, std::move(theta), b);
            } else {
                ClusterParams theta = draw_cluster_params(one, nullptr, nullptr, m_.base(), rng);
                std::optional<KinematicBelief> b;
                if (m_.kinematic()) b = initial_belief(theta.mean, theta.cov, m_.birth_velocity_sd());
                open_cluster(s, reuse ? *reuse : ids.take(), std::nullopt, std::move(theta), b);
            }
            dens_.emplace_back(s.unique_params.back().mean, s.unique_params.back().cov);
            k = D;
        }
        ++s.sizes[k];
        s.assignments[i].id = k;
        s.object_states[i] = state_of_cluster(s, k);
    }

    void sweep(ClusterState& s, Rng& rng, TrackIdSource& ids) {
        if (s.object_count() != m_.size()) throw DimensionError("gibbs sweep: state and frame sizes differ");
        rebuild(s);
        for (std::size_t i = 0; i < s.object_count(); ++i) {
            auto reuse = remove(s, i);
            place(s, i, rng, ids, reuse);
        }
    }

private:
    void check_probabilities(std::size_t i) const {
        double sum = 0.0;
        bool ok = cp_.birth >= 0.0;
        for (double v : cp_.selected) ok = ok && v >= 0.0, sum += v;
        for (double v : cp_.unselected) ok = ok && v >= 0.0, sum += v;
        sum += cp_.birth;
        if (!ok || !(std::abs(sum - 1.0) <= 1e-9))
            throw InvariantError("gibbs sweep: invalid prior probability vector at measurement " + std::to_string(i));
    }

    const StepModel& m_;
    PriorKind kind_;
    double alpha_;
    double d_;
    const SweepObserver* observer_;
    std::vector<GaussianDensity> dens_;
    CaseProbabilities cp_;
    std::vector<double> logw_;
};

}  // namespace

void gibbs_sweep(ClusterState& state, const StepModel& model, PriorKind kind, double alpha, double d, Rng& rng,
                 TrackIdSource& ids, const SweepObserver* observer) {
    Sweeper(model, kind, alpha, d, observer).sweep(state, rng, ids);
}

void ddp_gibbs_sweep(ClusterState& state, const StepModel& model, double alpha, Rng& rng, TrackIdSource& ids,
                     const SweepObserver* observer) {
    gibbs_sweep(state, model, PriorKind::ddp, alpha, 0.0, rng, ids, observer);
}

void dpy_gibbs_sweep(ClusterState& state, const StepModel& model, const PYParams& p, Rng& rng, TrackIdSource& ids,
                     const SweepObserver* observer) {
    gibbs_sweep(state, model, PriorKind::dpy, p.alpha, p.d, rng, ids, observer);
}

ClusterState initial_state(const StepModel& model, InitMode mode, PriorKind kind, double alpha, double d, Rng& rng,
                           TrackIdSource& ids) {
    const std::size_t N = model.size();
    ClusterState s;
    s.assignments.assign(N, ClusterLabel{kUnplaced});
    s.object_states.assign(N, TargetState{});
    if (N == 0) return s;
    auto belief_for = [&](const ClusterParams& theta) -> std::optional<KinematicBelief> {
        if (!model.kinematic()) return std::nullopt;
        return initial_belief(theta.mean, theta.cov, model.birth_velocity_sd());
    };
    switch (mode) {
        case InitMode::sequential: {
            Sweeper sw(model, kind, alpha, d, nullptr);
            sw.rebuild(s);
            for (std::size_t i = 0; i < N; ++i) sw.place(s, i, rng, ids, std::nullopt);
            break;
        }
        case InitMode::single_cluster: {
            ClusterParams theta = draw_cluster_params(model.features(), nullptr, nullptr, model.base(), rng);
            auto b = belief_for(theta);
            open_cluster(s, ids.take(), std::nullopt, std::move(theta), b);
            s.sizes[0] = static_cast<int>(N);
            for (auto& a : s.assignments) a.id = 0;
            break;
        }
        case InitMode::singletons: {
            for (std::size_t i = 0; i < N; ++i) {
                std::span<const Vector> one(&model.features()[i], 1);
                ClusterParams theta = draw_cluster_params(one, nullptr, nullptr, model.base(), rng);
                auto b = belief_for(theta);
                open_cluster(s, ids.take(), std::nullopt, std::move(theta), b);
                s.sizes[i] = 1;
                s.assignments[i].id = i;
            }
            break;
        }
    }
    for (std::size_t i = 0; i < N; ++i) s.object_states[i] = state_of_cluster(s, s.assignments[i].id);
    return s;
}

void refresh_unique_params(ClusterState& state, const StepModel& model, Rng& rng) {
    const std::size_t D = state.cluster_count();
    const auto& features = model.features();
    if (state.object_count() != features.size()) throw DimensionError("refresh: state and frame sizes differ");
    std::vector<std::vector<Vector>> data(D);
    for (std::size_t i = 0; i < state.object_count(); ++i) data[state.assignments[i].id].push_back(features[i]);
    const TransitionedState& trans = model.trans();
    for (std::size_t j = 0; j < D; ++j) {
        if (state.origins[j]) {
            const std::size_t o = *state.origins[j];
            state.unique_params[j] =
                draw_cluster_params(data[j], &trans.kernels[o], &trans.params[o].cov, model.base(), rng);
        } else {
            state.unique_params[j] = draw_cluster_params(data[j], nullptr, nullptr, model.base(), rng);
        }
    }
    for (std::size_t i = 0; i < state.object_count(); ++i)
        state.object_states[i] = state_of_cluster(state, state.assignments[i].id);
}

void finalize_beliefs(ClusterState& state, const StepModel& model, const KernelConfig& cfg) {
    if (!model.kinematic()) return;
    const std::size_t D = state.cluster_count();
    const auto& features = model.features();
    std::vector<Eigen::Vector2d> sum(D, Eigen::Vector2d::Zero());
    for (std::size_t i = 0; i < state.object_count(); ++i) sum[state.assignments[i].id] += features[i].head<2>();
    const TransitionedState& trans = model.trans();
    state.beliefs.resize(D);
    for (std::size_t j = 0; j < D; ++j) {
        const int n = state.sizes[j];
        const Eigen::Vector2d ybar = sum[j] / static_cast<double>(n);
        const Eigen::Matrix2d r = state.unique_params[j].cov;
        if (state.origins[j] && !trans.beliefs.empty())
            state.beliefs[j] = update_belief(trans.beliefs[*state.origins[j]], ybar, r, n);
        else
            state.beliefs[j] = initial_belief(ybar, r / static_cast<double>(n), cfg.birth_velocity_sd);
    }
    for (std::size_t i = 0; i < state.object_count(); ++i) {
        const KinematicBelief& b = state.beliefs[state.assignments[i].id];
        TargetState st = TargetState::from_stacked(b.mean);
        if (cfg.motion == MotionModel::coordinated_turn) st.omega = 0.0;
        state.object_states[i] = st;
    }
}

double log_sequential_prior(const ClusterState& state, const TransitionedState& trans, PriorKind kind, double alpha,
                            double d) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<int> sizes;
    std::vector<std::optional<std::size_t>> origins;
    std::vector<std::size_t> replay_index(state.cluster_count(), kUnplaced);
    CaseProbabilities cp;
    double lp = 0.0;
    for (const auto& a : state.assignments) {
        const Occupancy occ{sizes, origins};
        if (kind == PriorKind::ddp)
            ddp_case_probs(trans, occ, alpha, cp);
        else
            dpy_case_probs(trans, occ, PYParams{d, alpha}, cp);
        const std::size_t c = a.id;
        if (replay_index[c] != kUnplaced) {
            lp += std::log(cp.selected[replay_index[c]]);
            ++sizes[replay_index[c]];
            continue;
        }
        if (state.origins[c]) {
            double prob = 0.0;
            for (std::size_t u = 0; u < cp.unselected_origin.size(); ++u)
                if (cp.unselected_origin[u] == *state.origins[c]) prob = cp.unselected[u];
            if (prob <= 0.0) return neg_inf;
            lp += std::log(prob);
        } else {
            lp += std::log(cp.birth);
        }
        replay_index[c] = sizes.size();
        sizes.push_back(1);
        origins.push_back(state.origins[c]);
    }
    return lp;
}

void resample_survival(TransitionedState& trans, const ClusterState& state, double p_survive, PriorKind kind,
                       double alpha, double d, Rng& rng) {
    if (!(p_survive >= 0.0 && p_survive <= 1.0)) throw ParameterError("p_survive must lie in [0, 1]");
    std::vector<char> continued(trans.previous_clusters(), 0);
    for (const auto& o : state.origins)
        if (o) continued[*o] = 1;
    std::vector<double> logw;
    for (std::size_t o = 0; o < trans.previous_clusters(); ++o) {
        const int m = trans.previous_size(o);
        if (m == 0) continue;
        logw.assign(m + 1, -std::numeric_limits<double>::infinity());
        const int original = trans.surviving_sizes[o];
        for (int v = continued[o] ? 1 : 0; v <= m; ++v) {
            double prior;
            if (p_survive == 0.0)
                prior = v == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
            else if (p_survive == 1.0)
                prior = v == m ? 0.0 : -std::numeric_limits<double>::infinity();
            else
                prior = std::lgamma(m + 1.0) - std::lgamma(v + 1.0) - std::lgamma(m - v + 1.0) +
                        v * std::log(p_survive) + (m - v) * std::log1p(-p_survive);
            if (prior == -std::numeric_limits<double>::infinity()) continue;
            trans.set_surviving_count(o, v);
            logw[v] = prior + log_sequential_prior(state, trans, kind, alpha, d);
        }
        trans.set_surviving_count(o, original);
        trans.set_surviving_count(o, static_cast<int>(sample_log_categorical(logw, rng)));
    }
}

AlphaContext alpha_context(const ClusterState& state, const TransitionedState& trans, double d) {
    AlphaContext ctx;
    ctx.n = state.object_count();
    ctx.transitioned_mass = static_cast<double>(trans.transitioned_mass());
    ctx.d = d;
    std::vector<char> seen(state.cluster_count(), 0);
    std::size_t distinct = 0;
    for (const auto& a : state.assignments) {
        if (seen[a.id]) continue;
        seen[a.id] = 1;
        if (!state.origins[a.id]) ctx.clusters_before_birth.push_back(distinct);
        ++distinct;
    }
    return ctx;
}

PosteriorSample make_sample(const ClusterState& state, double alpha) {
    PosteriorSample p;
    p.assignments = state.assignments;
    p.track_ids = state.track_ids;
    p.unique_params = state.unique_params;
    p.cardinality = state.cluster_count();
    p.states.reserve(state.cluster_count());
    for (std::size_t j = 0; j < state.cluster_count(); ++j) p.states.push_back(state_of_cluster(state, j));
    p.alpha = alpha;
    return p;
}

ChainResult run_chain(const std::vector<FeatureFrame>& frames, const TrackerConfig& tracker, const ChainConfig& chain,
                      std::uint64_t stream) {
    tracker.validate();
    chain.validate();
    Rng rng = make_rng(chain.seed, stream);
    TrackIdSource ids;
    const PriorConfig& prior = tracker.prior;
    const double d = prior.kind == PriorKind::dpy ? prior.d : 0.0;
    const bool kinematic = tracker.kernel.kernel == ParamKernel::kinematic;
    double alpha = prior.alpha;
    ChainResult out;
    out.samples.reserve(frames.size());
    ClusterState prev;
    for (const FeatureFrame& frame : frames) {
        TransitionedState trans = transition_step(prev, tracker.p_survive, tracker.kernel, rng);
        StepModel model(trans, tracker.base, frame, kinematic, tracker.kernel.birth_velocity_sd);
        ClusterState s = initial_state(model, InitMode::sequential, prior.kind, alpha, d, rng, ids);
        refresh_unique_params(s, model, rng);
        std::vector<PosteriorSample> kept;
        kept.reserve(chain.retained());
        ClusterState last = s;
        for (int sweep = 1; sweep <= chain.n_sweeps; ++sweep) {
            if (!frame.empty()) {
                gibbs_sweep(s, model, prior.kind, alpha, d, rng, ids);
                refresh_unique_params(s, model, rng);
            }
            if (tracker.resample_survival && !frame.empty())
                resample_survival(trans, s, tracker.p_survive, prior.kind, alpha, d, rng);
            if (prior.alpha_prior) alpha = sample_alpha(alpha_context(s, trans, d), *prior.alpha_prior, alpha, rng);
            if (chain.is_retained(sweep)) {
                kept.push_back(make_sample(s, alpha));
                last = s;
            }
        }
        finalize_beliefs(last, model, tracker.kernel);
        std::vector<std::uint64_t> labels;
        labels.reserve(last.object_count());
        for (const auto& a : last.assignments) labels.push_back(last.track_ids[a.id]);
        out.assignment_history.push_back(std::move(labels));
        out.samples.push_back(std::move(kept));
        out.summaries.push_back(last);
        prev = std::move(last);
    }
    return out;
}

}  // namespace bnpt
