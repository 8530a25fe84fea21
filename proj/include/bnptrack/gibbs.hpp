#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bnptrack/concentration.hpp"
#include "bnptrack/ddp_emm.hpp"
#include "bnptrack/dpy_stp.hpp"

namespace bnpt {

enum class PriorKind { ddp, dpy };

struct PriorConfig {
    PriorKind kind = PriorKind::ddp;
    double alpha = 1.0;
    double d = 0.0;                         // used by dpy only
    std::optional<GammaPrior> alpha_prior;  // resample alpha once per sweep when set
    void validate() const;
    friend bool operator==(const PriorConfig&, const PriorConfig&) = default;
};

struct ChainConfig {
    int n_sweeps = 1500;
    int burn_in = 500;
    int thin = 2;
    std::uint64_t seed = 1;
    void validate() const;
    int retained() const { return (n_sweeps - burn_in) / thin; }
    bool is_retained(int sweep) const { return sweep > burn_in && (sweep - burn_in) % thin == 0; }  // 1-based sweep
    friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

// Everything that stays fixed while sweeping one time step: the transitioned
// prior, the base measure, the frame, and cached per-measurement densities.
// Holds a reference to `trans`, which must outlive the model.
class StepModel {
public:
    StepModel(const TransitionedState& trans, const GaussianNIW& H, std::vector<Vector> features,
              bool kinematic = false, double birth_velocity_sd = 10.0);

    const TransitionedState& trans() const { return *trans_; }
    const GaussianNIW& base() const { return base_; }
    const std::vector<Vector>& features() const { return features_; }
    std::size_t size() const { return features_.size(); }
    bool kinematic() const { return kinematic_; }
    double birth_velocity_sd() const { return birth_velocity_sd_; }

    // log of the NIW predictive at measurement i (new-cluster term)
    double log_birth(std::size_t i) const { return log_birth_[i]; }
    // log N(z_i; kernel center, kernel cov + cluster cov) for surviving previous cluster o
    double log_kernel(std::size_t o, std::size_t i) const { return log_kernel_[o * features_.size() + i]; }

private:
    const TransitionedState* trans_;
    GaussianNIW base_;
    std::vector<Vector> features_;
    bool kinematic_;
    double birth_velocity_sd_;
    std::vector<double> log_birth_;
    std::vector<double> log_kernel_;
};

using SweepObserver = std::function<void(const CaseProbabilities&)>;

// One pass of single-site assignment updates over all measurements.
void ddp_gibbs_sweep(ClusterState& state, const StepModel& model, double alpha, Rng& rng, TrackIdSource& ids,
                     const SweepObserver* observer = nullptr);
void dpy_gibbs_sweep(ClusterState& state, const StepModel& model, const PYParams& p, Rng& rng, TrackIdSource& ids,
                     const SweepObserver* observer = nullptr);
void gibbs_sweep(ClusterState& state, const StepModel& model, PriorKind kind, double alpha, double d, Rng& rng,
                 TrackIdSource& ids, const SweepObserver* observer = nullptr);

enum class InitMode { sequential, single_cluster, singletons };

// Starting configuration for a step. `sequential` places measurements one at a
// time from their conditional given the earlier ones.
ClusterState initial_state(const StepModel& model, InitMode mode, PriorKind kind, double alpha, double d, Rng& rng,
                           TrackIdSource& ids);

// Draw of a cluster parameter given its data. With `kernel` the cluster
// continues a previous one: its mean has prior N(kernel) and covariance
// `carried_cov` is kept. Otherwise the draw is from the NIW posterior.
ClusterParams draw_cluster_params(std::span<const Vector> data, const MeanKernel* kernel, const Matrix* carried_cov,
                                  const GaussianNIW& H, Rng& rng);

// Redraw every unique parameter from its conditional and refresh object states.
void refresh_unique_params(ClusterState& state, const StepModel& model, Rng& rng);

// Condition each cluster's kinematic belief on its measurements and write
// posterior states to object_states.
void finalize_beliefs(ClusterState& state, const StepModel& model, const KernelConfig& cfg);

// Log prior probability of the assignment under the case rule, placing
// measurements in index order.
double log_sequential_prior(const ClusterState& state, const TransitionedState& trans, PriorKind kind, double alpha,
                            double d);

// Gibbs update of every surviving count V*_o given the assignment. Prior is
// Binomial(previous cluster size, p_survive); likelihood is the sequential
// prior of the current assignment. A cluster continued at step k cannot die.
void resample_survival(TransitionedState& trans, const ClusterState& state, double p_survive, PriorKind kind,
                       double alpha, double d, Rng& rng);

AlphaContext alpha_context(const ClusterState& state, const TransitionedState& trans, double d);

struct PosteriorSample {
    std::vector<ClusterLabel> assignments;
    std::vector<std::uint64_t> track_ids;
    std::vector<ClusterParams> unique_params;
    std::size_t cardinality = 0;
    std::vector<TargetState> states;  // one per cluster
    double alpha = 0.0;
    friend bool operator==(const PosteriorSample&, const PosteriorSample&) = default;
};

PosteriorSample make_sample(const ClusterState& state, double alpha);

struct TrackerConfig {
    PriorConfig prior;
    GaussianNIW base;
    double p_survive = 0.95;
    bool resample_survival = true;
    KernelConfig kernel;
    void validate() const;
    friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

struct ChainResult {
    std::vector<std::vector<PosteriorSample>> samples;      // per step, retained sweeps
    std::vector<ClusterState> summaries;                    // per step, carried to the next step
    std::vector<std::vector<std::uint64_t>> assignment_history;  // per step, track id of each measurement
};

using FeatureFrame = std::vector<Vector>;

ChainResult run_chain(const std::vector<FeatureFrame>& frames, const TrackerConfig& tracker, const ChainConfig& chain,
                      std::uint64_t stream = 0);

}  // namespace bnpt
