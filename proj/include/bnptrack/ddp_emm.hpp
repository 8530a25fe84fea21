#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bnptrack/conjugate.hpp"
#include "bnptrack/kinematics.hpp"
#include "bnptrack/partition.hpp"

namespace bnpt {

// Hands out persistent track ids for newly born clusters.
struct TrackIdSource {
    std::uint64_t next = 0;
    std::uint64_t take() { return next++; }
};

// Partition bookkeeping at one time step. Cluster j (0..D-1) owns
// unique_params[j]; assignments[i] is the cluster of object/measurement i.
struct ClusterState {
    std::vector<std::uint64_t> track_ids;              // persistent label per cluster
    std::vector<std::optional<std::size_t>> origins;   // previous-step cluster this one continues
    std::vector<ClusterParams> unique_params;
    std::vector<int> sizes;
    std::vector<ClusterLabel> assignments;
    std::vector<TargetState> object_states;
    std::vector<KinematicBelief> beliefs;              // empty, or one per cluster

    std::size_t cluster_count() const { return sizes.size(); }
    std::size_t object_count() const { return assignments.size(); }
    void validate() const;  // throws InvariantError
    friend bool operator==(const ClusterState&, const ClusterState&) = default;
};

// Law of a transitioned cluster mean: N(center, cov).
struct MeanKernel {
    Vector center;
    Matrix cov;
    friend bool operator==(const MeanKernel& a, const MeanKernel& b) {
        return a.center.size() == b.center.size() && a.cov.rows() == b.cov.rows() && a.center == b.center &&
               a.cov == b.cov;
    }
};

// Result of moving a ClusterState from k-1 to k. Arrays indexed by previous
// cluster have one entry per previous cluster; dead clusters have
// cluster_alive = false and surviving_sizes = 0.
struct TransitionedState {
    std::vector<bool> survivors;                  // per previous object
    std::vector<int> surviving_sizes;             // V*_{k|k-1}
    std::vector<bool> cluster_alive;              // lambda
    std::vector<ClusterParams> params;            // walked unique parameters
    std::vector<MeanKernel> kernels;              // law the walked mean was drawn from
    std::vector<std::uint64_t> track_ids;
    std::vector<KinematicBelief> beliefs;         // predicted; empty unless kinematic kernel
    std::vector<TargetState> surviving_states;    // per surviving object
    std::vector<std::size_t> surviving_clusters;  // previous cluster of each surviving object
    std::vector<TargetState> propagated_states;   // per previous object, survivor or not
    std::vector<std::size_t> object_clusters;     // previous cluster of each previous object

    std::size_t previous_clusters() const { return surviving_sizes.size(); }
    std::size_t alive_count() const;
    int transitioned_mass() const;  // sum of V* over alive clusters
    void validate() const;
    // Set V*_o = count, marking the first `count` objects of cluster o as survivors.
    void set_surviving_count(std::size_t o, int count);
    int previous_size(std::size_t o) const;
};

// Walked parameters and kernels are produced for every previous cluster so a
// cluster can be revived when survival counts are resampled.
TransitionedState transition_step(const ClusterState& prev, double p_survive, const KernelConfig& cfg, Rng& rng);

// Sizes and origins of the clusters already occupied at step k.
struct Occupancy {
    std::span<const int> sizes;
    std::span<const std::optional<std::size_t>> origins;
    int placed() const;
};

// Prior selection probabilities for the next object:
//   selected[j]   joins current cluster j (Case 1)
//   unselected[u] opens the survived cluster unselected_origin[u] (Case 2)
//   birth         opens a new cluster (Case 3)
struct CaseProbabilities {
    std::vector<double> selected;
    std::vector<std::size_t> unselected_origin;
    std::vector<double> unselected;
    double birth = 0.0;
    double total() const;
    std::vector<char> taken_scratch;  // reused by the case-probability routines
};

void ddp_case_probs(const TransitionedState& trans, const Occupancy& current, double alpha, CaseProbabilities& out);
CaseProbabilities ddp_case_probs(const TransitionedState& trans, const ClusterState& current, double alpha);

// Place objects one at a time by the case rule. `H` drives births.
ClusterState ddp_draw_prior(const TransitionedState& trans, std::size_t n_objects, double alpha,
                            const GaussianNIW& H, const KernelConfig& cfg, Rng& rng, TrackIdSource& ids);

Occupancy occupancy_of(const ClusterState& s);

// Draw the state of an object joining cluster j of `s`, created from `trans`.
// Shared by both priors.
TargetState draw_object_state(const ClusterState& s, std::size_t j, const TransitionedState& trans,
                              std::vector<std::size_t>& used_survivors, const KernelConfig& cfg, Rng& rng);

// Append a new cluster to `s` holding object `item` (already reserved by caller).
void open_cluster(ClusterState& s, std::uint64_t track_id, std::optional<std::size_t> origin, ClusterParams params,
                  std::optional<KinematicBelief> belief);

}  // namespace bnpt
