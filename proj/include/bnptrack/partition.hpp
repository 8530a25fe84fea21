#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bnptrack/random.hpp"

namespace bnpt {

// Index of a cluster within one ClusterState (0..D-1).
struct ClusterLabel {
    std::size_t id = 0;
    friend auto operator<=>(const ClusterLabel&, const ClusterLabel&) = default;
};

// Block sizes of a partition of n items.
class PartitionSizes {
public:
    PartitionSizes() = default;
    explicit PartitionSizes(std::vector<int> sizes);  // throws ParameterError if any size < 1

    const std::vector<int>& sizes() const { return sizes_; }
    int n() const { return n_; }
    std::size_t blocks() const { return sizes_.size(); }
    int operator[](std::size_t j) const { return sizes_[j]; }

    PartitionSizes with_added(std::size_t j) const;  // j == blocks() opens a new block

    friend bool operator==(const PartitionSizes&, const PartitionSizes&) = default;

private:
    std::vector<int> sizes_;
    int n_ = 0;
};

struct PYParams {
    double d = 0.0;
    double alpha = 1.0;
    void validate() const;  // 0 <= d < 1, alpha > -d
};

struct StickBreakingWeights {
    std::vector<double> weights;
    double residual = 1.0;
    std::size_t truncation() const { return weights.size(); }
};

// Weights from explicit stick fractions V_1..V_K.
StickBreakingWeights stick_break_from_fractions(std::span<const double> fractions);
StickBreakingWeights stick_break_dp(double alpha, std::size_t K, Rng& rng);
StickBreakingWeights stick_break_py(const PYParams& p, std::size_t K, Rng& rng);

// Probability of joining each existing block, then of opening a new one.
std::vector<double> crp_predictive_dp(const PartitionSizes& sizes, double alpha);
std::vector<double> crp_predictive_py(const PartitionSizes& sizes, const PYParams& p);

double log_rising_factorial(double x, int n);

double log_eppf_dp(const PartitionSizes& sizes, double alpha);
double eppf_dp(const PartitionSizes& sizes, double alpha);

enum class EppfVariant {
    literal,    // prod_{j=1}^{D}(alpha+jd) / alpha^[n] * prod (1-d)^[n_i]; does not normalize
    corrected,  // prod_{j=1}^{D-1}(alpha+jd) / (alpha+1)^[n-1] * prod (1-d)^[n_i - 1]
};

double log_eppf_py(const PartitionSizes& sizes, const PYParams& p,
                   EppfVariant variant = EppfVariant::corrected);
double eppf_py(const PartitionSizes& sizes, const PYParams& p,
               EppfVariant variant = EppfVariant::corrected);

using EppfFn = std::function<double(const PartitionSizes&)>;

// |p(sizes) - sum over one-item extensions of p|; zero for a consistent EPPF.
double partition_consistency_check(const EppfFn& eppf, const PartitionSizes& sizes);

inline constexpr int kMaxEnumerableItems = 12;

// Every set partition of n items as a restricted growth string, in lexicographic order.
std::vector<std::vector<int>> enumerate_partitions(int n);
// Same sequence, streamed to `visit` without materializing it.
void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& visit);

PartitionSizes block_sizes(std::span<const int> rgs);

// Relabel arbitrary block ids into restricted growth string form.
std::vector<int> canonical_rgs(std::span<const std::size_t> labels);

std::uint64_t bell_number(int n);

}  // namespace bnpt
