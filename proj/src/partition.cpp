#include "bnptrack/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "bnptrack/errors.hpp"

namespace bnpt {

PartitionSizes::PartitionSizes(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    for (int s : sizes_) {
        if (s < 1) throw ParameterError("partition sizes must be >= 1, got " + std::to_string(s));
        n_ += s;
    }
}

PartitionSizes PartitionSizes::with_added(std::size_t j) const {
    std::vector<int> s = sizes_;
    if (j == s.size())
        s.push_back(1);
    else if (j < s.size())
        ++s[j];
    else
        throw ParameterError("with_added: block index out of range");
    return PartitionSizes(std::move(s));
}

void PYParams::validate() const {
    if (!(d >= 0.0 && d < 1.0)) throw ParameterError("discount d must lie in [0, 1), got " + std::to_string(d));
    if (!(alpha > -d) || !std::isfinite(alpha))
        throw ParameterError("concentration alpha must exceed -d, got " + std::to_string(alpha));
}

StickBreakingWeights stick_break_from_fractions(std::span<const double> fractions) {
    StickBreakingWeights w;
    w.weights.reserve(fractions.size());
    double remaining = 1.0;
    for (double v : fractions) {
        if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("stick fraction must lie in [0, 1]");
        w.weights.push_back(v * remaining);
        remaining *= 1.0 - v;
    }
    w.residual = remaining;
    return w;
}

StickBreakingWeights stick_break_dp(double alpha, std::size_t K, Rng& rng) {
    if (!(alpha > 0.0)) throw ParameterError("stick_break_dp: alpha must be positive");
    if (K < 1) throw ParameterError("stick_break_dp: truncation must be >= 1");
    std::vector<double> v(K);
    for (auto& x : v) x = sample_beta(1.0, alpha, rng);
    return stick_break_from_fractions(v);
}

StickBreakingWeights stick_break_py(const PYParams& p, std::size_t K, Rng& rng) {
    p.validate();
    if (K < 1) throw ParameterError("stick_break_py: truncation must be >= 1");
    std::vector<double> v(K);
    for (std::size_t j = 0; j < K; ++j) {
        double a = 1.0 - p.d;
        double b = p.alpha + static_cast<double>(j + 1) * p.d;
        v[j] = sample_beta(a, b, rng);
    }
    return stick_break_from_fractions(v);
}

std::vector<double> crp_predictive_dp(const PartitionSizes& sizes, double alpha) {
    if (!(alpha > 0.0)) throw ParameterError("crp_predictive_dp: alpha must be positive");
    const double denom = sizes.n() + alpha;
    std::vector<double> out;
    out.reserve(sizes.blocks() + 1);
    for (int s : sizes.sizes()) out.push_back(s / denom);
    out.push_back(alpha / denom);
    return out;
}

std::vector<double> crp_predictive_py(const PartitionSizes& sizes, const PYParams& p) {
    p.validate();
    if (sizes.n() == 0) return {1.0};
    const double denom = sizes.n() + p.alpha;
    std::vector<double> out;
    out.reserve(sizes.blocks() + 1);
    for (int s : sizes.sizes()) out.push_back((s - p.d) / denom);
    out.push_back((p.alpha + static_cast<double>(sizes.blocks()) * p.d) / denom);
    return out;
}

double log_rising_factorial(double x, int n) {
    if (n == 0) return 0.0;
    if (x > 0.0) return std::lgamma(x + n) - std::lgamma(x);
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    throw ParameterError("log_rising_factorial: negative base");
}

double log_eppf_dp(const PartitionSizes& sizes, double alpha) {
    if (!(alpha > 0.0)) throw ParameterError("eppf_dp: alpha must be positive");
    if (sizes.n() == 0) return 0.0;
    double lp = static_cast<double>(sizes.blocks()) * std::log(alpha) - log_rising_factorial(alpha, sizes.n());
    for (int s : sizes.sizes()) lp += std::lgamma(static_cast<double>(s));
    return lp;
}

double eppf_dp(const PartitionSizes& sizes, double alpha) { return std::exp(log_eppf_dp(sizes, alpha)); }

double log_eppf_py(const PartitionSizes& sizes, const PYParams& p, EppfVariant variant) {
    p.validate();
    if (sizes.n() == 0) return 0.0;
    const int D = static_cast<int>(sizes.blocks());
    const int n = sizes.n();
    double lp = 0.0;
    if (variant == EppfVariant::literal) {
        if (!(p.alpha > 0.0)) throw ParameterError("literal EPPF requires alpha > 0");
        for (int j = 1; j <= D; ++j) lp += std::log(p.alpha + j * p.d);
        lp -= log_rising_factorial(p.alpha, n);
        for (int s : sizes.sizes()) lp += log_rising_factorial(1.0 - p.d, s);
        return lp;
    }
    for (int j = 1; j <= D - 1; ++j) lp += std::log(p.alpha + j * p.d);
    lp -= log_rising_factorial(p.alpha + 1.0, n - 1);
    for (int s : sizes.sizes()) lp += log_rising_factorial(1.0 - p.d, s - 1);
    return lp;
}

double eppf_py(const PartitionSizes& sizes, const PYParams& p, EppfVariant variant) {
    return std::exp(log_eppf_py(sizes, p, variant));
}

double partition_consistency_check(const EppfFn& eppf, const PartitionSizes& sizes) {
    if (sizes.n() < 1) throw ParameterError("partition_consistency_check: need a partition of n-1 >= 1 items");
    double extended = 0.0;
    for (std::size_t j = 0; j <= sizes.blocks(); ++j) extended += eppf(sizes.with_added(j));
    return std::abs(eppf(sizes) - extended);
}

void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& visit) {
    if (n < 0) throw ParameterError("enumerate_partitions: n must be non-negative");
    if (n > kMaxEnumerableItems)
        throw SizeError("enumerate_partitions: n = " + std::to_string(n) + " exceeds " +
                        std::to_string(kMaxEnumerableItems));
    if (n == 0) {
        visit({});
        return;
    }
    // a[i] <= 1 + max(a[0..i-1]); m[i] holds that running max.
    std::vector<int> a(n, 0), m(n, 0);
    for (;;) {
        visit(a);
        int i = n - 1;
        while (i > 0 && a[i] == m[i - 1] + 1) --i;
        if (i == 0) return;
        ++a[i];
        m[i] = std::max(m[i - 1], a[i]);
        for (int j = i + 1; j < n; ++j) {
            a[j] = 0;
            m[j] = m[i];
        }
    }
}

std::vector<std::vector<int>> enumerate_partitions(int n) {
    std::vector<std::vector<int>> out;
    if (n >= 0 && n <= kMaxEnumerableItems) out.reserve(bell_number(n));
    for_each_partition(n, [&](const std::vector<int>& a) { out.push_back(a); });
    return out;
}

PartitionSizes block_sizes(std::span<const int> rgs) {
    std::vector<int> s;
    for (int b : rgs) {
        if (b < 0) throw ParameterError("block_sizes: negative block id");
        if (static_cast<std::size_t>(b) >= s.size()) s.resize(b + 1, 0);
        ++s[b];
    }
    return PartitionSizes(std::move(s));
}

std::vector<int> canonical_rgs(std::span<const std::size_t> labels) {
    std::unordered_map<std::size_t, int> seen;
    std::vector<int> out;
    out.reserve(labels.size());
    for (std::size_t l : labels) {
        auto [it, inserted] = seen.try_emplace(l, static_cast<int>(seen.size()));
        out.push_back(it->second);
    }
    return out;
}

std::uint64_t bell_number(int n) {
    if (n < 0) throw ParameterError("bell_number: negative n");
    // Bell triangle.
    std::vector<std::uint64_t> row{1};
    for (int i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

}  // namespace bnpt
