#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bnptrack/errors.hpp"
#include "bnptrack/partition.hpp"
#include "oracles.hpp"

using namespace bnpt;

namespace {

PartitionSizes random_sizes(Rng& rng, int max_blocks, int max_size) {
    const int D = 1 + static_cast<int>(uniform01(rng) * max_blocks);
    std::vector<int> s;
    for (int j = 0; j < D; ++j) s.push_back(1 + static_cast<int>(uniform01(rng) * max_size));
    return PartitionSizes(s);
}

double sum_over_partitions(int n, const EppfFn& f) {
    double s = 0.0;
    for (const auto& rgs : oracle::partitions(n)) s += f(PartitionSizes(oracle::sizes_of(rgs)));
    return s;
}

}  // namespace

TEST_CASE("partition sizes validate and extend") {
    CHECK_THROWS_AS(PartitionSizes({2, 0}), ParameterError);
    PartitionSizes empty;
    CHECK(empty.n() == 0);
    CHECK(empty.blocks() == 0);
    PartitionSizes s({2, 1});
    CHECK(s.n() == 3);
    CHECK(s.with_added(0).sizes() == std::vector<int>{3, 1});
    CHECK(s.with_added(2).sizes() == std::vector<int>{2, 1, 1});
}

TEST_CASE("PY parameters are validated") {
    CHECK_NOTHROW((PYParams{0.0, 1.0}.validate()));
    CHECK_NOTHROW((PYParams{0.5, -0.4}.validate()));
    CHECK_THROWS_AS((PYParams{1.0, 1.0}.validate()), ParameterError);
    CHECK_THROWS_AS((PYParams{-0.1, 1.0}.validate()), ParameterError);
    CHECK_THROWS_AS((PYParams{0.5, -0.5}.validate()), ParameterError);
}

TEST_CASE("stick breaking from fixed fractions") {
    const std::vector<double> v{0.3};
    auto w = stick_break_from_fractions(v);
    REQUIRE(w.weights.size() == 1);
    CHECK(w.weights[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(w.residual == doctest::Approx(0.7).epsilon(1e-15));

    const std::vector<double> one{1.0};
    w = stick_break_from_fractions(one);
    CHECK(w.weights[0] == 1.0);
    CHECK(w.residual == 0.0);
}

TEST_CASE("stick breaking weights and residual sum to one") {
    Rng rng = make_rng(11);
    for (double alpha : {0.1, 1.0, 5.0, 50.0})
        for (std::size_t K : {1u, 5u, 40u, 300u}) {
            auto w = stick_break_dp(alpha, K, rng);
            double s = w.residual;
            for (double x : w.weights) {
                CHECK(x >= 0.0);
                s += x;
            }
            CHECK(std::abs(s - 1.0) <= 1e-12);
            auto p = stick_break_py(PYParams{0.4, alpha}, K, rng);
            s = p.residual;
            for (double x : p.weights) s += x;
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    CHECK_THROWS_AS(stick_break_dp(0.0, 3, rng), ParameterError);
    CHECK_THROWS_AS(stick_break_py(PYParams{1.2, 1.0}, 3, rng), ParameterError);
}

TEST_CASE("first DP stick weight has mean 1/(1+alpha)") {
    Rng rng = make_rng(12);
    double s = 0.0;
    const int R = 100000;
    for (int r = 0; r < R; ++r) s += stick_break_dp(5.0, 200, rng).weights[0];
    CHECK(std::abs(s / R - 1.0 / 6.0) < 0.003);
}

TEST_CASE("PY stick breaking with d = 0 matches DP in distribution") {
    Rng a = make_rng(13, 0), b = make_rng(13, 1);
    std::vector<double> x, y;
    for (int r = 0; r < 100000; ++r) {
        x.push_back(stick_break_dp(2.0, 1, a).weights[0]);
        y.push_back(stick_break_py(PYParams{0.0, 2.0}, 1, b).weights[0]);
    }
    CHECK(oracle::ks_two_sample_p(x, y) > 0.01);
}

TEST_CASE("first PY fraction is Beta(1-d, alpha+d)") {
    Rng rng = make_rng(14);
    double s = 0.0;
    const int R = 100000;
    for (int r = 0; r < R; ++r) s += stick_break_py(PYParams{0.5, 1.0}, 1, rng).weights[0];
    CHECK(std::abs(s / R - 0.25) < 0.005);
}

TEST_CASE("CRP predictive rules") {
    auto p = crp_predictive_dp(PartitionSizes{}, 2.0);
    REQUIRE(p.size() == 1);
    CHECK(p[0] == 1.0);

    p = crp_predictive_dp(PartitionSizes({2, 1}), 1.0);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.25));
    CHECK(p[2] == doctest::Approx(0.25));

    p = crp_predictive_py(PartitionSizes({2, 1}), PYParams{0.5, 1.0});
    CHECK(p[0] == doctest::Approx(0.375));
    CHECK(p[1] == doctest::Approx(0.125));
    CHECK(p[2] == doctest::Approx(0.5));

    Rng rng = make_rng(15);
    for (int t = 0; t < 500; ++t) {
        const PartitionSizes s = random_sizes(rng, 8, 6);
        const double alpha = 0.05 + 5.0 * uniform01(rng);
        const double d = 0.95 * uniform01(rng);
        CHECK(crp_predictive_py(s, PYParams{0.0, alpha}) == crp_predictive_dp(s, alpha));
        for (const auto& v : {crp_predictive_dp(s, alpha), crp_predictive_py(s, PYParams{d, alpha})}) {
            CHECK(v.size() == s.blocks() + 1);
            double sum = 0.0;
            for (double x : v) {
                CHECK(x >= 0.0);
                sum += x;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("DP EPPF values for three items") {
    CHECK(eppf_dp(PartitionSizes({1}), 0.37) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eppf_dp(PartitionSizes{}, 2.0) == 1.0);
    CHECK(eppf_dp(PartitionSizes({3}), 1.0) == doctest::Approx(1.0 / 3));
    CHECK(eppf_dp(PartitionSizes({2, 1}), 1.0) == doctest::Approx(1.0 / 6));
    CHECK(eppf_dp(PartitionSizes({1, 1, 1}), 1.0) == doctest::Approx(1.0 / 6));
    CHECK(std::abs(sum_over_partitions(3, [](const PartitionSizes& s) { return eppf_dp(s, 1.0); }) - 1.0) < 1e-14);
}

TEST_CASE("EPPFs sum to one over all partitions") {
    for (int n = 1; n <= 6; ++n)
        for (double alpha : {0.3, 1.0, 4.0})
            for (double d : {0.0, 0.3, 0.7}) {
                const double dp = sum_over_partitions(n, [&](const PartitionSizes& s) { return eppf_dp(s, alpha); });
                const double py =
                    sum_over_partitions(n, [&](const PartitionSizes& s) { return eppf_py(s, PYParams{d, alpha}); });
                CHECK(std::abs(dp - 1.0) <= 1e-10);
                CHECK(std::abs(py - 1.0) <= 1e-10);
            }
}

TEST_CASE("EPPF equals the urn product along every insertion order") {
    Rng rng = make_rng(16);
    for (int n = 1; n <= 8; ++n) {
        const auto parts = oracle::partitions(n);
        for (int t = 0; t < 40; ++t) {
            auto labels = parts[static_cast<std::size_t>(uniform01(rng) * parts.size())];
            // a random insertion order of the same partition
            for (std::size_t i = labels.size(); i > 1; --i)
                std::swap(labels[i - 1], labels[static_cast<std::size_t>(uniform01(rng) * i)]);
            const PartitionSizes s(oracle::sizes_of(canonical_rgs(std::vector<std::size_t>(labels.begin(), labels.end()))));
            const double alpha = 0.1 + 3.0 * uniform01(rng), d = 0.9 * uniform01(rng);
            CHECK(std::abs(eppf_dp(s, alpha) - oracle::urn_probability(labels, alpha, 0.0)) <= 1e-10);
            CHECK(std::abs(eppf_py(s, PYParams{d, alpha}) - oracle::urn_probability(labels, alpha, d)) <= 1e-10);
        }
    }
}

TEST_CASE("corrected PY EPPF reduces to the DP EPPF at d = 0") {
    for (int n = 1; n <= 8; ++n)
        for (const auto& rgs : oracle::partitions(n)) {
            const PartitionSizes s(oracle::sizes_of(rgs));
            for (double alpha : {0.2, 1.0, 3.5}) {
                CHECK(std::abs(log_eppf_py(s, PYParams{0.0, alpha}) - log_eppf_dp(s, alpha)) <= 1e-12);
            }
        }
    CHECK(eppf_py(PartitionSizes({1}), PYParams{0.4, 2.0}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("EPPF is invariant to the order of block sizes") {
    Rng rng = make_rng(17);
    for (int t = 0; t < 300; ++t) {
        PartitionSizes s = random_sizes(rng, 6, 5);
        auto v = s.sizes();
        std::reverse(v.begin(), v.end());
        std::rotate(v.begin(), v.begin() + v.size() / 2, v.end());
        const PartitionSizes r(v);
        CHECK(log_eppf_dp(s, 1.3) == doctest::Approx(log_eppf_dp(r, 1.3)).epsilon(1e-14));
        CHECK(log_eppf_py(s, PYParams{0.3, 0.7}) == doctest::Approx(log_eppf_py(r, PYParams{0.3, 0.7})).epsilon(1e-14));
        CHECK(log_eppf_py(s, PYParams{0.3, 0.7}, EppfVariant::literal) ==
              doctest::Approx(log_eppf_py(r, PYParams{0.3, 0.7}, EppfVariant::literal)).epsilon(1e-14));
    }
}

TEST_CASE("EPPF stays finite for large n") {
    const PartitionSizes s({400, 300, 250, 50});
    CHECK(std::isfinite(log_eppf_dp(s, 2.0)));
    CHECK(std::isfinite(log_eppf_py(s, PYParams{0.5, 2.0})));
    CHECK(eppf_dp(s, 2.0) >= 0.0);
}

TEST_CASE("partition consistency residuals") {
    const EppfFn dp = [](const PartitionSizes& s) { return eppf_dp(s, 1.0); };
    CHECK(partition_consistency_check(dp, PartitionSizes({2})) <= 1e-12);

    const EppfFn py = [](const PartitionSizes& s) { return eppf_py(s, PYParams{0.3, 0.7}); };
    const EppfFn dp2 = [](const PartitionSizes& s) { return eppf_dp(s, 2.5); };
    for (int n = 1; n <= 5; ++n)
        for (const auto& rgs : oracle::partitions(n)) {
            const PartitionSizes s(oracle::sizes_of(rgs));
            CHECK(partition_consistency_check(py, s) <= 1e-10);
            CHECK(partition_consistency_check(dp2, s) <= 1e-10);
        }

    // The literal formula is not a probability: already n = 1 gives (alpha + d)(1 - d)/alpha.
    const PYParams p{0.5, 1.0};
    const EppfFn literal = [&](const PartitionSizes& s) { return eppf_py(s, p, EppfVariant::literal); };
    CHECK(eppf_py(PartitionSizes({1}), p, EppfVariant::literal) == doctest::Approx(0.75));
    const double residual = partition_consistency_check(literal, PartitionSizes({1}));
    MESSAGE("literal PY EPPF consistency residual at sizes [1]: " << residual);
    CHECK(residual > 1e-3);
    CHECK_THROWS_AS(eppf_py(PartitionSizes({1}), PYParams{0.5, -0.2}, EppfVariant::literal), ParameterError);
}

TEST_CASE("partition enumeration") {
    CHECK(enumerate_partitions(1).size() == 1);
    CHECK(enumerate_partitions(3).size() == 5);
    CHECK(enumerate_partitions(6).size() == 203);
    CHECK_THROWS_AS(enumerate_partitions(13), SizeError);
    for (int n = 1; n <= 9; ++n) {
        const auto lib = enumerate_partitions(n);
        CHECK(lib == oracle::partitions(n));
        CHECK(lib.size() == bell_number(n));
        CHECK(std::is_sorted(lib.begin(), lib.end()));
    }
    std::size_t count = 0;
    for_each_partition(10, [&](const std::vector<int>&) { ++count; });
    CHECK(count == 115975);
    CHECK(bell_number(12) == 4213597);
}

TEST_CASE("canonical relabelling") {
    const std::vector<std::size_t> labels{7, 3, 7, 9, 3};
    CHECK(canonical_rgs(labels) == std::vector<int>{0, 1, 0, 2, 1});
    const std::vector<int> rgs{0, 1, 0, 2, 1};
    CHECK(block_sizes(rgs).sizes() == std::vector<int>{2, 2, 1});
}

TEST_CASE("DP cluster count grows like alpha log m") {
    Rng rng = make_rng(18);
    const int m = 10000, R = 200;
    double total = 0.0;
    for (int r = 0; r < R; ++r) {
        std::vector<int> sizes;
        for (int i = 0; i < m; ++i) {
            const auto p = crp_predictive_dp(PartitionSizes(sizes), 1.0);
            const std::size_t k = sample_categorical(p, rng);
            if (k == sizes.size()) sizes.push_back(1);
            else ++sizes[k];
        }
        total += static_cast<double>(sizes.size());
    }
    const double expected = std::log(static_cast<double>(m));
    CHECK(std::abs(total / R - expected) / expected < 0.10);
}

TEST_CASE("PY cluster count grows like m^d") {
    Rng rng = make_rng(19);
    const PYParams p{0.5, 1.0};
    const std::vector<int> checkpoints{100, 200, 500, 1000, 2000, 5000, 10000};
    std::vector<double> mean(checkpoints.size(), 0.0);
    const int R = 100;
    for (int r = 0; r < R; ++r) {
        std::vector<int> sizes;
        std::size_t c = 0;
        for (int i = 1; i <= checkpoints.back(); ++i) {
            const auto pr = crp_predictive_py(PartitionSizes(sizes), p);
            const std::size_t k = sample_categorical(pr, rng);
            if (k == sizes.size()) sizes.push_back(1);
            else ++sizes[k];
            if (i == checkpoints[c]) mean[c++] += static_cast<double>(sizes.size()) / R;
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(checkpoints.size());
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        const double x = std::log(checkpoints[i]), y = std::log(mean[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    MESSAGE("PY log-log growth slope " << slope);
    CHECK(std::abs(slope - 0.5) <= 0.05);
}
