#pragma once
// Test-side reference computations. Nothing here calls into the library, so
// they can be used to check it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Every restricted growth string of length n, by recursion.
inline void partitions(int n, std::vector<std::vector<int>>& out, std::vector<int>& cur, int blocks) {
    if (static_cast<int>(cur.size()) == n) {
        out.push_back(cur);
        return;
    }
    for (int b = 0; b <= blocks; ++b) {
        cur.push_back(b);
        partitions(n, out, cur, std::max(blocks, b + 1));
        cur.pop_back();
    }
}

inline std::vector<std::vector<int>> partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    if (n == 0) return {{}};
    partitions(n, out, cur, 0);
    return out;
}

inline std::vector<int> sizes_of(const std::vector<int>& rgs) {
    std::vector<int> s;
    for (int b : rgs) {
        if (b >= static_cast<int>(s.size())) s.resize(b + 1, 0);
        ++s[b];
    }
    return s;
}

// Probability of a labelled sequence under the Pitman-Yor urn (d = 0 gives the CRP),
// multiplying one predictive factor per item.
inline double urn_probability(const std::vector<int>& labels, double alpha, double d) {
    std::map<int, int> sizes;
    double p = 1.0;
    int n = 0;
    for (int l : labels) {
        auto it = sizes.find(l);
        if (it == sizes.end()) {
            p *= n == 0 ? 1.0 : (alpha + d * static_cast<double>(sizes.size())) / (n + alpha);
            sizes[l] = 1;
        } else {
            p *= (it->second - d) / (n + alpha);
            ++it->second;
        }
        ++n;
    }
    return p;
}

inline double log_multigamma(double a, int p) {
    double r = 0.25 * p * (p - 1) * std::log(M_PI);
    for (int j = 0; j < p; ++j) r += std::lgamma(a - 0.5 * j);
    return r;
}

// log of the marginal likelihood of `data` under N(mu, S) with (mu, S) ~ NIW.
inline double log_niw_marginal(const std::vector<Eigen::VectorXd>& data, const Eigen::VectorXd& mu0, double lambda,
                               double nu, const Eigen::MatrixXd& psi) {
    const int p = static_cast<int>(mu0.size());
    const double n = static_cast<double>(data.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (const auto& y : data) mean += y;
    if (n > 0) mean /= n;
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
    for (const auto& y : data) scatter += (y - mean) * (y - mean).transpose();
    const double ln = lambda + n, nn = nu + n;
    Eigen::MatrixXd psin = psi + scatter + (lambda * n / ln) * (mean - mu0) * (mean - mu0).transpose();
    auto logdet = [](const Eigen::MatrixXd& m) { return 2.0 * Eigen::MatrixXd(m.llt().matrixL()).diagonal().array().log().sum(); };
    return -0.5 * n * p * std::log(M_PI) + log_multigamma(0.5 * nn, p) - log_multigamma(0.5 * nu, p) +
           0.5 * nu * logdet(psi) - 0.5 * nn * logdet(psin) + 0.5 * p * (std::log(lambda) - std::log(ln));
}

// Exact posterior over partitions of a frame: prior partition law (on block
// sizes) times the product of per-block marginal likelihoods.
inline std::map<std::vector<int>, double> exact_partition_posterior(
    const std::vector<Eigen::VectorXd>& frame, const std::function<double(const std::vector<int>&)>& log_prior,
    const Eigen::VectorXd& mu0, double lambda, double nu, const Eigen::MatrixXd& psi) {
    std::map<std::vector<int>, double> logp;
    double mx = -INFINITY;
    for (const auto& rgs : partitions(static_cast<int>(frame.size()))) {
        const auto sizes = sizes_of(rgs);
        double lp = log_prior(sizes);
        for (std::size_t b = 0; b < sizes.size(); ++b) {
            std::vector<Eigen::VectorXd> block;
            for (std::size_t i = 0; i < rgs.size(); ++i)
                if (rgs[i] == static_cast<int>(b)) block.push_back(frame[i]);
            lp += log_niw_marginal(block, mu0, lambda, nu, psi);
        }
        logp[rgs] = lp;
        mx = std::max(mx, lp);
    }
    double z = 0.0;
    for (auto& [k, v] : logp) z += std::exp(v - mx);
    for (auto& [k, v] : logp) v = std::exp(v - mx) / z;
    return logp;
}

// OSPA by trying every injection of the smaller set into the larger.
inline double ospa_bruteforce(std::vector<Eigen::Vector2d> X, std::vector<Eigen::Vector2d> Y, double p, double c) {
    if (X.empty() && Y.empty()) return 0.0;
    if (X.size() > Y.size()) std::swap(X, Y);
    const std::size_t m = X.size(), n = Y.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::pow(std::min(c, (X[i] - Y[perm[i]]).norm()), p);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow((best + std::pow(c, p) * static_cast<double>(n - m)) / static_cast<double>(n), 1.0 / p);
}

// Two-sample Kolmogorov-Smirnov test; returns the asymptotic p-value.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double dmax = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        dmax = std::max(dmax, std::abs(i / na - j / nb));
    }
    const double ne = na * nb / (na + nb);
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * dmax;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return std::clamp(q, 0.0, 1.0);
}

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_var(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

// Standard error of the mean of a correlated series by non-overlapping batch means.
inline double batch_means_se(const std::vector<double>& v, std::size_t batches = 50) {
    const std::size_t len = v.size() / batches;
    std::vector<double> bm;
    for (std::size_t b = 0; b < batches; ++b)
        bm.push_back(std::accumulate(v.begin() + b * len, v.begin() + (b + 1) * len, 0.0) / static_cast<double>(len));
    return std::sqrt(sample_var(bm) / static_cast<double>(batches));
}

// Simple 1-D trapezoid rule.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

}  // namespace oracle
