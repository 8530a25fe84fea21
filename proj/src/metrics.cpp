#include "bnptrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

void OSPAConfig::validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("OSPA order p must be >= 1");
    if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("OSPA cutoff c must be positive");
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n > m) throw DimensionError("hungarian: more rows than columns");
    if (n == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();
    // Potentials method, 1-based with a virtual column 0.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

OspaResult ospa(std::span<const Point> X, std::span<const Point> Y, const OSPAConfig& cfg) {
    cfg.validate();
    if (X.size() > Y.size()) std::swap(X, Y);
    const std::size_t m = X.size(), n = Y.size();
    OspaResult r;
    if (n == 0) return r;
    Eigen::MatrixXd cost(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost(i, j) = std::pow(std::min(cfg.c, (X[i] - Y[j]).norm()), cfg.p);
    double loc = 0.0;
    if (m > 0) {
        const auto a = hungarian(cost);
        // summed in sorted order so ospa(X, Y) == ospa(Y, X) bit for bit
        std::vector<double> matched(m);
        for (std::size_t i = 0; i < m; ++i) matched[i] = cost(i, a[i]);
        std::sort(matched.begin(), matched.end());
        for (double v : matched) loc += v;
    }
    const double card = std::pow(cfg.c, cfg.p) * static_cast<double>(n - m);
    const double nn = static_cast<double>(n);
    r.total = std::pow((loc + card) / nn, 1.0 / cfg.p);
    r.location = std::pow(loc / nn, 1.0 / cfg.p);
    r.cardinality = std::pow(card / nn, 1.0 / cfg.p);
    return r;
}

ScoreSeries score_sets(const std::vector<std::vector<Point>>& truth, const std::vector<std::vector<Point>>& estimate,
                       const OSPAConfig& cfg) {
    if (truth.size() != estimate.size()) throw DimensionError("score: truth and estimate cover different step counts");
    ScoreSeries s;
    const std::size_t K = truth.size();
    s.ospa_total.resize(K);
    s.ospa_loc.resize(K);
    s.ospa_card.resize(K);
    s.card_true.resize(K);
    s.card_est.resize(K);
    s.ospa_total_se.assign(K, 0.0);
    s.card_est_se.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        OspaResult o = ospa(truth[k], estimate[k], cfg);
        s.ospa_total[k] = o.total;
        s.ospa_loc[k] = o.location;
        s.ospa_card[k] = o.cardinality;
        s.card_true[k] = static_cast<double>(truth[k].size());
        s.card_est[k] = static_cast<double>(estimate[k].size());
    }
    return s;
}

std::vector<std::vector<Point>> truth_positions(const GroundTruth& truth) {
    std::vector<std::vector<Point>> out(truth.steps.size());
    for (std::size_t k = 0; k < truth.steps.size(); ++k)
        for (const auto& e : truth.steps[k]) out[k].emplace_back(e.state.x, e.state.y);
    return out;
}

std::vector<std::vector<Point>> track_positions(const TrackSet& tracks) {
    std::vector<std::vector<Point>> out(tracks.estimates.size());
    for (std::size_t k = 0; k < tracks.estimates.size(); ++k)
        for (const auto& e : tracks.estimates[k]) out[k].emplace_back(e.state.x, e.state.y);
    return out;
}

ScoreSeries score_run(const GroundTruth& truth, const TrackSet& tracks, const OSPAConfig& cfg) {
    return score_sets(truth_positions(truth), track_positions(tracks), cfg);
}

namespace {

void mean_se(const std::vector<ScoreSeries>& runs, std::vector<double> ScoreSeries::*field, std::vector<double>& mean,
             std::vector<double>* se) {
    const std::size_t K = runs.front().steps();
    const double R = static_cast<double>(runs.size());
    mean.assign(K, 0.0);
    if (se) se->assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double s = 0.0;
        for (const auto& r : runs) s += (r.*field)[k];
        const double mu = s / R;
        mean[k] = mu;
        if (se && runs.size() > 1) {
            double ss = 0.0;
            for (const auto& r : runs) ss += ((r.*field)[k] - mu) * ((r.*field)[k] - mu);
            (*se)[k] = std::sqrt(ss / (R - 1.0)) / std::sqrt(R);
        }
    }
}

}  // namespace

ScoreSeries aggregate_mc(const std::vector<ScoreSeries>& runs) {
    if (runs.empty()) throw ParameterError("aggregate_mc: no runs");
    const std::size_t K = runs.front().steps();
    for (const auto& r : runs)
        if (r.steps() != K || r.card_est.size() != K || r.card_true.size() != K || r.ospa_loc.size() != K ||
            r.ospa_card.size() != K)
            throw DimensionError("aggregate_mc: runs have different lengths");
    ScoreSeries out;
    out.runs = runs.size();
    mean_se(runs, &ScoreSeries::ospa_total, out.ospa_total, &out.ospa_total_se);
    mean_se(runs, &ScoreSeries::ospa_loc, out.ospa_loc, nullptr);
    mean_se(runs, &ScoreSeries::ospa_card, out.ospa_card, nullptr);
    mean_se(runs, &ScoreSeries::card_true, out.card_true, nullptr);
    mean_se(runs, &ScoreSeries::card_est, out.card_est, &out.card_est_se);
    return out;
}

double label_swap_rate(const GroundTruth& truth, const TrackSet& tracks, double gate) {
    const std::size_t K = std::min(truth.steps.size(), tracks.estimates.size());
    std::map<int, std::uint64_t> last_label;
    std::map<int, std::size_t> last_step;
    std::size_t pairs = 0, swaps = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& tr = truth.steps[k];
        const auto& es = tracks.estimates[k];
        if (tr.empty() || es.empty()) continue;
        const bool rows_truth = tr.size() <= es.size();
        const std::size_t r = rows_truth ? tr.size() : es.size();
        const std::size_t c = rows_truth ? es.size() : tr.size();
        Eigen::MatrixXd cost(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                const auto& t = tr[rows_truth ? i : j].state;
                const auto& e = es[rows_truth ? j : i].state;
                cost(i, j) = std::hypot(t.x - e.x, t.y - e.y);
            }
        const auto a = hungarian(cost);
        for (std::size_t i = 0; i < r; ++i) {
            if (cost(i, a[i]) > gate) continue;
            const int obj = tr[rows_truth ? i : a[i]].object_id;
            const std::uint64_t label = es[rows_truth ? a[i] : i].track_id;
            auto it = last_label.find(obj);
            if (it != last_label.end() && last_step[obj] + 1 == k) {
                ++pairs;
                if (it->second != label) ++swaps;
            }
            last_label[obj] = label;
            last_step[obj] = k;
        }
    }
    return pairs == 0 ? 0.0 : static_cast<double>(swaps) / static_cast<double>(pairs);
}

}  // namespace bnpt
