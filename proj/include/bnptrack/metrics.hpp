#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bnptrack/simulator.hpp"
#include "bnptrack/tracks.hpp"

namespace bnpt {

using Point = Eigen::Vector2d;

struct OSPAConfig {
    double p = 1.0;
    double c = 100.0;
    void validate() const;
    friend bool operator==(const OSPAConfig&, const OSPAConfig&) = default;
};

struct OspaResult {
    double total = 0.0;
    double location = 0.0;
    double cardinality = 0.0;
};

// Minimum-cost assignment of every row to a distinct column (rows <= cols).
// Returns the column of each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

OspaResult ospa(std::span<const Point> X, std::span<const Point> Y, const OSPAConfig& cfg);

struct ScoreSeries {
    std::vector<double> ospa_total, ospa_loc, ospa_card;
    std::vector<double> card_true, card_est;
    std::vector<double> ospa_total_se, card_est_se;  // Monte-Carlo standard errors
    std::size_t runs = 1;
    std::size_t steps() const { return ospa_total.size(); }
};

ScoreSeries score_sets(const std::vector<std::vector<Point>>& truth, const std::vector<std::vector<Point>>& estimate,
                       const OSPAConfig& cfg);
ScoreSeries score_run(const GroundTruth& truth, const TrackSet& tracks, const OSPAConfig& cfg);

// Pointwise mean and standard error across runs.
ScoreSeries aggregate_mc(const std::vector<ScoreSeries>& runs);

std::vector<std::vector<Point>> truth_positions(const GroundTruth& truth);
std::vector<std::vector<Point>> track_positions(const TrackSet& tracks);

// Fraction of consecutive-step pairs in which a true object, matched to a
// track within `gate` at both steps, changes track id.
double label_swap_rate(const GroundTruth& truth, const TrackSet& tracks, double gate);

}  // namespace bnpt
