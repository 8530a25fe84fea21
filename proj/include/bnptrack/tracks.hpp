#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bnptrack/gibbs.hpp"

namespace bnpt {

struct TrackEstimate {
    std::uint64_t track_id = 0;
    TargetState state;  // posterior mean over samples carrying this track
};

struct TrackPoint {
    std::size_t step = 0;
    TargetState state;
};

struct TrackSet {
    std::vector<std::size_t> cardinality;                    // modal cluster count per step
    std::vector<std::vector<TrackEstimate>> estimates;       // per step, sorted by track id
    std::map<std::uint64_t, std::vector<TrackPoint>> trajectories;
};

// Per step: take the modal cardinality (ties go to the smaller count), then
// report the most frequently present track ids among samples with that
// cardinality, each at the mean of its cluster states.
TrackSet extract_tracks(const std::vector<std::vector<PosteriorSample>>& samples);

}  // namespace bnpt
