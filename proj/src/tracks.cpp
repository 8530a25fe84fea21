#include "bnptrack/tracks.hpp"

#include <algorithm>
#include <string>

#include "bnptrack/errors.hpp"

namespace bnpt {

namespace {

struct Accum {
    std::size_t count = 0;
    double x = 0, y = 0, vx = 0, vy = 0;
};

}  // namespace

TrackSet extract_tracks(const std::vector<std::vector<PosteriorSample>>& samples) {
    TrackSet out;
    out.cardinality.reserve(samples.size());
    out.estimates.reserve(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& step = samples[k];
        if (step.empty()) throw PreconditionError("extract_tracks: step " + std::to_string(k) + " has no samples");
        std::map<std::size_t, std::size_t> freq;
        for (const auto& s : step) ++freq[s.cardinality];
        std::size_t mode = 0, best = 0;
        for (const auto& [card, n] : freq)
            if (n > best) best = n, mode = card;
        out.cardinality.push_back(mode);

        std::map<std::uint64_t, Accum> acc;
        for (const auto& s : step) {
            if (s.cardinality != mode) continue;
            for (std::size_t j = 0; j < s.track_ids.size(); ++j) {
                Accum& a = acc[s.track_ids[j]];
                ++a.count;
                a.x += s.states[j].x;
                a.y += s.states[j].y;
                a.vx += s.states[j].vx;
                a.vy += s.states[j].vy;
            }
        }
        std::vector<std::pair<std::uint64_t, const Accum*>> ranked;
        for (const auto& [id, a] : acc) ranked.emplace_back(id, &a);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& l, const auto& r) { return l.second->count > r.second->count; });
        if (ranked.size() > mode) ranked.resize(mode);
        std::sort(ranked.begin(), ranked.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

        std::vector<TrackEstimate> est;
        for (const auto& [id, a] : ranked) {
            const double n = static_cast<double>(a->count);
            TrackEstimate e;
            e.track_id = id;
            e.state = TargetState{a->x / n, a->y / n, a->vx / n, a->vy / n, std::nullopt};
            est.push_back(e);
            out.trajectories[id].push_back(TrackPoint{k, e.state});
        }
        out.estimates.push_back(std::move(est));
    }
    return out;
}

}  // namespace bnpt
