#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bnptrack/metrics.hpp"
#include "bnptrack/simulator.hpp"
#include "bnptrack/tracks.hpp"

namespace bnpt {

// Fixed "%.10g" formatting so output files compare byte for byte.
std::string format_number(double v);

// Every CSV starts with "# schema=bnptrack.<name>/<version>" then a header row.
inline constexpr int kCsvSchemaVersion = 1;

void write_truth_csv(std::ostream& os, const GroundTruth& truth);
void write_measurements_csv(std::ostream& os, const SimulatedMeasurements& sim);
void write_tracks_csv(std::ostream& os, const TrackSet& tracks);
void write_score_csv(std::ostream& os, const ScoreSeries& s);

struct CsvTable {
    std::string schema;  // e.g. "bnptrack.ospa/1", empty if absent
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int column(const std::string& name) const;  // -1 if missing
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

ScoreSeries score_from_csv(const CsvTable& t);

}  // namespace bnpt
