#include "bnptrack/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bnptrack/errors.hpp"

namespace bnpt {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

void schema_line(std::ostream& os, const char* name) {
    os << "# schema=bnptrack." << name << "/" << kCsvSchemaVersion << "\n";
}

}  // namespace

void write_truth_csv(std::ostream& os, const GroundTruth& truth) {
    schema_line(os, "truth");
    os << "step,object_id,x,y,vx,vy,omega\n";
    for (std::size_t k = 0; k < truth.steps.size(); ++k)
        for (const auto& e : truth.steps[k])
            os << k << "," << e.object_id << "," << format_number(e.state.x) << "," << format_number(e.state.y) << ","
               << format_number(e.state.vx) << "," << format_number(e.state.vy) << ","
               << (e.state.omega ? format_number(*e.state.omega) : "") << "\n";
}

void write_measurements_csv(std::ostream& os, const SimulatedMeasurements& sim) {
    schema_line(os, "measurements");
    os << "step,index,source,sensor,m1,m2,x,y\n";
    for (std::size_t k = 0; k < sim.frames.size(); ++k) {
        const auto& f = sim.frames[k];
        for (std::size_t i = 0; i < f.measurements.size(); ++i) {
            const auto& z = f.measurements[i];
            const Eigen::Vector2d p = measurement_position(z, f.sensor);
            os << f.step << "," << i << "," << sim.sources[k][i] << ","
               << (f.sensor == SensorKind::position ? "position" : "range_bearing") << ","
               << format_number(z.value[0]) << "," << format_number(z.value[1]) << "," << format_number(p[0]) << ","
               << format_number(p[1]) << "\n";
        }
    }
}

void write_tracks_csv(std::ostream& os, const TrackSet& tracks) {
    schema_line(os, "tracks");
    os << "step,track_id,x,y,vx,vy,cardinality\n";
    for (std::size_t k = 0; k < tracks.estimates.size(); ++k)
        for (const auto& e : tracks.estimates[k])
            os << k << "," << e.track_id << "," << format_number(e.state.x) << "," << format_number(e.state.y) << ","
               << format_number(e.state.vx) << "," << format_number(e.state.vy) << "," << tracks.cardinality[k]
               << "\n";
}

void write_score_csv(std::ostream& os, const ScoreSeries& s) {
    schema_line(os, "ospa");
    os << "step,ospa_total,ospa_loc,ospa_card,card_true,card_est_mean,stderr\n";
    for (std::size_t k = 0; k < s.steps(); ++k)
        os << k << "," << format_number(s.ospa_total[k]) << "," << format_number(s.ospa_loc[k]) << ","
           << format_number(s.ospa_card[k]) << "," << format_number(s.card_true[k]) << ","
           << format_number(s.card_est[k]) << "," << format_number(s.ospa_total_se[k]) << "\n";
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("schema=");
            if (pos != std::string::npos && t.schema.empty()) t.schema = line.substr(pos + 7);
            continue;
        }
        if (t.header.empty())
            t.header = split(line);
        else
            t.rows.push_back(split(line));
    }
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in);
}

ScoreSeries score_from_csv(const CsvTable& t) {
    const char* cols[] = {"ospa_total", "ospa_loc", "ospa_card", "card_true", "card_est_mean", "stderr"};
    int idx[6];
    for (int i = 0; i < 6; ++i) {
        idx[i] = t.column(cols[i]);
        if (idx[i] < 0) throw std::runtime_error(std::string("score csv lacks column ") + cols[i]);
    }
    ScoreSeries s;
    for (const auto& r : t.rows) {
        auto get = [&](int i) { return std::stod(r.at(idx[i])); };
        s.ospa_total.push_back(get(0));
        s.ospa_loc.push_back(get(1));
        s.ospa_card.push_back(get(2));
        s.card_true.push_back(get(3));
        s.card_est.push_back(get(4));
        s.ospa_total_se.push_back(get(5));
        s.card_est_se.push_back(0.0);
    }
    return s;
}

}  // namespace bnpt
