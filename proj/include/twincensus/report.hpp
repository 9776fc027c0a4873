#pragma once

#include "twincensus/census.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace twincensus {

struct LabeledEvent {
    int a = 2;
    SignChangeEvent ev;
};

// Both tracker logs merged, ordered by (x, a): ties at one x list a=2 first.
std::vector<LabeledEvent> merged_events(const CensusState& state);

// Exact column formats; reals as %.17g so writes round-trip bit-for-bit.
std::string census_csv(const std::vector<CheckpointRow>& rows);
std::string census_json(const std::vector<CheckpointRow>& rows);
std::string events_csv(const std::vector<LabeledEvent>& events);

// Strict readers: header and every field validated, errors carry the line
// number. Never return partial data.
std::vector<CheckpointRow> read_census_csv(std::istream& in);
std::vector<LabeledEvent> read_events_csv(std::istream& in);

struct ReportInputs {
    std::vector<CheckpointRow> rows;
    std::vector<std::uint64_t> steps_a2;  // crossing x coordinates per tracker
    std::vector<std::uint64_t> steps_a5;
    bool deterministic = false;  // suppress the generation timestamp
};

// Data domain [t_lo, t_hi] the figure covers; crossing markers and reported
// crossing counts both use it, so they agree by construction.
std::pair<double, double> report_domain(const ReportInputs& inputs);

// Log-log SVG: both nu2 staircases, the sqrt(T)/log T curve, and a marker at
// every staircase/curve crossing. Self-contained, no external references.
std::string report_svg(const ReportInputs& inputs);

// Plain-text alternative drawing the checkpoint-level figure from census.csv.
std::string report_gnuplot(const std::string& census_csv_name);

}  // namespace twincensus
