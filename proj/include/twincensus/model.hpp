#pragma once

#include "twincensus/census.hpp"

#include <cstdint>
#include <vector>

namespace twincensus {

// sqrt(T) / log(T), natural log. Requires T > 1.
double conjecture_value(double T);

struct SeriesPoint {
    std::uint64_t T = 0;
    std::uint64_t nu2 = 0;
};

enum class Weighting { Uniform };

struct FitResult {
    double alpha = 0.0;
    double beta = 0.0;
    double rss = 0.0;  // residual sum of squares in log space
    std::size_t n_points = 0;
    std::size_t n_excluded = 0;  // nu2 = 0 rows, excluded from the log fit
};

// Least squares for log nu2 = log alpha + beta log T. Needs two usable
// points with distinct T after the zero rows are dropped; throws otherwise.
FitResult fit_power_law(const std::vector<SeriesPoint>& points,
                        Weighting weighting = Weighting::Uniform);

// Transversal crossings over (t_min, t_max] between the right-continuous
// step function jumping +1 at each entry of `steps` (0 before the first) and
// the curve sqrt(T)/log T. A jump crosses when the curve value there lies
// strictly between the step values on either side; tangencies do not count.
// `steps` ascending (repeats allowed); requires t_min > 1.
std::vector<double> crossing_points(const std::vector<std::uint64_t>& steps, double t_min,
                                    double t_max);
std::size_t crossing_count(const std::vector<std::uint64_t>& steps, double t_min, double t_max);

struct TableRow {
    std::uint64_t T = 0;
    std::uint64_t nu2_a2 = 0;
    std::uint64_t nu2_a5 = 0;
    std::int64_t conjecture = 0;  // sqrt(T)/log T rounded to nearest integer
};

std::vector<TableRow> report_table(const CensusState& state);

}  // namespace twincensus
