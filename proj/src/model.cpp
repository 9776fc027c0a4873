#include "twincensus/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twincensus {

double conjecture_value(double T) {
    if (!(T > 1.0)) throw std::invalid_argument("conjecture_value: requires T > 1");
    return std::sqrt(T) / std::log(T);
}

FitResult fit_power_law(const std::vector<SeriesPoint>& points, Weighting) {
    std::vector<double> xs, ys;
    std::size_t excluded = 0;
    for (const SeriesPoint& p : points) {
        if (p.T < 2) throw std::invalid_argument("fit_power_law: T must be >= 2");
        if (p.nu2 == 0) {
            ++excluded;
            continue;
        }
        xs.push_back(std::log(static_cast<double>(p.T)));
        ys.push_back(std::log(static_cast<double>(p.nu2)));
    }
    if (xs.size() < 2)
        throw std::invalid_argument("fit_power_law: needs at least two points with nu2 >= 1");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_power_law: all T identical; the slope is undefined");

    FitResult fit;
    fit.beta = sxy / sxx;
    fit.alpha = std::exp(my - fit.beta * mx);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - my - fit.beta * (xs[i] - mx);
        fit.rss += r * r;
    }
    fit.n_points = xs.size();
    fit.n_excluded = excluded;
    return fit;
}

std::vector<double> crossing_points(const std::vector<std::uint64_t>& steps, double t_min,
                                    double t_max) {
    if (!(t_min > 1.0) || !(t_max >= t_min))
        throw std::invalid_argument("crossing_points: requires 1 < t_min <= t_max");
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i] < steps[i - 1])
            throw std::invalid_argument("crossing_points: steps must be ascending");

    auto bisect = [](double a, double b, double level) {
        double fa = conjecture_value(a) - level;
        for (int it = 0; it < 200 && b - a > 1e-9 * std::max(1.0, a); ++it) {
            double m = 0.5 * (a + b);
            double fm = conjecture_value(m) - level;
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };

    std::vector<double> out;
    std::size_t i = 0;
    while (i < steps.size() && static_cast<double>(steps[i]) <= t_min) ++i;
    double v = static_cast<double>(i);  // staircase value at t_min
    double prev_t = t_min;
    for (;;) {
        bool has_jump = i < steps.size() && static_cast<double>(steps[i]) <= t_max;
        double seg_end = has_jump ? static_cast<double>(steps[i]) : t_max;
        if (seg_end > prev_t) {
            double fa = conjecture_value(prev_t) - v;
            double fb = conjecture_value(seg_end) - v;
            if (fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0))
                out.push_back(bisect(prev_t, seg_end, v));
        }
        if (!has_jump) break;
        double x = seg_end;
        double v_new = v;
        while (i < steps.size() && static_cast<double>(steps[i]) == x) {
            v_new += 1.0;
            ++i;
        }
        double fx = conjecture_value(x);
        if (fx > std::min(v, v_new) && fx < std::max(v, v_new)) out.push_back(x);
        v = v_new;
        prev_t = x;
    }
    return out;
}

std::size_t crossing_count(const std::vector<std::uint64_t>& steps, double t_min, double t_max) {
    return crossing_points(steps, t_min, t_max).size();
}

std::vector<TableRow> report_table(const CensusState& state) {
    std::vector<TableRow> rows;
    rows.reserve(state.checkpoints.size());
    for (const CheckpointRow& c : state.checkpoints)
        rows.push_back(TableRow{c.T, c.nu2_a2, c.nu2_a5, std::llround(c.conjecture)});
    return rows;
}

}  // namespace twincensus
