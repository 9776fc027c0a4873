#include "twincensus/report.hpp"

#include "twincensus/model.hpp"
#include "twincensus/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace twincensus {

std::vector<LabeledEvent> merged_events(const CensusState& state) {
    const auto& a2 = state.tracker_a2.log;
    const auto& a5 = state.tracker_a5.log;
    std::vector<LabeledEvent> out;
    out.reserve(a2.size() + a5.size());
    std::size_t i = 0, j = 0;
    while (i < a2.size() || j < a5.size()) {
        bool take_a2 = j >= a5.size() || (i < a2.size() && a2[i].x <= a5[j].x);
        if (take_a2)
            out.push_back(LabeledEvent{2, a2[i++]});
        else
            out.push_back(LabeledEvent{5, a5[j++]});
    }
    return out;
}

namespace {

const char kCensusHeader[] = "T,nu2_a2,nu2_a5,pi2,li2,conjecture";
const char kEventsHeader[] = "a,pair_p,x,direction,d2_before,d2_after,phase";

const char* direction_name(Direction d) {
    return d == Direction::ToPositive ? "to_positive" : "to_negative";
}
const char* phase_name(Phase p) { return p == Phase::PreIncrement ? "pre" : "post"; }

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::uint64_t field_u64(const std::string& s, std::size_t line_no, const char* what) {
    try {
        return parse_count(s);
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad " + what +
                                    " '" + s + "'");
    }
}

double field_double(const std::string& s, std::size_t line_no, const char* what) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad " + what +
                                    " '" + s + "'");
    return v;
}

}  // namespace

std::string census_csv(const std::vector<CheckpointRow>& rows) {
    std::string out = std::string(kCensusHeader) + "\n";
    for (const CheckpointRow& r : rows) {
        out += std::to_string(r.T) + ',' + std::to_string(r.nu2_a2) + ',' +
               std::to_string(r.nu2_a5) + ',' + std::to_string(r.pi2) + ',' +
               format_real(r.li2) + ',' + format_real(r.conjecture) + '\n';
    }
    return out;
}

std::string census_json(const std::vector<CheckpointRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const CheckpointRow& r : rows) {
        arr.push_back({{"T", r.T},
                       {"nu2_a2", r.nu2_a2},
                       {"nu2_a5", r.nu2_a5},
                       {"pi2", r.pi2},
                       {"li2", r.li2},
                       {"conjecture", r.conjecture}});
    }
    return arr.dump(2) + "\n";
}

std::string events_csv(const std::vector<LabeledEvent>& events) {
    std::string out = std::string(kEventsHeader) + "\n";
    for (const LabeledEvent& le : events) {
        out += std::to_string(le.a) + ',' + std::to_string(le.ev.pair_p) + ',' +
               std::to_string(le.ev.x) + ',' + direction_name(le.ev.direction) + ',' +
               format_real(le.ev.d2_before) + ',' + format_real(le.ev.d2_after) + ',' +
               phase_name(le.ev.phase) + '\n';
    }
    return out;
}

std::vector<CheckpointRow> read_census_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCensusHeader)
        throw std::runtime_error(std::string("census CSV line 1: expected header '") +
                                 kCensusHeader + "'");
    std::vector<CheckpointRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 6)
            throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                     ": expected 6 fields, got " + std::to_string(f.size()));
        CheckpointRow r;
        r.T = field_u64(f[0], line_no, "T");
        r.nu2_a2 = field_u64(f[1], line_no, "nu2_a2");
        r.nu2_a5 = field_u64(f[2], line_no, "nu2_a5");
        r.pi2 = field_u64(f[3], line_no, "pi2");
        r.li2 = field_double(f[4], line_no, "li2");
        r.conjecture = field_double(f[5], line_no, "conjecture");
        rows.push_back(r);
    }
    return rows;
}

std::vector<LabeledEvent> read_events_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kEventsHeader)
        throw std::runtime_error(std::string("events CSV line 1: expected header '") +
                                 kEventsHeader + "'");
    std::vector<LabeledEvent> events;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 7)
            throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                     ": expected 7 fields, got " + std::to_string(f.size()));
        LabeledEvent le;
        std::uint64_t a = field_u64(f[0], line_no, "a");
        if (a != 2 && a != 5)
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": a must be 2 or 5");
        le.a = static_cast<int>(a);
        le.ev.pair_p = field_u64(f[1], line_no, "pair_p");
        le.ev.x = field_u64(f[2], line_no, "x");
        if (f[3] == "to_positive")
            le.ev.direction = Direction::ToPositive;
        else if (f[3] == "to_negative")
            le.ev.direction = Direction::ToNegative;
        else
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad direction '" +
                                     f[3] + "'");
        le.ev.d2_before = field_double(f[4], line_no, "d2_before");
        le.ev.d2_after = field_double(f[5], line_no, "d2_after");
        if (f[6] == "pre")
            le.ev.phase = Phase::PreIncrement;
        else if (f[6] == "post")
            le.ev.phase = Phase::PostIncrement;
        else
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad phase '" +
                                     f[6] + "'");
        events.push_back(le);
    }
    return events;
}

namespace {

struct LogMap {
    double x0, x1, y0, y1;       // data domain, log scaled
    double left = 72, top = 48;  // plot box in pixels
    double width = 864, height = 496;

    double px(double t) const {
        return left + (std::log(t) - std::log(x0)) / (std::log(x1) - std::log(x0)) * width;
    }
    double py(double v) const {
        double c = std::log(std::max(v, y0));
        return top + height - (c - std::log(y0)) / (std::log(y1) - std::log(y0)) * height;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void append_staircase(std::string& svg, const LogMap& m, const std::vector<std::uint64_t>& steps,
                      const char* color, const char* label) {
    if (steps.empty()) return;
    std::size_t i = 0;
    while (i < steps.size() && static_cast<double>(steps[i]) <= m.x0) ++i;
    double v = static_cast<double>(i);
    std::string d = "M" + num(m.px(m.x0)) + " " + num(m.py(v));
    while (i < steps.size() && static_cast<double>(steps[i]) <= m.x1) {
        double x = static_cast<double>(steps[i]);
        while (i < steps.size() && static_cast<double>(steps[i]) == x) {
            v += 1.0;
            ++i;
        }
        d += " H" + num(m.px(x)) + " V" + num(m.py(v));
    }
    d += " H" + num(m.px(m.x1));
    svg += "  <path class=\"stair-" + std::string(label) + "\" d=\"" + d + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"1.8\"/>\n";
}

void append_markers(std::string& svg, const LogMap& m, const std::vector<std::uint64_t>& steps,
                    const char* color) {
    if (steps.empty()) return;
    for (double c : crossing_points(steps, m.x0, m.x1)) {
        double y = conjecture_value(c);
        svg += "  <circle class=\"crossing\" cx=\"" + num(m.px(c)) + "\" cy=\"" + num(m.py(y)) +
               "\" r=\"4\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.6\"/>\n";
    }
}

}  // namespace

std::pair<double, double> report_domain(const ReportInputs& inputs) {
    if (inputs.rows.empty()) throw std::invalid_argument("report: no checkpoint rows");
    double lo = static_cast<double>(inputs.rows.front().T);
    if (!inputs.steps_a2.empty()) lo = std::min(lo, static_cast<double>(inputs.steps_a2.front()));
    if (!inputs.steps_a5.empty()) lo = std::min(lo, static_cast<double>(inputs.steps_a5.front()));
    double hi = static_cast<double>(inputs.rows.back().T);
    lo = std::max(2.0, 0.8 * lo);
    if (lo >= hi) lo = hi / 2.0;
    return {lo, hi};
}

std::string report_svg(const ReportInputs& inputs) {
    LogMap m{};
    auto [lo, hi] = report_domain(inputs);
    m.x0 = lo;
    m.x1 = hi;
    double vmax = conjecture_value(m.x1);
    vmax = std::max(vmax, static_cast<double>(inputs.steps_a2.size()));
    vmax = std::max(vmax, static_cast<double>(inputs.steps_a5.size()));
    m.y0 = 0.5;
    m.y1 = vmax * 1.6;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"600\" "
           "viewBox=\"0 0 960 600\">\n";
    if (!inputs.deterministic) {
        std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        svg += std::string("  <!-- generated ") + stamp + " -->\n";
    }
    svg += "  <rect width=\"960\" height=\"600\" fill=\"white\"/>\n";
    svg += "  <text x=\"480\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"17\">Sign-change counts of the twin census deficit vs sqrt(T)/log T</text>\n";

    // frame and log-scale ticks
    svg += "  <rect x=\"" + num(m.left) + "\" y=\"" + num(m.top) + "\" width=\"" + num(m.width) +
           "\" height=\"" + num(m.height) + "\" fill=\"none\" stroke=\"#999\"/>\n";
    int k0 = static_cast<int>(std::ceil(std::log2(m.x0)));
    int k1 = static_cast<int>(std::floor(std::log2(m.x1)));
    for (int k = k0; k <= k1; ++k) {
        if (k % 4 != 0) continue;
        double t = std::ldexp(1.0, k);
        double x = m.px(t);
        svg += "  <line x1=\"" + num(x) + "\" y1=\"" + num(m.top + m.height) + "\" x2=\"" + num(x) +
               "\" y2=\"" + num(m.top + m.height + 6) + "\" stroke=\"#999\"/>\n";
        svg += "  <text x=\"" + num(x) + "\" y=\"" + num(m.top + m.height + 22) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">2^" +
               std::to_string(k) + "</text>\n";
    }
    for (double v = 1.0; v <= m.y1; v *= 10.0) {
        double y = m.py(v);
        svg += "  <line x1=\"" + num(m.left - 6) + "\" y1=\"" + num(y) + "\" x2=\"" + num(m.left) +
               "\" y2=\"" + num(y) + "\" stroke=\"#999\"/>\n";
        char lab[32];
        std::snprintf(lab, sizeof lab, "%g", v);
        svg += "  <text x=\"" + num(m.left - 10) + "\" y=\"" + num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" + lab +
               "</text>\n";
    }
    svg += "  <text x=\"" + num(m.left + m.width / 2) + "\" y=\"" + num(m.top + m.height + 44) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">T</text>\n";
    svg += "  <text x=\"20\" y=\"" + num(m.top + m.height / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 " + num(m.top + m.height / 2) + ")\">count</text>\n";

    // conjecture curve
    const int samples = 220;
    std::string d;
    for (int s = 0; s <= samples; ++s) {
        double t = std::exp(std::log(m.x0) +
                            (std::log(m.x1) - std::log(m.x0)) * static_cast<double>(s) / samples);
        d += (s == 0 ? "M" : " L") + num(m.px(t)) + " " + num(m.py(conjecture_value(t)));
    }
    svg += "  <path class=\"curve\" d=\"" + d +
           "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";

    append_staircase(svg, m, inputs.steps_a2, "#2166ac", "a2");
    append_staircase(svg, m, inputs.steps_a5, "#d95f02", "a5");
    append_markers(svg, m, inputs.steps_a2, "#2166ac");
    append_markers(svg, m, inputs.steps_a5, "#d95f02");

    // legend
    double lx = m.left + 14, ly = m.top + 18;
    auto legend = [&](const char* color, const char* text, const char* dash) {
        svg += "  <line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 28) +
               "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"" +
               (dash[0] ? std::string(" stroke-dasharray=\"") + dash + "\"" : "") + "/>\n";
        svg += "  <text x=\"" + num(lx + 34) + "\" y=\"" + num(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + text + "</text>\n";
        ly += 18;
    };
    legend("#2166ac", "nu2(T), a = 2", "");
    legend("#d95f02", "nu2(T), a = 5", "");
    legend("#444", "sqrt(T) / log T", "6 4");

    svg += "</svg>\n";
    return svg;
}

std::string report_gnuplot(const std::string& census_csv_name) {
    std::string gp;
    gp += "# Crossing-count staircases against sqrt(T)/log(T), checkpoint-level view.\n";
    gp += "# The events CSV holds the event-level staircase; this script draws the\n";
    gp += "# same figure as report.svg from the checkpoint rows alone.\n";
    gp += "set terminal svg size 960,600\n";
    gp += "set output 'report_gp.svg'\n";
    gp += "set datafile separator ','\n";
    gp += "set logscale xy\n";
    gp += "set xlabel 'T'\n";
    gp += "set ylabel 'count'\n";
    gp += "set key top left\n";
    gp += "plot '" + census_csv_name +
         "' skip 1 using 1:($2 > 0 ? $2 : 1/0) with steps lw 2 title 'nu2 a=2', \\\n";
    gp += "     '" + census_csv_name +
         "' skip 1 using 1:($3 > 0 ? $3 : 1/0) with steps lw 2 title 'nu2 a=5', \\\n";
    gp += "     sqrt(x)/log(x) with lines lw 2 dashtype 2 title 'sqrt(T)/log(T)'\n";
    return gp;
}

}  // namespace twincensus
