#include "twincensus/census.hpp"
#include "twincensus/model.hpp"
#include "twincensus/report.hpp"
#include "twincensus/util.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace tc = twincensus;

namespace {

// The constant's tail at 1e8 (~2.6e-8) sits far below the margin at which a
// perturbed c2 could flip any desk-scale count.
tc::QuadratureMethod parse_method(const std::string& name, double tol) {
    if (name == "gauss10") return tc::QuadratureMethod{tc::QuadKind::Gauss10, tol};
    if (name == "nc8") return tc::QuadratureMethod{tc::QuadKind::NewtonCotes8Adaptive, tol};
    throw std::invalid_argument("unknown method '" + name + "' (expected gauss10 or nc8)");
}

tc::SamplingMode parse_sampling(const std::string& name) {
    if (name == "post") return tc::SamplingMode::PostIncrementOnly;
    if (name == "two-phase") return tc::SamplingMode::TwoPhase;
    throw std::invalid_argument("unknown sampling mode '" + name + "' (expected post or two-phase)");
}

std::string pow2_label(std::uint64_t T) {
    if (T >= 2 && (T & (T - 1)) == 0) return "2^" + std::to_string(std::bit_width(T) - 1);
    return std::to_string(T);
}

struct CensusOpts {
    std::string limit;
    std::vector<int> a{2, 5};
    std::string method = "gauss10";
    double tol = 1e-12;
    std::string sampling = "post";
    std::string checkpoint;
    std::string resume;
    unsigned threads = 1;
    std::string out = ".";
};

int run_cmd_census(const CensusOpts& o) {
    std::uint64_t limit = tc::parse_count(o.limit);
    if (limit < (std::uint64_t{1} << 16))
        throw std::invalid_argument("census: --limit must be at least 2^16");
    if (o.threads < 1) throw std::invalid_argument("census: --threads must be >= 1");
    std::set<int> amodes(o.a.begin(), o.a.end());
    if (amodes.empty()) throw std::invalid_argument("census: --a needs at least one of 2, 5");
    for (int a : amodes)
        if (a != 2 && a != 5) throw std::invalid_argument("census: --a accepts only 2 and 5");

    tc::CensusConfig cfg;
    cfg.method = parse_method(o.method, o.tol);
    cfg.sampling = parse_sampling(o.sampling);
    cfg.threads = o.threads;
    cfg.checkpoint_path = o.checkpoint;

    tc::CensusState state;
    if (!o.resume.empty()) {
        state = tc::checkpoint_load(o.resume, cfg.method);
        tc::resume_census(state, limit, cfg);
    } else {
        tc::TwinConstant c2 = tc::census_constant();
        state = tc::run_census(limit, c2, cfg);
    }

    std::filesystem::path outdir(o.out);
    std::filesystem::create_directories(outdir);
    tc::atomic_write_file(outdir / "census.csv", tc::census_csv(state.checkpoints));
    tc::atomic_write_file(outdir / "census.json", tc::census_json(state.checkpoints));
    std::vector<tc::LabeledEvent> events;
    for (const tc::LabeledEvent& le : tc::merged_events(state))
        if (amodes.count(le.a)) events.push_back(le);
    tc::atomic_write_file(outdir / "events.csv", tc::events_csv(events));

    std::printf("# T, nu2_a2, nu2_a5, conjecture\n");
    for (const tc::TableRow& row : tc::report_table(state))
        std::printf("%s, %llu, %llu, %lld\n", pow2_label(row.T).c_str(),
                    static_cast<unsigned long long>(row.nu2_a2),
                    static_cast<unsigned long long>(row.nu2_a5),
                    static_cast<long long>(row.conjecture));
    return 0;
}

struct ConstantOpts {
    std::string prime_limit = "1e8";
};

int run_cmd_constant(const ConstantOpts& o) {
    tc::TwinConstant c = tc::twin_constant(tc::parse_count(o.prime_limit));
    std::printf("value %s\n", tc::format_real(c.value).c_str());
    std::printf("prime_limit %llu\n", static_cast<unsigned long long>(c.prime_limit));
    std::printf("tail_bound %s\n", tc::format_real(c.tail_bound).c_str());
    return 0;
}

struct FitOpts {
    std::string input = "census.csv";
    std::string column = "a2";
    std::string from;
    std::string to;
    std::string out = "fit.json";
};

int run_cmd_fit(const FitOpts& o) {
    std::ifstream in(o.input);
    if (!in) throw std::invalid_argument("fit: cannot open census CSV '" + o.input + "'");
    auto rows = tc::read_census_csv(in);
    bool use_a2 = o.column == "a2";
    if (!use_a2 && o.column != "a5")
        throw std::invalid_argument("fit: --column must be a2 or a5");
    std::uint64_t from = o.from.empty() ? 0 : tc::parse_count(o.from);
    std::uint64_t to = o.to.empty() ? UINT64_MAX : tc::parse_count(o.to);

    std::vector<tc::SeriesPoint> points;
    for (const tc::CheckpointRow& r : rows)
        if (r.T >= from && r.T <= to)
            points.push_back(tc::SeriesPoint{r.T, use_a2 ? r.nu2_a2 : r.nu2_a5});
    tc::FitResult fit = tc::fit_power_law(points);
    if (fit.n_excluded > 0)
        std::fprintf(stderr, "note: %zu zero-count rows excluded from the log fit\n",
                     fit.n_excluded);

    nlohmann::json j{{"alpha", fit.alpha},
                     {"beta", fit.beta},
                     {"rss", fit.rss},
                     {"n_points", fit.n_points}};
    std::string text = j.dump(2) + "\n";
    tc::atomic_write_file(o.out, text);
    std::fputs(text.c_str(), stdout);
    return 0;
}

struct ReportOpts {
    std::string census = "census.csv";
    std::string events = "events.csv";
    std::string out = ".";
    bool deterministic = false;
};

int run_cmd_report(const ReportOpts& o) {
    std::ifstream in(o.census);
    if (!in) throw std::invalid_argument("report: cannot open census CSV '" + o.census + "'");
    tc::ReportInputs ri;
    ri.rows = tc::read_census_csv(in);
    if (ri.rows.empty()) throw std::invalid_argument("report: census CSV has no rows");
    ri.deterministic = o.deterministic;

    std::ifstream ev(o.events);
    if (!ev) {
        std::fprintf(stderr, "warning: events file '%s' not found; drawing the curve only\n",
                     o.events.c_str());
    } else {
        for (const tc::LabeledEvent& le : tc::read_events_csv(ev))
            (le.a == 2 ? ri.steps_a2 : ri.steps_a5).push_back(le.ev.x);
        if (ri.steps_a2.empty() && ri.steps_a5.empty())
            std::fprintf(stderr, "warning: events file '%s' has no events; drawing the curve only\n",
                         o.events.c_str());
    }

    std::filesystem::path outdir(o.out);
    std::filesystem::create_directories(outdir);
    tc::atomic_write_file(outdir / "report.svg", tc::report_svg(ri));
    tc::atomic_write_file(outdir / "report.gp", tc::report_gnuplot(o.census));

    auto [t_lo, t_hi] = tc::report_domain(ri);
    if (!ri.steps_a2.empty())
        std::printf("crossings a2 %zu\n", tc::crossing_count(ri.steps_a2, t_lo, t_hi));
    if (!ri.steps_a5.empty())
        std::printf("crossings a5 %zu\n", tc::crossing_count(ri.steps_a5, t_lo, t_hi));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twin prime census: sign changes of pi2(x) - C2*Li2(x) against sqrt(T)/log T"};
    app.require_subcommand(1);

    CensusOpts co;
    CLI::App* census = app.add_subcommand("census", "run the twin census and emit CSV/JSON outputs");
    census->add_option("--limit", co.limit, "census upper bound (accepts 2^N and 1eN)")->required();
    census->add_option("--a", co.a, "lower integration limits to report (2 and/or 5)");
    census->add_option("--method", co.method, "quadrature engine: gauss10 or nc8");
    census->add_option("--tol", co.tol, "relative tolerance for the adaptive engine");
    census->add_option("--sampling", co.sampling, "d2 sampling convention: post or two-phase");
    census->add_option("--checkpoint", co.checkpoint, "write a resumable checkpoint at every row");
    census->add_option("--resume", co.resume, "resume from a checkpoint file");
    census->add_option("--threads", co.threads, "sieve worker count");
    census->add_option("--out", co.out, "output directory");

    ConstantOpts ko;
    CLI::App* constant = app.add_subcommand("constant", "compute the twin constant with a tail bound");
    constant->add_option("--prime-limit", ko.prime_limit, "largest prime in the product");

    FitOpts fo;
    CLI::App* fit = app.add_subcommand("fit", "fit alpha*T^beta to a census CSV column");
    fit->add_option("--input", fo.input, "census CSV path");
    fit->add_option("--column", fo.column, "a2 or a5");
    fit->add_option("--from", fo.from, "lowest T included");
    fit->add_option("--to", fo.to, "highest T included");
    fit->add_option("--out", fo.out, "fit JSON output path");

    ReportOpts ro;
    CLI::App* report = app.add_subcommand("report", "render the staircase/conjecture comparison");
    report->add_option("--census", ro.census, "census CSV path");
    report->add_option("--events", ro.events, "events CSV path");
    report->add_option("--out", ro.out, "output directory");
    report->add_flag("--deterministic", ro.deterministic, "omit the generation timestamp");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (census->parsed()) return run_cmd_census(co);
        if (constant->parsed()) return run_cmd_constant(ko);
        if (fit->parsed()) return run_cmd_fit(fo);
        if (report->parsed()) return run_cmd_report(ro);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
