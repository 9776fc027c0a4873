#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twincensus/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace twincensus;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "twincensus_cli_test" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    fs::path out = dir / "stdout.txt";
    fs::path err = dir / "stderr.txt";
    std::string cmd = std::string(TWINCENSUS_CLI_PATH) + " " + args + " > " +
                      out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

}  // namespace

TEST_CASE("census at 2^16 emits the frozen table and files") {
    fs::path dir = fresh_dir("census16");
    RunResult r = run_cli("census --limit 2^16 --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out ==
          "# T, nu2_a2, nu2_a5, conjecture\n"
          "2^16, 0, 3, 23\n");

    std::string csv = slurp(dir / "census.csv");
    CHECK(csv.find("T,nu2_a2,nu2_a5,pi2,li2,conjecture\n") == 0);
    CHECK(csv.find("65536,0,3,860,") != std::string::npos);

    std::string events = slurp(dir / "events.csv");
    CHECK(events.find("a,pair_p,x,direction,d2_before,d2_after,phase\n") == 0);
    CHECK(events.find("5,41,43,to_negative,") != std::string::npos);
    CHECK(events.find("5,6959,6961,to_positive,") != std::string::npos);
    CHECK(events.find("5,7127,7129,to_negative,") != std::string::npos);

    auto j = nlohmann::json::parse(slurp(dir / "census.json"));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    CHECK(j[0]["T"] == 65536);
    CHECK(j[0]["pi2"] == 860);
    fs::remove_all(dir);
}

TEST_CASE("census output is byte-identical across thread counts") {
    fs::path d1 = fresh_dir("threads1");
    fs::path d4 = fresh_dir("threads4");
    CHECK(run_cli("census --limit 2^18 --threads 1 --out " + d1.string(), d1).exit_code == 0);
    CHECK(run_cli("census --limit 2^18 --threads 4 --out " + d4.string(), d4).exit_code == 0);
    CHECK(slurp(d1 / "census.csv") == slurp(d4 / "census.csv"));
    CHECK(slurp(d1 / "events.csv") == slurp(d4 / "events.csv"));
    CHECK(slurp(d1 / "census.json") == slurp(d4 / "census.json"));
    fs::remove_all(d1);
    fs::remove_all(d4);
}

TEST_CASE("a resumed run reproduces the cold run byte for byte") {
    fs::path cold = fresh_dir("cold19");
    fs::path warm = fresh_dir("warm19");
    CHECK(run_cli("census --limit 2^19 --out " + cold.string(), cold).exit_code == 0);

    fs::path ck = warm / "state.ck";
    CHECK(run_cli("census --limit 2^18 --checkpoint " + ck.string() + " --out " +
                      warm.string(),
                  warm)
              .exit_code == 0);
    RunResult r = run_cli("census --limit 2^19 --resume " + ck.string() + " --out " +
                              warm.string(),
                          warm);
    CHECK(r.exit_code == 0);
    CHECK(slurp(cold / "census.csv") == slurp(warm / "census.csv"));
    CHECK(slurp(cold / "events.csv") == slurp(warm / "events.csv"));
    fs::remove_all(cold);
    fs::remove_all(warm);
}

TEST_CASE("the two quadrature engines agree through the CLI") {
    fs::path dg = fresh_dir("gauss16");
    fs::path dn = fresh_dir("nc816");
    RunResult rg = run_cli("census --limit 2^17 --method gauss10 --out " + dg.string(), dg);
    RunResult rn = run_cli("census --limit 2^17 --method nc8 --out " + dn.string(), dn);
    CHECK(rg.exit_code == 0);
    CHECK(rn.exit_code == 0);
    CHECK(rg.out == rn.out);  // identical count table

    std::istringstream ig(slurp(dg / "census.csv")), in8(slurp(dn / "census.csv"));
    auto rows_g = read_census_csv(ig);
    auto rows_n = read_census_csv(in8);
    REQUIRE(rows_g.size() == rows_n.size());
    for (std::size_t i = 0; i < rows_g.size(); ++i) {
        CHECK(rows_g[i].nu2_a2 == rows_n[i].nu2_a2);
        CHECK(rows_g[i].nu2_a5 == rows_n[i].nu2_a5);
        CHECK(rows_g[i].pi2 == rows_n[i].pi2);
        CHECK(rows_g[i].li2 == Approx(rows_n[i].li2).epsilon(1e-10));
    }
    fs::remove_all(dg);
    fs::remove_all(dn);
}

TEST_CASE("census rejects a limit below the first checkpoint") {
    fs::path dir = fresh_dir("badlimit");
    RunResult r = run_cli("census --limit 1000 --out " + dir.string(), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") == 0);
    fs::remove_all(dir);
}

TEST_CASE("census validates --a") {
    fs::path dir = fresh_dir("bada");
    RunResult r = run_cli("census --limit 2^16 --a 3 --out " + dir.string(), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") == 0);
    fs::remove_all(dir);
}

TEST_CASE("census --a filters the events file") {
    fs::path dir = fresh_dir("filter");
    RunResult r = run_cli("census --limit 2^16 --a 2 --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    // At 2^16 the a=2 tracker has not crossed yet: header only.
    CHECK(slurp(dir / "events.csv") == "a,pair_p,x,direction,d2_before,d2_after,phase\n");
    fs::remove_all(dir);
}

TEST_CASE("constant prints the three frozen lines") {
    fs::path dir = fresh_dir("constant");
    RunResult r = run_cli("constant --prime-limit 1e5", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out ==
          "value 1.3203246909334732\n"
          "prime_limit 100000\n"
          "tail_bound 2.6407021958228387e-05\n");

    RunResult bad = run_cli("constant --prime-limit 2", dir);
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("error:") == 0);
    fs::remove_all(dir);
}

TEST_CASE("fit recovers an exact power law from a CSV") {
    fs::path dir = fresh_dir("fit");
    // nu2 = sqrt(T) exactly on T = 4^k.
    std::vector<CheckpointRow> rows;
    for (std::uint64_t k = 1; k <= 10; ++k)
        rows.push_back(CheckpointRow{std::uint64_t{1} << (2 * k), std::uint64_t{1} << k,
                                     std::uint64_t{1} << k, 0, 0.0, 0.0});
    std::ofstream(dir / "census.csv") << census_csv(rows);

    fs::path out = dir / "fit.json";
    RunResult r = run_cli("fit --input " + (dir / "census.csv").string() + " --column a2 --out " +
                              out.string(),
                          dir);
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["alpha"].get<double>() == Approx(1.0).epsilon(1e-10));
    CHECK(j["beta"].get<double>() == Approx(0.5).epsilon(1e-10));
    CHECK(j["n_points"] == 10);
    CHECK(nlohmann::json::parse(r.out) == j);  // stdout mirrors the file

    // --from/--to restrict the window.
    RunResult rw = run_cli("fit --input " + (dir / "census.csv").string() +
                               " --column a5 --from 16 --to 2^12 --out " + out.string(),
                           dir);
    CHECK(rw.exit_code == 0);
    CHECK(nlohmann::json::parse(slurp(out))["n_points"] == 5);
    fs::remove_all(dir);
}

TEST_CASE("fit notes excluded zero rows on stderr") {
    fs::path dir = fresh_dir("fitzero");
    std::vector<CheckpointRow> rows{{4, 0, 1, 0, 0.0, 0.0},
                                    {16, 4, 1, 0, 0.0, 0.0},
                                    {64, 8, 1, 0, 0.0, 0.0},
                                    {256, 16, 1, 0, 0.0, 0.0}};
    std::ofstream(dir / "census.csv") << census_csv(rows);
    RunResult r = run_cli("fit --input " + (dir / "census.csv").string() + " --out " +
                              (dir / "fit.json").string(),
                          dir);
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("1 zero-count rows excluded") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("fit fails loudly on a missing input file") {
    fs::path dir = fresh_dir("fitmissing");
    RunResult r = run_cli("fit --input " + (dir / "nope.csv").string(), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") == 0);
    fs::remove_all(dir);
}

TEST_CASE("report draws deterministic figures and counts crossings") {
    fs::path dir = fresh_dir("report");
    REQUIRE(run_cli("census --limit 2^16 --out " + dir.string(), dir).exit_code == 0);

    std::string args = "report --census " + (dir / "census.csv").string() + " --events " +
                       (dir / "events.csv").string() + " --deterministic --out " + dir.string();
    RunResult r1 = run_cli(args, dir);
    CHECK(r1.exit_code == 0);
    CHECK(r1.out.find("crossings a5 ") != std::string::npos);
    std::string svg1 = slurp(dir / "report.svg");
    CHECK(svg1.find("<svg") != std::string::npos);

    RunResult r2 = run_cli(args, dir);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(dir / "report.svg") == svg1);

    std::string gp = slurp(dir / "report.gp");
    CHECK(gp.find("census.csv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("report warns and degrades without an events file") {
    fs::path dir = fresh_dir("reportnoev");
    REQUIRE(run_cli("census --limit 2^16 --out " + dir.string(), dir).exit_code == 0);
    fs::remove(dir / "events.csv");
    RunResult r = run_cli("report --census " + (dir / "census.csv").string() + " --events " +
                              (dir / "events.csv").string() + " --deterministic --out " +
                              dir.string(),
                          dir);
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("warning:") != std::string::npos);
    CHECK(r.out.find("crossings") == std::string::npos);
    CHECK(fs::exists(dir / "report.svg"));
    fs::remove_all(dir);
}

TEST_CASE("a missing subcommand is an error") {
    fs::path dir = fresh_dir("nosub");
    RunResult r = run_cli("", dir);
    CHECK(r.exit_code != 0);
    fs::remove_all(dir);
}
