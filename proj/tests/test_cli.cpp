#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(HRSIM_BIN) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("hrsim_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes a report, a per-flow csv, and the trace") {
    fs::path d = fresh_dir("run");
    CHECK(run_cli("run --config fig2 --trace --quiet --out " + d.string()) ==
          0);

    auto report = nlohmann::json::parse(slurp(d / "report.json"));
    CHECK(report["scenario"] == "fig2");
    CHECK(report["totals"]["offered"] == 1);

    std::string csv = slurp(d / "report.csv");
    CHECK(count_lines(csv) == 3); // header, one flow, total
    CHECK(csv.rfind("flow,name,rc,", 0) == 0);

    CHECK_FALSE(slurp(d / "trace.tsv").empty());
    fs::remove_all(d);
}

TEST_CASE("the trace file only appears when asked for") {
    fs::path d = fresh_dir("notrace");
    CHECK(run_cli("run --config fig2 --quiet --out " + d.string()) == 0);
    CHECK(fs::exists(d / "report.json"));
    CHECK_FALSE(fs::exists(d / "trace.tsv"));
    fs::remove_all(d);
}

TEST_CASE("bad configurations exit with the config status") {
    fs::path d = fresh_dir("bad");
    CHECK(run_cli("run --config no_such_scenario --quiet --out " +
                  d.string()) == 2);

    fs::path garbage = d / "garbage.json";
    std::ofstream(garbage) << "{broken";
    CHECK(run_cli("run --config " + garbage.string() + " --quiet --out " +
                  d.string()) == 2);

    CHECK(run_cli("validate --config scenario1") == 0);

    // structurally valid JSON that fails the scenario rules
    auto spec = nlohmann::ordered_json::parse(
        slurp(fs::path(HRSIM_REPO_DIR) / "scenarios" / "scenario1.json"));
    spec["duration_ns"] = 0;
    fs::path invalid = d / "invalid.json";
    std::ofstream(invalid) << spec.dump();
    CHECK(run_cli("validate --config " + invalid.string()) == 2);
    fs::remove_all(d);
}

TEST_CASE("identical seeds give byte-identical outputs") {
    fs::path d1 = fresh_dir("det1");
    fs::path d2 = fresh_dir("det2");
    for (const auto& d : {d1, d2})
        REQUIRE(run_cli("run --config scenario2 --trace --quiet --out " +
                        d.string()) == 0);
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "trace.tsv") == slurp(d2 / "trace.tsv"));
    CHECK(slurp(d1 / "report.csv") == slurp(d2 / "report.csv"));

    SUBCASE("and the verify command agrees") {
        CHECK(run_cli("verify --trace " + (d1 / "trace.tsv").string() +
                      " --golden " + (d2 / "trace.tsv").string()) == 0);

        std::string tampered = slurp(d1 / "trace.tsv") + "tail\textra\n";
        fs::path t = d1 / "tampered.tsv";
        std::ofstream(t, std::ios::binary) << tampered;
        CHECK(run_cli("verify --trace " + t.string() + " --golden " +
                      (d2 / "trace.tsv").string()) == 1);

        CHECK(run_cli("verify --trace " + (d1 / "trace.tsv").string() +
                      " --golden " + (d1 / "missing.tsv").string()) == 2);
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("sweep runs the grid and tabulates one row per run") {
    fs::path d = fresh_dir("sweep");
    CHECK(run_cli("sweep --config fig2 --sweep loss=0.0,0.5 --seeds 2 "
                  "--quiet --out " +
                  d.string()) == 0);

    std::string csv = slurp(d / "sweep.csv");
    CHECK(count_lines(csv) == 5); // header + 2 points x 2 seeds
    CHECK(csv.rfind("loss,seed,", 0) == 0);

    std::size_t reports = 0;
    for (const auto& e : fs::directory_iterator(d))
        if (e.path().filename().string().rfind("report_", 0) == 0)
            ++reports;
    CHECK(reports == 4);

    CHECK(run_cli("sweep --config fig2 --sweep bogus=1 --quiet --out " +
                  d.string()) == 2);

    fs::path empty = fresh_dir("sweep_empty");
    CHECK(run_cli("sweep --config fig2 --sweep loss= --quiet --out " +
                  empty.string()) == 0);
    CHECK(count_lines(slurp(empty / "sweep.csv")) == 1);
    fs::remove_all(d);
    fs::remove_all(empty);
}

TEST_CASE("the presets command reproduces the checked-in scenarios") {
    fs::path d = fresh_dir("presets");
    CHECK(run_cli("presets --dir " + d.string()) == 0);
    for (const char* name : {"scenario1", "scenario2", "scenario3", "fig2"}) {
        fs::path written = d / (std::string(name) + ".json");
        fs::path checked_in =
            fs::path(HRSIM_REPO_DIR) / "scenarios" / (std::string(name) + ".json");
        REQUIRE(fs::exists(written));
        CHECK(slurp(written) == slurp(checked_in));
    }
    fs::remove_all(d);
}

} // TEST_SUITE
