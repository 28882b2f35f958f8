#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "diwmrac/analysis.hpp"
#include "diwmrac/commands.hpp"
#include "diwmrac/config_json.hpp"
#include "diwmrac/text.hpp"

using namespace diwmrac;
namespace fs = std::filesystem;

namespace {

// Scratch tree rooted in the test binary's working directory; recreated
// per test case so runs cannot see each other's files.
struct Scratch {
    fs::path root;
    explicit Scratch(const std::string& name) : root(fs::path("cmd-scratch") / name) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Scratch() { fs::remove_all(root); }

    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = root / name;
        std::ofstream f(p);
        f << text;
        return p;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_cmd(int (*cmd)(const RunManifest&, std::ostream&, std::ostream&),
            const RunManifest& m, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int rc = cmd(m, out, err);
    if (err_text) *err_text = err.str();
    return rc;
}

} // namespace

TEST_CASE("run: zero scenario produces the full artifact set") {
    Scratch s("run-zero");
    RunManifest m;
    m.scenario_path = s.write("scenario.json",
                              R"({"simulation": {"t_end": 1.0}})").string();
    m.out_dir = (s.root / "out").string();
    CHECK(run_cmd(cmd_run, m) == 0);

    const std::string csv = slurp(fs::path(m.out_dir) / "trajectory.csv");
    const auto lines = split_lines(csv);
    REQUIRE(lines.size() == 102); // header + 101 samples
    CHECK(split_csv_row(lines[1])[1] == "0");  // v1 row 0
    CHECK(split_csv_row(lines[101])[5] == "0"); // e1 final
    CHECK(fs::exists(fs::path(m.out_dir) / "metrics.csv"));
    CHECK(fs::exists(fs::path(m.out_dir) / "report.txt"));
    CHECK_FALSE(fs::exists(fs::path(m.out_dir) / "tracking.svg"));
}

TEST_CASE("run: plots flag adds the two charts") {
    Scratch s("run-plots");
    RunManifest m;
    m.scenario_path =
        s.write("scenario.json", R"({"simulation": {"t_end": 0.5}})").string();
    m.out_dir = (s.root / "out").string();
    m.plots = true;
    CHECK(run_cmd(cmd_run, m) == 0);
    CHECK(fs::exists(fs::path(m.out_dir) / "tracking.svg"));
    CHECK(fs::exists(fs::path(m.out_dir) / "adaptation.svg"));
}

TEST_CASE("run: reruns with the same seed are byte-identical") {
    Scratch s("run-seeded");
    const std::string doc = R"({
        "simulation": {"t_end": 2.0},
        "scenario": {"noise_mdot": {"std": 0.01}, "noise_us": {"std": 0.05}}
    })";
    RunManifest m;
    m.scenario_path = s.write("scenario.json", doc).string();
    m.seed = 7;

    m.out_dir = (s.root / "a").string();
    REQUIRE(run_cmd(cmd_run, m) == 0);
    m.out_dir = (s.root / "b").string();
    REQUIRE(run_cmd(cmd_run, m) == 0);
    CHECK(slurp(s.root / "a" / "trajectory.csv") == slurp(s.root / "b" / "trajectory.csv"));

    // A different seed must change the sampled noise.
    m.seed = 8;
    m.out_dir = (s.root / "c").string();
    REQUIRE(run_cmd(cmd_run, m) == 0);
    CHECK(slurp(s.root / "a" / "trajectory.csv") != slurp(s.root / "c" / "trajectory.csv"));
}

TEST_CASE("run: config errors exit 2 and leave no artifacts") {
    Scratch s("run-bad");
    RunManifest m;
    m.out_dir = (s.root / "out").string();

    std::string err;
    m.scenario_path = s.write("bad-gain.json", R"({"controller": {"k1": -3}})").string();
    CHECK(run_cmd(cmd_run, m, &err) == 2);
    CHECK(err.find("strictly negative") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(m.out_dir) / "trajectory.csv"));

    m.scenario_path = s.write("unknown-key.json", R"({"controler": {}})").string();
    CHECK(run_cmd(cmd_run, m, &err) == 2);
    CHECK(err.find("controler") != std::string::npos);

    m.scenario_path = (s.root / "missing.json").string();
    CHECK(run_cmd(cmd_run, m, &err) == 2);
}

TEST_CASE("run: numerical blow-up exits 3") {
    Scratch s("run-div");
    RunManifest m;
    // dt = 1 is far outside the stability region of the closed-loop poles,
    // so the nonzero initial state explodes past the divergence bound.
    m.scenario_path = s.write("scenario.json", R"({
        "simulation": {"dt": 1.0, "t_end": 40},
        "scenario": {"initial": {"v1": 1.0}}
    })").string();
    m.out_dir = (s.root / "out").string();
    std::string err;
    CHECK(run_cmd(cmd_run, m, &err) == 3);
    CHECK(err.find("diverged") != std::string::npos);
}

TEST_CASE("compare: zero disturbance makes the pair coincide") {
    Scratch s("cmp-zero");
    RunManifest m;
    m.scenario_path =
        s.write("scenario.json", R"({"simulation": {"t_end": 1.0}})").string();
    m.out_dir = (s.root / "out").string();
    REQUIRE(run_cmd(cmd_compare, m) == 0);
    const std::string a = slurp(fs::path(m.out_dir) / "trajectory_adaptive.csv");
    const std::string b = slurp(fs::path(m.out_dir) / "trajectory_nonadaptive.csv");
    CHECK(a == b);
    CHECK(fs::exists(fs::path(m.out_dir) / "metrics.csv"));
    CHECK(fs::exists(fs::path(m.out_dir) / "report.txt"));
}

TEST_CASE("compare: rejects a non-adaptive base config") {
    Scratch s("cmp-frozen");
    RunManifest m;
    m.scenario_path = s.write(
        "scenario.json", R"({"controller": {"gamma1": 0, "gamma3": 0}})").string();
    m.out_dir = (s.root / "out").string();
    std::string err;
    CHECK(run_cmd(cmd_compare, m, &err) == 2);
    CHECK(err.find("adaptive") != std::string::npos);
}

TEST_CASE("sweep: single case matches an equivalent standalone run") {
    Scratch s("sweep-one");
    const std::string sweep_doc = R"({
        "simulation": {"t_end": 20.0},
        "sweep": {"cases": [{"label": "only", "channel": "us", "delta": -2.0, "t0": 5.0}]}
    })";
    RunManifest m;
    m.scenario_path = s.write("sweep.json", sweep_doc).string();
    m.out_dir = (s.root / "out").string();
    REQUIRE(run_cmd(cmd_sweep, m) == 0);

    const auto results =
        parse_performance_csv(slurp(fs::path(m.out_dir) / "performance.csv"));
    REQUIRE(results.size() == 1);
    CHECK(results[0].label == "only");

    // The same scenario expressed as a plain run must measure identically.
    const ParsedScenario run_cfg = parse_scenario(R"({
        "simulation": {"t_end": 20.0},
        "scenario": {"disturbance_us": {"kind": "step", "t0": 5.0, "magnitude": -2.0}}
    })");
    const Trajectory traj = run_closed_loop(run_cfg.config);
    const ConvergenceMetrics direct = measure_convergence(traj, Subsystem::Plate, 5.0);
    CHECK(results[0].metrics.t_cr == direct.t_cr);
    CHECK(results[0].metrics.t_cp == direct.t_cp);

    CHECK(fs::exists(fs::path(m.out_dir) / "cases" / "only" / "trajectory.csv"));
    CHECK(fs::exists(fs::path(m.out_dir) / "performance.txt"));
}

TEST_CASE("sweep: worker count does not change any output byte") {
    Scratch s("sweep-par");
    const std::string doc = R"({
        "case_study": "table1-sweep",
        "simulation": {"t_end": 50.0},
        "scenario": {"noise_mdot": {"std": 1e-4}, "noise_us": {"std": 1e-3}}
    })";
    RunManifest m;
    m.scenario_path = s.write("sweep.json", doc).string();
    m.seed = 3;

    setenv("DIW_MRAC_THREADS", "1", 1);
    m.out_dir = (s.root / "serial").string();
    REQUIRE(run_cmd(cmd_sweep, m) == 0);
    setenv("DIW_MRAC_THREADS", "8", 1);
    m.out_dir = (s.root / "parallel").string();
    REQUIRE(run_cmd(cmd_sweep, m) == 0);
    unsetenv("DIW_MRAC_THREADS");

    CHECK(slurp(s.root / "serial" / "performance.csv") ==
          slurp(s.root / "parallel" / "performance.csv"));
    for (const auto& r :
         parse_performance_csv(slurp(s.root / "serial" / "performance.csv"))) {
        CHECK(slurp(s.root / "serial" / "cases" / r.label / "trajectory.csv") ==
              slurp(s.root / "parallel" / "cases" / r.label / "trajectory.csv"));
    }
}

TEST_CASE("sweep: one diverging case fails partially with exit 4") {
    Scratch s("sweep-partial");
    // The absurd magnitude drives the transient past the divergence bound;
    // the small one settles normally.
    const std::string doc = R"({
        "simulation": {"t_end": 10.0},
        "sweep": {"cases": [
            {"label": "fine", "channel": "us", "delta": -2.0, "t0": 2.0},
            {"label": "absurd", "channel": "mdot", "delta": -1e15, "t0": 2.0}
        ]}
    })";
    RunManifest m;
    m.scenario_path = s.write("sweep.json", doc).string();
    m.out_dir = (s.root / "out").string();
    std::string err;
    CHECK(run_cmd(cmd_sweep, m, &err) == 4);
    CHECK(err.find("absurd") != std::string::npos);

    const auto results =
        parse_performance_csv(slurp(fs::path(m.out_dir) / "performance.csv"));
    REQUIRE(results.size() == 1); // only the surviving case is tabulated
    CHECK(results[0].label == "fine");
    const std::string report = slurp(fs::path(m.out_dir) / "report.txt");
    CHECK(report.find("absurd") != std::string::npos);
}

TEST_CASE("sweep: a scenario without cases is a config error") {
    Scratch s("sweep-empty");
    RunManifest m;
    m.scenario_path = s.write("scenario.json", "{}").string();
    m.out_dir = (s.root / "out").string();
    std::string err;
    CHECK(run_cmd(cmd_sweep, m, &err) == 2);
    CHECK(err.find("case") != std::string::npos);
}

TEST_CASE("unknown preset id names the valid ones on stderr") {
    Scratch s("run-badpreset");
    RunManifest m;
    m.scenario_path = s.write("scenario.json", R"({"case_study": 9})").string();
    m.out_dir = (s.root / "out").string();
    std::string err;
    CHECK(run_cmd(cmd_run, m, &err) == 2);
    CHECK(err.find("table1-sweep") != std::string::npos);
}
