#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "diwmrac/artifacts.hpp"
#include "diwmrac/errors.hpp"
#include "diwmrac/text.hpp"

using namespace diwmrac;

TEST_CASE("shortest double formatting round-trips bit-exactly") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double specials[] = {0.0,     1.0,   -1.0,        0.1,
                               1.0 / 3, 1e-17, 6.02214e23,  -2.5e-308,
                               0.0125,  90.0,  16.670833333333334};
    for (const double v : specials) {
        CHECK(parse_double_strict(format_shortest(v)) == v);
    }
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(unit(rng), i % 600 - 300);
        CHECK(parse_double_strict(format_shortest(v)) == v);
    }
}

TEST_CASE("strict double parsing rejects junk") {
    CHECK(parse_double_strict("0.5") == 0.5);
    CHECK(parse_double_strict("-3e4") == -30000.0);
    CHECK_THROWS_AS(parse_double_strict(""), ConfigError);
    CHECK_THROWS_AS(parse_double_strict("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_double_strict("x1.5"), ConfigError);
    CHECK_THROWS_AS(parse_double_strict("1.5 "), ConfigError);
}

TEST_CASE("csv row and line splitting") {
    CHECK(split_csv_row("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_row("a,,c") == std::vector<std::string>{"a", "", "c"});
    CHECK(split_csv_row("") == std::vector<std::string>{""});
    CHECK(split_csv_row(",") == std::vector<std::string>{"", ""});
    CHECK(split_lines("x\ny\n") == std::vector<std::string>{"x", "y"});
    CHECK(split_lines("x\ny") == std::vector<std::string>{"x", "y"});
    CHECK(split_lines("") == std::vector<std::string>{});
}

TEST_CASE("trajectory csv: fixed header and one line per sample") {
    Trajectory traj;
    traj.rows.resize(3);
    traj.rows[1].t = 0.01;
    traj.rows[1].v1 = 0.0125;
    traj.rows[2].t = 0.02;
    traj.rows[2].Vdot = -1e-7;
    const std::string csv = trajectory_csv(traj);
    const auto lines = split_lines(csv);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] ==
          "t,v1,u3,vr1,ur3,e1,e3,mdot,us,d1_true,d3_true,dhat1,dhat3,V,Vdot");
    const auto row0 = split_csv_row(lines[1]);
    REQUIRE(row0.size() == 15);
    for (const auto& field : row0) CHECK(field == "0");
    const auto row2 = split_csv_row(lines[3]);
    CHECK(parse_double_strict(row2[0]) == 0.02);
    CHECK(parse_double_strict(row2[14]) == -1e-7);
}

TEST_CASE("trajectory csv values parse back to the exact logged doubles") {
    Trajectory traj;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-10.0, 10.0);
    traj.rows.resize(50);
    for (auto& r : traj.rows) {
        r.t = unit(rng);
        r.v1 = unit(rng);
        r.Vdot = unit(rng) * 1e-9;
    }
    const auto lines = split_lines(trajectory_csv(traj));
    REQUIRE(lines.size() == 51);
    for (std::size_t i = 0; i < traj.rows.size(); ++i) {
        const auto f = split_csv_row(lines[i + 1]);
        CHECK(parse_double_strict(f[0]) == traj.rows[i].t);
        CHECK(parse_double_strict(f[1]) == traj.rows[i].v1);
        CHECK(parse_double_strict(f[14]) == traj.rows[i].Vdot);
    }
}

TEST_CASE("metrics csv schema and optional cells") {
    RunMetricsRow a;
    a.subsystem = "nozzle";
    a.t_inject = 30.0;
    a.metrics.t_cp = 1.25;
    a.metrics.t_cr = 2.5;
    a.metrics.adaptation_converged = true;
    a.metrics.tracking_converged = true;
    a.metrics.e_band = 1e-4;
    a.metrics.d_band = 0.04;
    a.final_e = -3e-9;
    a.final_residual = 5e-6;

    RunMetricsRow b;
    b.subsystem = "plate";
    b.t_inject = 30.0;
    b.metrics.t_cr = std::nullopt;
    b.metrics.t_cp = std::nullopt;

    const std::string csv = metrics_csv({a, b});
    const auto lines = split_lines(csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "subsystem,t_inject,t_cp,t_cr,adaptation_converged,"
                      "tracking_converged,e_band,d_band,final_e,final_residual");
    const auto ra = split_csv_row(lines[1]);
    REQUIRE(ra.size() == 10);
    CHECK(ra[0] == "nozzle");
    CHECK(parse_double_strict(ra[2]) == 1.25);
    CHECK(ra[4] == "1");
    const auto rb = split_csv_row(lines[2]);
    CHECK(rb[2].empty());
    CHECK(rb[3].empty());
    CHECK(rb[4] == "0");
}

TEST_CASE("svg rendering produces a well-formed standalone document") {
    PlotPanel panel;
    panel.title = "Nozzle-exit velocity tracking";
    panel.x_label = "t [s]";
    panel.y_label = "v1 [m/s]";
    PlotSeries s;
    s.name = "plant";
    for (int i = 0; i < 100; ++i) {
        s.x.push_back(0.1 * i);
        s.y.push_back(std::sin(0.1 * i));
    }
    panel.series.push_back(s);
    s.name = "reference";
    s.dashed = true;
    panel.series.push_back(s);

    const std::string svg = render_svg({panel});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("Nozzle-exit velocity tracking") != std::string::npos);
    CHECK(svg.find("plant") != std::string::npos);
    CHECK(svg.find("reference") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("svg rendering rejects mismatched series lengths") {
    PlotPanel panel;
    PlotSeries s;
    s.x = {0.0, 1.0};
    s.y = {0.0};
    panel.series.push_back(s);
    CHECK_THROWS_AS(render_svg({panel}), ConfigError);
}

TEST_CASE("run plots include every labelled run") {
    SimulationConfig cfg;
    cfg.model = default_model_profile();
    cfg.t_end = 1.0;
    const Trajectory traj = run_closed_loop(cfg);

    const std::string tracking = tracking_svg({{"adaptive", &traj}, {"frozen", &traj}});
    CHECK(tracking.find("adaptive") != std::string::npos);
    CHECK(tracking.find("frozen") != std::string::npos);
    CHECK(tracking.find("reference") != std::string::npos);

    const std::string adaptation = adaptation_svg({{"run", &traj}});
    CHECK(adaptation.find("</svg>") != std::string::npos);
    CHECK(adaptation.find("run") != std::string::npos);
}
