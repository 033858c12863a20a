#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sgstokes/errors.hpp"
#include "sgstokes/experiment.hpp"

using namespace sgstokes;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.mesh_level = 0;
    cfg.M = 2;
    cfg.k = 1;
    cfg.sigma_mu = 0.2;
    cfg.tol = 1e-6;
    cfg.solver = "both";
    return cfg;
}

}  // namespace

TEST_CASE("config parsing, defaults and validation") {
    const ExperimentConfig defaults;
    CHECK(defaults.M == 10);
    CHECK(defaults.k == 1);
    CHECK(defaults.sigma_mu == 0.2);
    CHECK(defaults.b1 == 1.0);
    CHECK(defaults.tol == 1e-6);
    CHECK(defaults.effective_level() == 1);  // desk-scale default

    const ExperimentConfig cfg = parse_config_text(
        "# comment\n"
        "mesh_level = 2\n"
        "M = 4\n"
        "k = 2\n"
        "sigma_mu = 0.3\n"
        "solver = bpcg\n"
        "kappa = 0.8\n"
        "sweep.param = sigma\n"
        "sweep.values = 0.1, 0.2 0.3\n"
        "out = /tmp/somewhere\n");
    CHECK(cfg.mesh_level == 2);
    CHECK(cfg.M == 4);
    CHECK(cfg.k == 2);
    CHECK(cfg.solver == "bpcg");
    CHECK(cfg.kappa == 0.8);
    CHECK(cfg.sweep_param == "sigma");
    REQUIRE(cfg.sweep_values.size() == 3);
    CHECK(cfg.sweep_values[1] == 0.2);
    cfg.validate();

    CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("mesh_level\n"), ConfigError);

    ExperimentConfig bad = tiny_config();
    bad.k = 9;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_config();
    bad.M = 40;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_config();
    bad.kappa = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_config();
    bad.sweep_param = "viscosity";
    bad.sweep_values = {1.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_config();
    bad.sweep_values = {1.0};  // values without a parameter
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_config();
    bad.sweep_param = "sigma";  // parameter without values
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("requested h maps to the closest dyadic level") {
    ExperimentConfig cfg = tiny_config();
    cfg.h = 0.1;
    CHECK(cfg.effective_level() == 0);
    cfg.h = 0.05;
    CHECK(cfg.effective_level() == 1);
    cfg.h = 0.03;
    CHECK(cfg.effective_level() == 2);
    cfg.h = 0.01;
    CHECK(cfg.effective_level() == 3);  // 0.0125 is the closest dyadic spacing
    cfg.h.reset();
    cfg.full_scale = true;
    CHECK(cfg.effective_level() == 3);
}

TEST_CASE("sweep over M runs both solvers and reports deterministically") {
    ExperimentConfig cfg = tiny_config();
    cfg.sweep_param = "M";
    cfg.sweep_values = {1, 2};

    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 4);  // two values x two solvers
    for (const auto& r : rows) {
        CHECK(r.converged);
        CHECK(r.iterations > 0);
        CHECK(r.error.empty());
        CHECK(r.dofs > 0);
    }
    CHECK(rows[0].solver == "minres");
    CHECK(rows[1].solver == "bpcg");
    CHECK(rows[1].a_star > 0.0);

    const auto rows2 = run_sweep(cfg);
    REQUIRE(rows2.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].iterations == rows2[i].iterations);
        CHECK(rows[i].value == rows2[i].value);
    }

    emit_report(rows, "csv", "rep_a.csv");
    emit_report(rows2, "csv", "rep_b.csv");
    CHECK(slurp("rep_a.csv") == slurp("rep_b.csv"));  // identical bytes

    emit_report(rows, "markdown", "rep_a.md");
    const std::string md = slurp("rep_a.md");
    CHECK(md.find("| param |") != std::string::npos);
    CHECK(md.find("minres") != std::string::npos);

    const std::string csv = slurp("rep_a.csv");
    CHECK(csv.rfind("param,value,solver,iterations,converged,a_star,dofs\n", 0) == 0);
    int lines = 0;
    for (char ch : csv) lines += (ch == '\n');
    CHECK(lines == 5);  // header + 4 rows

    std::remove("rep_a.csv");
    std::remove("rep_b.csv");
    std::remove("rep_a.md");
}

TEST_CASE("empty report is an error and writes nothing") {
    std::vector<ExperimentRow> empty;
    CHECK_THROWS_AS(emit_report(empty, "csv", "nope.csv"), ConfigError);
    std::ifstream in("nope.csv");
    CHECK(!in.good());
}

TEST_CASE("comparison pairing flags the BPCG advantage") {
    ExperimentConfig cfg = tiny_config();
    cfg.sweep_param = "sigma";
    cfg.sweep_values = {0.1, 0.2};
    const auto cmp = compare_solvers(cfg);
    REQUIRE(cmp.size() == 2);
    for (const auto& c : cmp) {
        CHECK(c.both_converged);
        CHECK(c.minres_iterations > 0);
        CHECK(c.bpcg_iterations > 0);
        CHECK(c.bpcg_le_minres == (c.bpcg_iterations <= c.minres_iterations));
    }
    emit_comparison(cmp, "csv", "cmp.csv");
    const std::string csv = slurp("cmp.csv");
    CHECK(csv.rfind("param,value,minres_iterations", 0) == 0);
    std::remove("cmp.csv");
}

TEST_CASE("a failing solve is recorded and the sweep continues") {
    ExperimentConfig cfg = tiny_config();
    cfg.solver = "bpcg";
    cfg.sweep_param = "sigma";
    cfg.sweep_values = {0.2, 0.25};
    cfg.a_override = 1e12;  // destroys H-positivity instantly
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(!r.converged);
        CHECK(!r.error.empty());
    }
}

TEST_CASE("single run produces moments and residual histories") {
    ExperimentConfig cfg = tiny_config();
    cfg.solver = "bpcg";
    cfg.record_history = true;
    const SingleRunResult res = run_single(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].converged);
    REQUIRE(!res.reports.empty());
    CHECK(!res.reports[0].rel_residuals.empty());
    CHECK(res.moments.coords.size() == 121);

    export_residual_history(res.reports[0], "hist.csv");
    const std::string csv = slurp("hist.csv");
    CHECK(csv.rfind("iter,rel_resid\n", 0) == 0);
    std::remove("hist.csv");
}
