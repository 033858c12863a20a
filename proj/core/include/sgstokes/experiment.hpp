#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgstokes/krylov.hpp"

namespace sgstokes {

/// One experiment configuration, read from a flat key = value text file.
struct ExperimentConfig {
    int mesh_level = 1;
    bool full_scale = false;        // map the h = 0.01 default set onto the hierarchy
    std::optional<double> h;        // maps to the dyadic level with closest spacing
    int M = 10;
    int k = 1;
    double sigma_mu = 0.2;
    double b1 = 1.0;
    double b2 = 1.0;
    double mu0 = 0.0;
    std::string solver = "both";    // minres | bpcg | both
    std::string precon_kind = "";   // diag | tri; empty = implied by solver
    double kappa = 0.9;
    std::optional<double> a_override;
    double tol = 1e-6;
    int max_iter = 2000;
    int smooth_sweeps = 2;
    bool project_constants = true;
    bool record_history = false;
    std::string astar_level = "level0";  // level0 | same
    std::string sweep_param = "none";    // none | a_over_astar | h | level | M | k | sigma
    std::vector<double> sweep_values;
    std::string out_dir = "results";

    int max_k = 4;
    int max_M = 20;
    int max_level = 4;

    void validate() const;
    /// Resolves h / full_scale to a concrete hierarchy level.
    int effective_level() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct ExperimentRow {
    std::string param;
    double value = 0.0;
    std::string solver;
    int iterations = 0;
    bool converged = false;
    double wall_time = 0.0;
    double a_star = 0.0;  // 0 when not applicable
    long dofs = 0;
    std::string error;    // nonempty when the solve raised
};

struct ComparisonRow {
    std::string param;
    double value = 0.0;
    int minres_iterations = 0;
    int bpcg_iterations = 0;
    bool both_converged = false;
    bool bpcg_le_minres = false;
    double a_star = 0.0;
    long dofs = 0;
};

/// Runs the configured sweep; rebuilds only the components the swept
/// parameter touches. Individual solve failures are recorded in the row and
/// the run continues.
std::vector<ExperimentRow> run_sweep(const ExperimentConfig& cfg);

/// Runs both solvers on identical systems and flags BPCG <= MINRES per row.
std::vector<ComparisonRow> compare_solvers(const ExperimentConfig& cfg);

/// Pairs the minres/bpcg rows of a solver=both sweep into comparison rows.
std::vector<ComparisonRow> pair_comparison(const std::vector<ExperimentRow>& rows);

/// Byte-stable report emission; timing is volatile and therefore excluded
/// unless explicitly requested. Throws on empty input (no file is written).
void emit_report(const std::vector<ExperimentRow>& rows, const std::string& format,
                 const std::string& path, bool include_timing = false);
void emit_comparison(const std::vector<ComparisonRow>& rows, const std::string& format,
                     const std::string& path);

void export_residual_history(const SolveReport& rep, const std::string& path);

/// Full solve of one configuration (no sweep); used by the CLI `run` command.
struct SingleRunResult {
    std::vector<ExperimentRow> rows;           // one per solver
    std::vector<SolveReport> reports;
    MomentFields moments;                      // from the last solver run
};
SingleRunResult run_single(const ExperimentConfig& cfg);

}  // namespace sgstokes
