#include "sgstokes/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sgstokes/errors.hpp"

namespace sgstokes {

void ExperimentConfig::validate() const {
    if (M < 1 || M > max_M) throw ConfigError("M out of range [1, " + std::to_string(max_M) + "]");
    if (k < 0 || k > max_k) throw ConfigError("k out of range [0, " + std::to_string(max_k) + "]");
    if (mesh_level < 0 || mesh_level > max_level) {
        throw ConfigError("mesh_level out of range [0, " + std::to_string(max_level) + "]");
    }
    if (sigma_mu < 0.0) throw ConfigError("sigma_mu must be >= 0");
    if (b1 <= 0.0 || b2 <= 0.0) throw ConfigError("correlation lengths must be positive");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
    if (tol <= 0.0) throw ConfigError("tol must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (solver != "minres" && solver != "bpcg" && solver != "both") {
        throw ConfigError("solver must be minres, bpcg or both");
    }
    if (!precon_kind.empty() && precon_kind != "diag" && precon_kind != "tri") {
        throw ConfigError("precon.kind must be diag or tri");
    }
    if (astar_level != "level0" && astar_level != "same") {
        throw ConfigError("astar_level must be level0 or same");
    }
    const bool has_param = sweep_param != "none";
    if (has_param && sweep_values.empty()) {
        throw ConfigError("sweep.param set but sweep.values empty");
    }
    if (!has_param && !sweep_values.empty()) {
        throw ConfigError("sweep.values set without sweep.param");
    }
    static const char* known[] = {"none", "a_over_astar", "h", "level", "M", "k", "sigma"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* s) { return sweep_param == s; }) == std::end(known)) {
        throw ConfigError("unknown sweep parameter: " + sweep_param);
    }
}

namespace {

int closest_dyadic_level(double h, int max_level) {
    int best = 0;
    double best_err = std::abs(0.1 - h);
    for (int l = 1; l <= max_level; ++l) {
        const double err = std::abs(0.1 / (1 << l) - h);
        if (err < best_err) {
            best_err = err;
            best = l;
        }
    }
    return best;
}

}  // namespace

int ExperimentConfig::effective_level() const {
    if (h) return closest_dyadic_level(*h, max_level);
    if (full_scale) return closest_dyadic_level(0.01, max_level);
    return mesh_level;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("boolean expected for " + key + ", got '" + v + "'");
}

std::vector<double> parse_list(std::string v) {
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    std::vector<double> out;
    double x;
    while (in >> x) out.push_back(x);
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "mesh_level") cfg.mesh_level = std::stoi(val);
        else if (key == "h") cfg.h = std::stod(val);
        else if (key == "full") cfg.full_scale = parse_bool(val, key);
        else if (key == "M") cfg.M = std::stoi(val);
        else if (key == "k") cfg.k = std::stoi(val);
        else if (key == "sigma_mu") cfg.sigma_mu = std::stod(val);
        else if (key == "b1") cfg.b1 = std::stod(val);
        else if (key == "b2") cfg.b2 = std::stod(val);
        else if (key == "mu0") cfg.mu0 = std::stod(val);
        else if (key == "solver") cfg.solver = val;
        else if (key == "precon.kind") cfg.precon_kind = val;
        else if (key == "kappa" || key == "precon.kappa") cfg.kappa = std::stod(val);
        else if (key == "a_override" || key == "precon.a_override") cfg.a_override = std::stod(val);
        else if (key == "tol") cfg.tol = std::stod(val);
        else if (key == "max_iter") cfg.max_iter = std::stoi(val);
        else if (key == "mg.smooth_sweeps") cfg.smooth_sweeps = std::stoi(val);
        else if (key == "project_constants") cfg.project_constants = parse_bool(val, key);
        else if (key == "record_history") cfg.record_history = parse_bool(val, key);
        else if (key == "astar_level") cfg.astar_level = val;
        else if (key == "sweep.param") cfg.sweep_param = val;
        else if (key == "sweep.values") cfg.sweep_values = parse_list(val);
        else if (key == "out") cfg.out_dir = val;
        else if (key == "max_k") cfg.max_k = std::stoi(val);
        else if (key == "max_M") cfg.max_M = std::stoi(val);
        else if (key == "max_level") cfg.max_level = std::stoi(val);
        else throw ConfigError("unknown config key: " + key);
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

/// All pieces of one assembled system; rebuilt lazily when the swept
/// parameter invalidates the signature.
struct System {
    std::shared_ptr<const TaylorHoodSpace> space;
    std::shared_ptr<const KLField> field;
    SGBasis basis;
    std::unique_ptr<SGFEOperator> op;
    std::shared_ptr<const MGHierarchy> mg;
    SGVector rhs;
    double a_star = 0.0;
    bool a_star_valid = false;

    // signature
    int level = -1, M = -1, k = -1, sweeps = -1;
    double sigma = -1.0, b1 = 0.0, b2 = 0.0, mu0 = 0.0;
};

void ensure_system(System& sys, const ExperimentConfig& cfg, int level) {
    const bool mesh_dirty = (sys.level != level || sys.sweeps != cfg.smooth_sweeps);
    const bool field_dirty = (sys.M != cfg.M || sys.sigma != cfg.sigma_mu || sys.b1 != cfg.b1 ||
                              sys.b2 != cfg.b2 || sys.mu0 != cfg.mu0);
    const bool basis_dirty = (sys.M != cfg.M || sys.k != cfg.k);
    if (!mesh_dirty && !field_dirty && !basis_dirty && sys.op) return;

    if (mesh_dirty || !sys.space) {
        auto mesh = build_mesh(level);
        sys.space = std::make_shared<TaylorHoodSpace>(build_spaces(mesh));
        sys.mg = std::make_shared<MGHierarchy>(sys.space, cfg.smooth_sweeps);
    }
    if (field_dirty || !sys.field) {
        sys.field = std::make_shared<KLField>(
            build_2d_kle(cfg.b1, cfg.b2, cfg.sigma_mu, cfg.M, cfg.mu0));
    }
    if (basis_dirty || sys.basis.size() == 0) {
        sys.basis = build_basis(cfg.M, cfg.k);
    }
    sys.op = std::make_unique<SGFEOperator>(build_operator(sys.space, sys.field, sys.basis));
    sys.rhs = build_rhs(*sys.op, lift_boundary(*sys.space));
    sys.a_star_valid = false;

    sys.level = level;
    sys.M = cfg.M;
    sys.k = cfg.k;
    sys.sweeps = cfg.smooth_sweeps;
    sys.sigma = cfg.sigma_mu;
    sys.b1 = cfg.b1;
    sys.b2 = cfg.b2;
    sys.mu0 = cfg.mu0;
}

double compute_a_star(System& sys, const ExperimentConfig& cfg) {
    if (sys.a_star_valid) return sys.a_star;
    const SGFEOperator* pencil_op = sys.op.get();
    const MGHierarchy* pencil_mg = sys.mg.get();
    std::unique_ptr<SGFEOperator> op0;
    std::shared_ptr<const MGHierarchy> mg0;
    if (cfg.astar_level == "level0" && sys.level != 0) {
        // estimate on the coarsest mesh but with the full stochastic
        // dimension of the target problem
        auto mesh0 = build_mesh(0);
        auto space0 = std::make_shared<TaylorHoodSpace>(build_spaces(mesh0));
        op0 = std::make_unique<SGFEOperator>(build_operator(space0, sys.field, sys.basis));
        mg0 = std::make_shared<MGHierarchy>(space0, cfg.smooth_sweeps);
        pencil_op = op0.get();
        pencil_mg = mg0.get();
    }
    LinOp A = [pencil_op](const Vector& x, Vector& y) { pencil_op->apply_velocity_block(x, y); };
    LinOp W = [pencil_op, pencil_mg](const Vector& x, Vector& y) {
        y.resize(x.size());
        Vector z(pencil_op->n_free);
        for (int mode = 0; mode < pencil_op->N_z; ++mode) {
            for (int c = 0; c < 2; ++c) {
                pencil_mg->vcycle(pencil_op->u_mode(x, mode, c), z);
                pencil_op->u_mode(y, mode, c) = z;
            }
        }
    };
    const EigEstimate est = estimate_extreme_eigs(A, W, pencil_op->dim_u());
    sys.a_star = est.lambda_min;
    sys.a_star_valid = true;
    return sys.a_star;
}

SolverConfig make_solver_config(const ExperimentConfig& cfg) {
    SolverConfig sc;
    sc.tol = cfg.tol;
    sc.max_iter = cfg.max_iter;
    sc.record_history = cfg.record_history;
    sc.project_pressure_constants = cfg.project_constants;
    return sc;
}

ExperimentRow solve_one(System& sys, const ExperimentConfig& cfg, const std::string& solver,
                        const std::string& param, double value, double a_scale,
                        SolveReport* report_out, SGVector* solution_out = nullptr) {
    ExperimentRow row;
    row.param = param;
    row.value = value;
    row.solver = solver;
    row.dofs = sys.op->dim();
    try {
        const SolverConfig sc = make_solver_config(cfg);
        std::pair<SGVector, SolveReport> result;
        if (solver == "minres") {
            BlockPrecon P = make_block_diag(*sys.op, sys.mg);
            result = minres_solve(*sys.op, P, sys.rhs, sc);
        } else {
            double a;
            if (cfg.a_override) {
                a = *cfg.a_override;
            } else {
                row.a_star = compute_a_star(sys, cfg);
                a = a_scale * row.a_star;
            }
            BlockPrecon P = make_block_tri(*sys.op, sys.mg, a);
            result = bpcg_solve(*sys.op, P, sys.rhs, sc);
        }
        row.iterations = result.second.iterations;
        row.converged = result.second.converged;
        row.wall_time = result.second.wall_time;
        if (report_out) *report_out = result.second;
        if (solution_out) *solution_out = std::move(result.first);
    } catch (const Error& e) {
        row.error = e.what();
        row.converged = false;
    }
    return row;
}

void apply_sweep_value(ExperimentConfig& cfg, const std::string& param, double v) {
    if (param == "h") {
        cfg.h = v;
    } else if (param == "level") {
        cfg.mesh_level = static_cast<int>(std::llround(v));
        cfg.h.reset();
        cfg.full_scale = false;
    } else if (param == "M") {
        cfg.M = static_cast<int>(std::llround(v));
    } else if (param == "k") {
        cfg.k = static_cast<int>(std::llround(v));
    } else if (param == "sigma") {
        cfg.sigma_mu = v;
    }
    // a_over_astar only rescales the preconditioner, not the system
}

double reported_value(const ExperimentConfig& cfg, const std::string& param, double v) {
    if (param == "h") return 0.1 / (1 << cfg.effective_level());  // actual dyadic spacing
    return v;
}

}  // namespace

std::vector<ExperimentRow> run_sweep(const ExperimentConfig& base) {
    base.validate();
    std::vector<ExperimentRow> rows;
    System sys;
    const std::vector<double> values =
        base.sweep_param == "none" ? std::vector<double>{0.0} : base.sweep_values;
    for (double v : values) {
        ExperimentConfig cfg = base;
        apply_sweep_value(cfg, base.sweep_param, v);
        cfg.validate();
        const double a_scale = base.sweep_param == "a_over_astar" ? v : cfg.kappa;
        const double rv = reported_value(cfg, base.sweep_param, v);
        ensure_system(sys, cfg, cfg.effective_level());
        if (base.solver == "both" || base.solver == "minres") {
            rows.push_back(solve_one(sys, cfg, "minres", base.sweep_param, rv, a_scale, nullptr));
        }
        if (base.solver == "both" || base.solver == "bpcg") {
            rows.push_back(solve_one(sys, cfg, "bpcg", base.sweep_param, rv, a_scale, nullptr));
        }
    }
    return rows;
}

std::vector<ComparisonRow> pair_comparison(const std::vector<ExperimentRow>& rows) {
    std::vector<ComparisonRow> out;
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
        const ExperimentRow& mr = rows[i];
        const ExperimentRow& bp = rows[i + 1];
        if (mr.solver != "minres" || bp.solver != "bpcg") {
            throw ConfigError("comparison pairing expects alternating minres/bpcg rows");
        }
        ComparisonRow c;
        c.param = mr.param;
        c.value = mr.value;
        c.minres_iterations = mr.iterations;
        c.bpcg_iterations = bp.iterations;
        c.both_converged = mr.converged && bp.converged;
        c.bpcg_le_minres = c.both_converged && bp.iterations <= mr.iterations;
        c.a_star = bp.a_star;
        c.dofs = mr.dofs;
        out.push_back(c);
    }
    return out;
}

std::vector<ComparisonRow> compare_solvers(const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    cfg.solver = "both";
    return pair_comparison(run_sweep(cfg));
}

SingleRunResult run_single(const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    cfg.sweep_param = "none";
    cfg.sweep_values.clear();
    cfg.validate();
    SingleRunResult res;
    System sys;
    ensure_system(sys, cfg, cfg.effective_level());
    const Vector w0 = lift_boundary(*sys.space);
    SGVector last_solution = sys.op->zero_vector();
    auto run = [&](const std::string& solver) {
        SolveReport rep;
        ExperimentRow row = solve_one(sys, cfg, solver, "none", 0.0, cfg.kappa, &rep,
                                      &last_solution);
        res.rows.push_back(row);
        res.reports.push_back(rep);
    };
    if (cfg.solver == "both" || cfg.solver == "minres") run("minres");
    if (cfg.solver == "both" || cfg.solver == "bpcg") run("bpcg");
    res.moments = postprocess_moments(*sys.op, last_solution, w0);
    return res;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void emit_report(const std::vector<ExperimentRow>& rows, const std::string& format,
                 const std::string& path, bool include_timing) {
    if (rows.empty()) throw ConfigError("refusing to emit an empty report");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    const bool md = format == "markdown";
    if (!md && format != "csv") throw ConfigError("report format must be csv or markdown");

    std::vector<std::string> header = {"param", "value", "solver", "iterations",
                                       "converged", "a_star", "dofs"};
    if (include_timing) header.push_back("wall_time_s");
    auto emit_line = [&](const std::vector<std::string>& cells) {
        if (md) {
            out << "|";
            for (const auto& c : cells) out << " " << c << " |";
            out << "\n";
        } else {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out << cells[i] << (i + 1 < cells.size() ? "," : "");
            }
            out << "\n";
        }
    };
    emit_line(header);
    if (md) {
        std::vector<std::string> rule(header.size(), "---");
        emit_line(rule);
    }
    for (const auto& r : rows) {
        std::vector<std::string> cells = {r.param,
                                          fmt_double(r.value),
                                          r.solver,
                                          std::to_string(r.iterations),
                                          r.converged ? "true" : "false",
                                          fmt_double(r.a_star),
                                          std::to_string(r.dofs)};
        if (include_timing) cells.push_back(fmt_double(r.wall_time));
        emit_line(cells);
    }
}

void emit_comparison(const std::vector<ComparisonRow>& rows, const std::string& format,
                     const std::string& path) {
    if (rows.empty()) throw ConfigError("refusing to emit an empty report");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    const bool md = format == "markdown";
    if (!md && format != "csv") throw ConfigError("report format must be csv or markdown");
    const char* header = "param,value,minres_iterations,bpcg_iterations,both_converged,"
                         "bpcg_le_minres,a_star,dofs";
    if (md) {
        out << "| param | value | minres_iterations | bpcg_iterations | both_converged | "
               "bpcg_le_minres | a_star | dofs |\n";
        out << "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
    } else {
        out << header << "\n";
    }
    for (const auto& r : rows) {
        std::vector<std::string> cells = {r.param,
                                          fmt_double(r.value),
                                          std::to_string(r.minres_iterations),
                                          std::to_string(r.bpcg_iterations),
                                          r.both_converged ? "true" : "false",
                                          r.bpcg_le_minres ? "true" : "false",
                                          fmt_double(r.a_star),
                                          std::to_string(r.dofs)};
        if (md) {
            out << "|";
            for (const auto& c : cells) out << " " << c << " |";
            out << "\n";
        } else {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out << cells[i] << (i + 1 < cells.size() ? "," : "");
            }
            out << "\n";
        }
    }
}

void export_residual_history(const SolveReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "iter,rel_resid\n";
    const auto& hist =
        rep.rel_residuals.size() >= rep.precond_residuals.size() ? rep.rel_residuals
                                                                 : rep.precond_residuals;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        out << (i + 1) << "," << fmt_double(hist[i]) << "\n";
    }
}

}  // namespace sgstokes
