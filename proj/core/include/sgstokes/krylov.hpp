#pragma once

#include <functional>
#include <map>
#include <utility>

#include "sgstokes/block_precon.hpp"
#include "sgstokes/sgfe_operator.hpp"

namespace sgstokes {

struct SolverConfig {
    double tol = 1e-6;  // relative Euclidean residual target
    int max_iter = 2000;
    bool record_history = false;
    bool project_pressure_constants = true;
    int check_interval = 5;  // true-residual recomputation interval
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> rel_residuals;      // true Euclidean ||b - C w|| / ||b||
    std::vector<double> precond_residuals;  // per-iteration recurrence estimates
    bool converged = false;
    double wall_time = 0.0;  // seconds
    std::map<std::string, double> extra;
};

struct EigEstimate {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int level_used = -1;
    int lanczos_steps = 0;
    double residual = 0.0;  // relative eigenresidual of lambda_min
};

using LinOp = std::function<void(const Vector&, Vector&)>;

/// Extreme eigenvalues of the pencil (A, Atilde) where `Atilde_inv` applies
/// the inverse (e.g. one V-cycle). Lanczos with full reorthogonalization in
/// the Atilde inner product; throws EigEstimateError (carrying the best
/// estimate) when the relative eigenresidual of lambda_min does not reach
/// `tol` within `max_steps`.
EigEstimate estimate_extreme_eigs(const LinOp& A, const LinOp& Atilde_inv, int dim,
                                  double tol = 1e-4, int max_steps = 250);

EigEstimate estimate_lambda_min(const LinOp& A, const LinOp& Atilde_inv, int dim,
                                double tol = 1e-4, int max_steps = 250);

/// Preconditioned MINRES with the block-diagonal preconditioner; exactly one
/// apply of C and one of P^{-1} per iteration. Stops on the recomputed true
/// Euclidean relative residual.
std::pair<SGVector, SolveReport> minres_solve(const SGFEOperator& op, const BlockPrecon& P,
                                              const SGVector& b, const SolverConfig& cfg);

/// Conjugate gradients on P_tri^{-1} C in the inner product induced by
/// H = [A - a Atilde, 0; 0, I (x) D_p], reformulated so the only extra
/// operator work per iteration versus MINRES is one multiplication with B.
/// Throws InnerProductError when positivity of the inner product is lost.
std::pair<SGVector, SolveReport> bpcg_solve(const SGFEOperator& op, const BlockPrecon& P,
                                            const SGVector& b, const SolverConfig& cfg);

/// Unoptimized CG in a supplied inner product, dense and oracle-only:
/// operator M_op must be H_ip-symmetric and H_ip-positive-definite.
struct IPCGResult {
    std::vector<Vector> iterates;  // x_1, x_2, ..., x_n_steps
    int breakdown_step = -1;       // step index of a zero denominator, -1 if none
};

IPCGResult reference_ipcg(const Eigen::MatrixXd& M_op, const Eigen::MatrixXd& H_ip,
                          const Vector& b, int n_steps);

/// Subtracts the per-mode mean of every pressure mode (hydrostatic modes).
void project_pressure_means(const SGFEOperator& op, Vector& p);

}  // namespace sgstokes
