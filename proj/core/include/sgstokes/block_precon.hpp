#pragma once

#include <memory>

#include "sgstokes/multigrid.hpp"
#include "sgstokes/sgfe_operator.hpp"

namespace sgstokes {

/// Block preconditioner combinators over the FE building blocks (one V-cycle
/// for the velocity block, the pressure mass diagonal for the Schur block)
/// and the mean-based identity on the stochastic side:
///
///   diag:  z_u = Atilde_mg^{-1} r_u mode-wise,  z_p = D_p^{-1} r_p
///   tri:   z_u = (a Atilde_mg)^{-1} r_u,        z_p = S_p^{-1} (B z_u - r_p)
struct BlockPrecon {
    enum class Kind { diag, tri };

    Kind kind = Kind::diag;
    const SGFEOperator* op = nullptr;
    std::shared_ptr<const MGHierarchy> mg;
    double a = 1.0;  // block-triangular scaling, dimensionless

    /// Mode- and component-wise V-cycle on the velocity block (no scaling).
    void apply_Atilde_inv(const Vector& r_u, Vector& z_u) const;

    void apply_inv(const SGVector& r, SGVector& z) const;
    SGVector apply_inv(const SGVector& r) const;
};

BlockPrecon make_block_diag(const SGFEOperator& op, std::shared_ptr<const MGHierarchy> mg);
/// Throws ConfigError unless a > 0.
BlockPrecon make_block_tri(const SGFEOperator& op, std::shared_ptr<const MGHierarchy> mg,
                           double a);

/// Inner-product operator H = [A - a Atilde_mg, 0; 0, I (x) D_p].
///
/// Applying H needs Atilde_mg itself (not its inverse), so the scalar V-cycle
/// is matricized and inverted on construction; intended for desk-scale
/// verification, not for the production solver path.
struct HOperator {
    const SGFEOperator* op = nullptr;
    double a = 1.0;
    Eigen::MatrixXd Atilde_scalar;  // dense inverse of the V-cycle matrix

    SGVector apply(const SGVector& v) const;
    double inner(const SGVector& x, const SGVector& y) const;  // x^T H y
};

HOperator make_h_operator(const SGFEOperator& op, const MGHierarchy& mg, double a,
                          int dim_cap = 20000);

}  // namespace sgstokes
