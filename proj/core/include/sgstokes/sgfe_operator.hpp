#pragma once

#include <memory>
#include <string>

#include "sgstokes/assembly.hpp"
#include "sgstokes/kle.hpp"
#include "sgstokes/multiindex.hpp"
#include "sgstokes/sg_matrix.hpp"
#include "sgstokes/sparse.hpp"
#include "sgstokes/taylor_hood.hpp"

namespace sgstokes {

/// Coefficient vector of the coupled system. Mode-major layout: all FE dofs
/// of stochastic mode 0, then mode 1, ... Within one velocity mode the two
/// components are stored back to back over the free scalar dofs.
struct SGVector {
    Vector u;  // N_z * 2 * n_free
    Vector p;  // N_z * n_p

    double squared_norm() const { return u.squaredNorm() + p.squaredNorm(); }
    double norm() const { return std::sqrt(squared_norm()); }
    double dot(const SGVector& o) const { return u.dot(o.u) + p.dot(o.p); }
};

/// Matrix-free Kronecker-sum saddle point operator
///   C = [ sum_q G_q (x) A_q ,  I (x) B^T ;  I (x) B , 0 ]
/// with all Dirichlet velocity dofs eliminated. A_q are scalar stiffness
/// blocks shared by the two velocity components; the free x dirichlet
/// couplings are kept for the boundary lifting of the right-hand side.
struct SGFEOperator {
    std::shared_ptr<const TaylorHoodSpace> space;
    std::shared_ptr<const KLField> field;
    SGBasis basis_z;   // solution basis, degree k
    SGBasis basis_nu;  // viscosity basis, degree 2k

    int n_free = 0;  // scalar free dofs per component
    int n_bdry = 0;
    int n_p = 0;
    int N_z = 0;
    int N_nu = 0;

    std::vector<SparseMatrix> A_free;  // N_nu, n_free x n_free
    std::vector<SparseMatrix> A_bdry;  // N_z entries, indexed by solution mode
    std::vector<GMatrix> G;            // N_nu

    SparseMatrix Bx_free, By_free;     // n_p x n_free
    SparseMatrix BxT_free, ByT_free;   // cached transposes
    SparseMatrix Bx_bdry, By_bdry;
    SparseMatrix M_p;
    Vector D_p;

    int dim_u() const { return N_z * 2 * n_free; }
    int dim_p() const { return N_z * n_p; }
    int dim() const { return dim_u() + dim_p(); }

    SGVector zero_vector() const;

    /// y = C x, matrix-free; fixed q-major accumulation order.
    void apply(const SGVector& x, SGVector& y) const;
    SGVector apply(const SGVector& x) const;

    /// Velocity block only: y = (sum_q G_q (x) A_q) x.
    void apply_velocity_block(const Vector& x, Vector& y) const;

    /// Per-mode slices.
    auto u_mode(Vector& u, int mode, int comp) const {
        return u.segment(static_cast<Eigen::Index>(mode) * 2 * n_free + comp * n_free, n_free);
    }
    auto u_mode(const Vector& u, int mode, int comp) const {
        return u.segment(static_cast<Eigen::Index>(mode) * 2 * n_free + comp * n_free, n_free);
    }
    auto p_mode(Vector& p, int mode) const {
        return p.segment(static_cast<Eigen::Index>(mode) * n_p, n_p);
    }
    auto p_mode(const Vector& p, int mode) const {
        return p.segment(static_cast<Eigen::Index>(mode) * n_p, n_p);
    }
};

/// Assembles every weighted Laplacian of the degree-2k viscosity expansion
/// (all N_nu = C(M+2k, 2k) terms retained) plus the divergence and pressure
/// mass blocks, with consistent Dirichlet elimination.
SGFEOperator build_operator(std::shared_ptr<const TaylorHoodSpace> space,
                            std::shared_ptr<const KLField> field, const SGBasis& basis_z);

/// b = -C_full (e_0 (x) w0) restricted to the free dofs; w0 from lift_boundary.
SGVector build_rhs(const SGFEOperator& op, const Vector& w0);

/// Explicit sparse saddle point matrix, identical in action to apply().
/// Oracle only; throws ResourceError above `dim_cap`.
SparseMatrix assemble_explicit(const SGFEOperator& op, int dim_cap = 40000);

/// Flatten/unflatten between SGVector and the explicit-matrix ordering
/// [all velocity modes; all pressure modes].
Vector flatten(const SGFEOperator& op, const SGVector& x);
SGVector unflatten(const SGFEOperator& op, const Vector& x);

/// Per-vertex first and second moments of the chaos solution, with the
/// deterministic boundary data w0 folded into mode 0.
struct MomentFields {
    std::vector<Eigen::Vector2d> coords;  // P1 vertex grid
    std::vector<double> mean_u1, mean_u2, var_u1, var_u2, mean_p, var_p;
};

MomentFields postprocess_moments(const SGFEOperator& op, const SGVector& w, const Vector& w0);

void export_moments_csv(const MomentFields& f, const std::string& path);

}  // namespace sgstokes
