#pragma once

#include <functional>
#include <span>

#include "sgstokes/sparse.hpp"
#include "sgstokes/taylor_hood.hpp"

namespace sgstokes {

/// 6-point degree-4 rule on the reference triangle; weights are area fractions.
struct TriQuadrature {
    static constexpr int n_points = 6;
    static const double bary[n_points][3];
    static const double weights[n_points];
};

using ScalarField = std::function<double(double, double)>;

/// Precomputed quadrature geometry for repeated weighted-Laplacian assembly.
///
/// The q-th weighted scalar stiffness matrix only depends on the weight values
/// at the fixed quadrature points, so the gradient products and the sparsity
/// pattern are computed once and reused for every coefficient function.
class LaplacianAssembler {
public:
    explicit LaplacianAssembler(const TaylorHoodSpace& space);

    int n_quad_points() const { return static_cast<int>(quad_points_.size()); }
    const std::vector<Eigen::Vector2d>& quad_points() const { return quad_points_; }

    /// Scalar n_u x n_u stiffness with weight values given per quadrature
    /// point, ordered element-major (element * 6 + local point).
    SparseMatrix assemble_scalar(std::span<const double> weight_at_qp) const;

    SparseMatrix assemble_scalar(const ScalarField& w) const;

private:
    const TaylorHoodSpace* space_;
    std::vector<Eigen::Vector2d> quad_points_;     // element-major
    std::vector<std::array<int, 6>> element_dofs_;
    // per element, per qp: 21 upper-triangle gradient products scaled by w_q*|T|
    std::vector<std::array<std::array<double, 21>, 6>> grad_products_;
    SparseMatrix pattern_;                          // zero-valued CSR pattern
    std::vector<std::array<int, 36>> slot_of_;      // CSR value slot per (el, 6i+j)
};

/// 2n_u x 2n_u symmetric matrix of w-weighted velocity gradient products,
/// block diagonal over the two components. Dirichlet rows/cols not eliminated.
/// Throws AssemblyError naming the element if a weight evaluates non-finite.
SparseMatrix assemble_weighted_laplacian(const TaylorHoodSpace& space, const ScalarField& w);

/// n_p x 2n_u divergence matrix with entries -int chi_i d(phi_j)/dx_c.
SparseMatrix assemble_divergence(const TaylorHoodSpace& space);

struct PressureMass {
    SparseMatrix M_p;
    SparseMatrix D_p;      // diag(M_p) as a sparse matrix
    Vector D_p_diag;
};

PressureMass assemble_pressure_mass(const TaylorHoodSpace& space);

}  // namespace sgstokes
