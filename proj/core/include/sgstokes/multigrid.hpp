#pragma once

#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "sgstokes/sparse.hpp"
#include "sgstokes/taylor_hood.hpp"

namespace sgstokes {

/// Geometric multigrid hierarchy for the constant-coefficient scalar P2
/// Laplacian on the free (non-Dirichlet) dofs, built on the nested
/// criss-cross meshes down to level 0.
///
/// One V-cycle applies `sweeps` forward Gauss-Seidel pre-smooths and
/// `sweeps` backward Gauss-Seidel post-smooths per level with a direct
/// factorization at the coarsest level; restriction is the transpose of the
/// P2 interpolation, so the induced operator is symmetric positive definite.
/// The vector Laplacian is handled by applying the scalar cycle per
/// component. A depth-1 hierarchy degenerates to the direct coarse solve.
class MGHierarchy {
public:
    struct Level {
        std::shared_ptr<const TaylorHoodSpace> space;
        SparseMatrix A;  // scalar free Laplacian, weight 1
        SparseMatrix P;  // free coarse -> free fine (empty at the coarsest level)
        SparseMatrix R;  // P^T
    };

    MGHierarchy(std::shared_ptr<const TaylorHoodSpace> finest, int smooth_sweeps = 2);

    /// z = Atilde_mg^{-1} r on the finest level's free scalar dofs.
    void vcycle(const Vector& r, Vector& z) const;
    Vector vcycle(const Vector& r) const;

    int depth() const { return static_cast<int>(levels_.size()); }
    int smooth_sweeps() const { return sweeps_; }
    int finest_free_dofs() const { return static_cast<int>(levels_.back().A.rows()); }
    const Level& level(int l) const { return levels_[l]; }

private:
    std::vector<Level> levels_;  // [0] = coarsest
    int sweeps_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> coarse_solver_;

    void cycle(std::size_t l, const Vector& r, Vector& z) const;
    void gauss_seidel(const SparseMatrix& A, Vector& x, const Vector& b, bool forward) const;
};

/// Dense matrix of the V-cycle operator Atilde_mg^{-1} (test scale only).
Eigen::MatrixXd dense_vcycle_matrix(const MGHierarchy& mg, int dim_cap = 20000);

}  // namespace sgstokes
