#include "sgstokes/multigrid.hpp"

#include <algorithm>
#include <cmath>

#include "p2_shapes.hpp"
#include "sgstokes/assembly.hpp"
#include "sgstokes/errors.hpp"

namespace sgstokes {

namespace {

// Interpolation of coarse P2 basis functions at fine dof coordinates.
// Both meshes are structured, so the containing coarse triangle comes from
// cell arithmetic; points on the cell diagonal may land in either half,
// continuity of P2 makes the value independent of the choice.
SparseMatrix p2_prolongation_full(const TaylorHoodSpace& fine, const TaylorHoodSpace& coarse) {
    const TriMesh& cm = *coarse.mesh;
    const int n = cm.cells_per_side;
    const double H = cm.h;
    std::vector<Triplet> trips;
    for (int f = 0; f < fine.n_u; ++f) {
        const Eigen::Vector2d pt = fine.dof_coords[f];
        int ci = static_cast<int>(std::floor((pt.x() + 0.5) / H));
        int cj = static_cast<int>(std::floor((pt.y() + 0.5) / H));
        ci = std::clamp(ci, 0, n - 1);
        cj = std::clamp(cj, 0, n - 1);
        const double xi = (pt.x() + 0.5) / H - ci;
        const double eta = (pt.y() + 0.5) / H - cj;
        const int cell = cj * n + ci;
        double z[3];
        int tri;
        if (xi >= eta) {  // lower-right half (v00, v10, v11)
            tri = 2 * cell;
            z[0] = 1.0 - xi;
            z[1] = xi - eta;
            z[2] = eta;
        } else {  // upper-left half (v00, v11, v01)
            tri = 2 * cell + 1;
            z[0] = 1.0 - eta;
            z[1] = xi;
            z[2] = eta - xi;
        }
        double N[6];
        detail::p2_shape(z, N);
        const auto dofs = detail::element_scalar_dofs(cm, tri);
        for (int l = 0; l < 6; ++l) {
            if (std::abs(N[l]) > 1e-13) trips.emplace_back(f, dofs[l], N[l]);
        }
    }
    SparseMatrix P(fine.n_u, coarse.n_u);
    P.setFromTriplets(trips.begin(), trips.end());
    return P;
}

}  // namespace

MGHierarchy::MGHierarchy(std::shared_ptr<const TaylorHoodSpace> finest, int smooth_sweeps)
    : sweeps_(smooth_sweeps) {
    if (smooth_sweeps < 1) throw ConfigError("smoothing sweeps must be >= 1");

    std::vector<std::shared_ptr<const TaylorHoodSpace>> spaces{finest};
    for (auto mesh = finest->mesh->parent; mesh; mesh = mesh->parent) {
        spaces.push_back(std::make_shared<TaylorHoodSpace>(build_spaces(mesh)));
    }
    std::reverse(spaces.begin(), spaces.end());  // coarsest first

    levels_.resize(spaces.size());
    for (std::size_t l = 0; l < spaces.size(); ++l) {
        levels_[l].space = spaces[l];
        LaplacianAssembler assembler(*spaces[l]);
        SparseMatrix full = assembler.assemble_scalar([](double, double) { return 1.0; });
        levels_[l].A = submatrix(full, spaces[l]->free_scalar, spaces[l]->free_scalar);
        if (l > 0) {
            SparseMatrix P = p2_prolongation_full(*spaces[l], *spaces[l - 1]);
            levels_[l].P = submatrix(P, spaces[l]->free_scalar, spaces[l - 1]->free_scalar);
            levels_[l].R = SparseMatrix(levels_[l].P.transpose());
        }
    }
    coarse_solver_.compute(Eigen::SparseMatrix<double>(levels_[0].A));
    if (coarse_solver_.info() != Eigen::Success) {
        throw Error("coarse-level factorization failed");
    }
}

void MGHierarchy::gauss_seidel(const SparseMatrix& A, Vector& x, const Vector& b,
                               bool forward) const {
    const int n = static_cast<int>(A.rows());
    const int* outer = A.outerIndexPtr();
    const int* inner = A.innerIndexPtr();
    const double* vals = A.valuePtr();
    for (int step = 0; step < n; ++step) {
        const int i = forward ? step : n - 1 - step;
        double sum = b[i];
        double diag = 0.0;
        for (int s = outer[i]; s < outer[i + 1]; ++s) {
            const int j = inner[s];
            if (j == i) {
                diag = vals[s];
            } else {
                sum -= vals[s] * x[j];
            }
        }
        x[i] = sum / diag;
    }
}

void MGHierarchy::cycle(std::size_t l, const Vector& r, Vector& z) const {
    if (l == 0) {
        z = coarse_solver_.solve(r);
        return;
    }
    const Level& lev = levels_[l];
    z.setZero();
    for (int s = 0; s < sweeps_; ++s) gauss_seidel(lev.A, z, r, true);
    Vector resid = r - lev.A * z;
    Vector rc = lev.R * resid;
    Vector zc(rc.size());
    cycle(l - 1, rc, zc);
    z += lev.P * zc;
    for (int s = 0; s < sweeps_; ++s) gauss_seidel(lev.A, z, r, false);
}

void MGHierarchy::vcycle(const Vector& r, Vector& z) const {
    if (r.size() != finest_free_dofs()) {
        throw ConfigError("V-cycle input has wrong dimension");
    }
    z.resize(r.size());
    cycle(levels_.size() - 1, r, z);
}

Vector MGHierarchy::vcycle(const Vector& r) const {
    Vector z;
    vcycle(r, z);
    return z;
}

Eigen::MatrixXd dense_vcycle_matrix(const MGHierarchy& mg, int dim_cap) {
    const int n = mg.finest_free_dofs();
    if (n > dim_cap) {
        throw ResourceError("V-cycle matricization of dimension " + std::to_string(n) +
                            " exceeds cap " + std::to_string(dim_cap));
    }
    Eigen::MatrixXd W(n, n);
    Vector e = Vector::Zero(n), col(n);
    for (int i = 0; i < n; ++i) {
        e[i] = 1.0;
        mg.vcycle(e, col);
        W.col(i) = col;
        e[i] = 0.0;
    }
    return W;
}

}  // namespace sgstokes
