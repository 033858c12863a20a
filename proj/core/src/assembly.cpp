#include "sgstokes/assembly.hpp"

#include <cmath>

#include "p2_shapes.hpp"
#include "sgstokes/errors.hpp"

namespace sgstokes {

using detail::element_geometry;
using detail::element_scalar_dofs;
using detail::p2_grad_ref;

namespace {
constexpr double kA1 = 0.445948490915965;
constexpr double kA2 = 0.091576213509771;
constexpr double kW1 = 0.223381589678011;
constexpr double kW2 = 0.109951743655322;
}  // namespace

const double TriQuadrature::bary[TriQuadrature::n_points][3] = {
    {1.0 - 2.0 * kA1, kA1, kA1}, {kA1, 1.0 - 2.0 * kA1, kA1}, {kA1, kA1, 1.0 - 2.0 * kA1},
    {1.0 - 2.0 * kA2, kA2, kA2}, {kA2, 1.0 - 2.0 * kA2, kA2}, {kA2, kA2, 1.0 - 2.0 * kA2}};
const double TriQuadrature::weights[TriQuadrature::n_points] = {kW1, kW1, kW1, kW2, kW2, kW2};

LaplacianAssembler::LaplacianAssembler(const TaylorHoodSpace& space) : space_(&space) {
    const TriMesh& mesh = *space.mesh;
    const int nt = mesh.n_triangles();
    quad_points_.reserve(static_cast<std::size_t>(nt) * TriQuadrature::n_points);
    element_dofs_.reserve(nt);
    grad_products_.resize(nt);

    std::vector<Triplet> pattern_trips;
    for (int t = 0; t < nt; ++t) {
        const auto geo = element_geometry(mesh, t);
        if (!(geo.area > 0.0)) {
            throw AssemblyError("non-positive area in element " + std::to_string(t));
        }
        element_dofs_.push_back(element_scalar_dofs(mesh, t));
        const auto& tri = mesh.triangles[t];
        for (int p = 0; p < TriQuadrature::n_points; ++p) {
            const double* z = TriQuadrature::bary[p];
            quad_points_.push_back(z[0] * mesh.vertices[tri[0]] + z[1] * mesh.vertices[tri[1]] +
                                   z[2] * mesh.vertices[tri[2]]);
            double Gr[6][2];
            p2_grad_ref(z, Gr);
            Eigen::Vector2d g[6];
            for (int i = 0; i < 6; ++i) {
                g[i] = geo.jac_inv_t * Eigen::Vector2d(Gr[i][0], Gr[i][1]);
            }
            const double scale = TriQuadrature::weights[p] * geo.area;
            int k = 0;
            for (int i = 0; i < 6; ++i) {
                for (int j = i; j < 6; ++j) {
                    grad_products_[t][p][k++] = scale * g[i].dot(g[j]);
                }
            }
        }
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                pattern_trips.emplace_back(element_dofs_[t][i], element_dofs_[t][j], 0.0);
            }
        }
    }

    pattern_ = SparseMatrix(space.n_u, space.n_u);
    pattern_.setFromTriplets(pattern_trips.begin(), pattern_trips.end());
    pattern_.makeCompressed();

    // Map each (element, i, j) pair to its CSR value slot for fast accumulation.
    slot_of_.resize(nt);
    const int* outer = pattern_.outerIndexPtr();
    const int* inner = pattern_.innerIndexPtr();
    auto find_slot = [&](int r, int c) {
        for (int s = outer[r]; s < outer[r + 1]; ++s) {
            if (inner[s] == c) return s;
        }
        throw Error("internal: missing pattern slot");
    };
    for (int t = 0; t < nt; ++t) {
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                slot_of_[t][6 * i + j] = find_slot(element_dofs_[t][i], element_dofs_[t][j]);
            }
        }
    }
}

SparseMatrix LaplacianAssembler::assemble_scalar(std::span<const double> weight_at_qp) const {
    SparseMatrix out = pattern_;
    double* vals = out.valuePtr();
    const int nt = static_cast<int>(element_dofs_.size());
    for (int t = 0; t < nt; ++t) {
        double local[21] = {};
        for (int p = 0; p < TriQuadrature::n_points; ++p) {
            const double w = weight_at_qp[static_cast<std::size_t>(t) * 6 + p];
            if (!std::isfinite(w)) {
                throw AssemblyError("non-finite weight in element " + std::to_string(t));
            }
            const auto& gp = grad_products_[t][p];
            for (int k = 0; k < 21; ++k) local[k] += w * gp[k];
        }
        int k = 0;
        for (int i = 0; i < 6; ++i) {
            for (int j = i; j < 6; ++j, ++k) {
                vals[slot_of_[t][6 * i + j]] += local[k];
                if (j != i) vals[slot_of_[t][6 * j + i]] += local[k];
            }
        }
    }
    return out;
}

SparseMatrix LaplacianAssembler::assemble_scalar(const ScalarField& w) const {
    std::vector<double> wq(quad_points_.size());
    for (std::size_t i = 0; i < quad_points_.size(); ++i) {
        wq[i] = w(quad_points_[i].x(), quad_points_[i].y());
    }
    return assemble_scalar(wq);
}

SparseMatrix assemble_weighted_laplacian(const TaylorHoodSpace& space, const ScalarField& w) {
    LaplacianAssembler assembler(space);
    SparseMatrix scalar = assembler.assemble_scalar(w);

    std::vector<Triplet> trips;
    trips.reserve(2 * scalar.nonZeros());
    for (int r = 0; r < scalar.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(scalar, r); it; ++it) {
            trips.emplace_back(r, it.col(), it.value());
            trips.emplace_back(space.n_u + r, space.n_u + it.col(), it.value());
        }
    }
    SparseMatrix out(space.velocity_dofs(), space.velocity_dofs());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SparseMatrix assemble_divergence(const TaylorHoodSpace& space) {
    const TriMesh& mesh = *space.mesh;
    std::vector<Triplet> trips;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto geo = element_geometry(mesh, t);
        const auto dofs = element_scalar_dofs(mesh, t);
        const auto& tri = mesh.triangles[t];
        double local[3][6][2] = {};
        for (int p = 0; p < TriQuadrature::n_points; ++p) {
            const double* z = TriQuadrature::bary[p];
            double Gr[6][2];
            p2_grad_ref(z, Gr);
            const double scale = TriQuadrature::weights[p] * geo.area;
            for (int j = 0; j < 6; ++j) {
                const Eigen::Vector2d g =
                    geo.jac_inv_t * Eigen::Vector2d(Gr[j][0], Gr[j][1]);
                for (int i = 0; i < 3; ++i) {
                    local[i][j][0] -= scale * z[i] * g.x();
                    local[i][j][1] -= scale * z[i] * g.y();
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 6; ++j) {
                trips.emplace_back(tri[i], dofs[j], local[i][j][0]);
                trips.emplace_back(tri[i], space.n_u + dofs[j], local[i][j][1]);
            }
        }
    }
    SparseMatrix B(space.n_p, space.velocity_dofs());
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

PressureMass assemble_pressure_mass(const TaylorHoodSpace& space) {
    const TriMesh& mesh = *space.mesh;
    std::vector<Triplet> trips;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto geo = element_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int p = 0; p < TriQuadrature::n_points; ++p) {
            const double* z = TriQuadrature::bary[p];
            const double scale = TriQuadrature::weights[p] * geo.area;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    trips.emplace_back(tri[i], tri[j], scale * z[i] * z[j]);
                }
            }
        }
    }
    PressureMass pm;
    pm.M_p = SparseMatrix(space.n_p, space.n_p);
    pm.M_p.setFromTriplets(trips.begin(), trips.end());
    pm.D_p_diag = pm.M_p.diagonal();

    std::vector<Triplet> dtrips;
    dtrips.reserve(space.n_p);
    for (int i = 0; i < space.n_p; ++i) dtrips.emplace_back(i, i, pm.D_p_diag[i]);
    pm.D_p = SparseMatrix(space.n_p, space.n_p);
    pm.D_p.setFromTriplets(dtrips.begin(), dtrips.end());
    return pm;
}

}  // namespace sgstokes
