#pragma once

#include <memory>
#include <vector>

#include "sgstokes/mesh.hpp"
#include "sgstokes/sparse.hpp"

namespace sgstokes {

/// Taylor-Hood P2/P1 pair on a TriMesh.
///
/// Scalar P2 dofs are numbered vertices first, then edge midpoints, so
/// n_u = n_vertices + n_edges per velocity component. P1 pressure dofs
/// coincide with the vertices. Velocity dofs are component-major:
/// dof = component * n_u + scalar_dof.
struct TaylorHoodSpace {
    std::shared_ptr<const TriMesh> mesh;
    int n_u = 0;  // scalar velocity dofs per component
    int n_p = 0;

    std::vector<Eigen::Vector2d> dof_coords;   // n_u entries
    std::vector<std::uint8_t> scalar_on_boundary;
    std::vector<int> dirichlet_scalar;         // ascending scalar dof ids on the boundary
    std::vector<int> lid_scalar;               // subset with x2 = 0.5
    std::vector<int> free_scalar;              // complement of dirichlet_scalar

    std::vector<int> dirichlet_dofs;  // velocity dof ids (both components)
    std::vector<int> lid_dofs;        // velocity dof ids on the lid (both components)

    int velocity_dofs() const { return 2 * n_u; }
};

TaylorHoodSpace build_spaces(std::shared_ptr<const TriMesh> mesh);

/// Lifting of the regularized-cavity boundary data: the x-component on the
/// lid x2 = 0.5 is set to 1 - 16 x1^4 at the dof coordinate, every other
/// boundary dof and all interior dofs are zero. Length 2 n_u.
Vector lift_boundary(const TaylorHoodSpace& space);

}  // namespace sgstokes
