#include "sgstokes/taylor_hood.hpp"

namespace sgstokes {

TaylorHoodSpace build_spaces(std::shared_ptr<const TriMesh> mesh) {
    TaylorHoodSpace sp;
    sp.mesh = mesh;
    sp.n_p = mesh->n_vertices();
    sp.n_u = mesh->n_vertices() + mesh->n_edges();

    sp.dof_coords.reserve(sp.n_u);
    for (const auto& v : mesh->vertices) sp.dof_coords.push_back(v);
    for (const auto& m : mesh->edge_midpoints) sp.dof_coords.push_back(m);

    sp.scalar_on_boundary.assign(sp.n_u, 0);
    for (int v = 0; v < mesh->n_vertices(); ++v)
        sp.scalar_on_boundary[v] = mesh->vertex_on_boundary[v];
    for (int e = 0; e < mesh->n_edges(); ++e)
        sp.scalar_on_boundary[mesh->n_vertices() + e] = mesh->edge_on_boundary[e];

    const double lid_tol = 0.25 * mesh->h;
    for (int s = 0; s < sp.n_u; ++s) {
        if (sp.scalar_on_boundary[s]) {
            sp.dirichlet_scalar.push_back(s);
            if (std::abs(sp.dof_coords[s].y() - 0.5) < lid_tol) sp.lid_scalar.push_back(s);
        } else {
            sp.free_scalar.push_back(s);
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (int s : sp.dirichlet_scalar) sp.dirichlet_dofs.push_back(c * sp.n_u + s);
        for (int s : sp.lid_scalar) sp.lid_dofs.push_back(c * sp.n_u + s);
    }
    return sp;
}

Vector lift_boundary(const TaylorHoodSpace& space) {
    Vector w0 = Vector::Zero(space.velocity_dofs());
    for (int s : space.lid_scalar) {
        const double x = space.dof_coords[s].x();
        w0[s] = 1.0 - 16.0 * x * x * x * x;  // vanishes at the corners x = +-0.5
    }
    return w0;
}

}  // namespace sgstokes
