#pragma once

// Internal P2/P1 reference-element helpers shared by assembly and multigrid.

#include <Eigen/Dense>
#include <array>

#include "sgstokes/mesh.hpp"

namespace sgstokes::detail {

// Local dofs 0..2: vertices; 3..5: midpoints of edges 01, 12, 20.
inline void p2_shape(const double z[3], double N[6]) {
    N[0] = z[0] * (2.0 * z[0] - 1.0);
    N[1] = z[1] * (2.0 * z[1] - 1.0);
    N[2] = z[2] * (2.0 * z[2] - 1.0);
    N[3] = 4.0 * z[0] * z[1];
    N[4] = 4.0 * z[1] * z[2];
    N[5] = 4.0 * z[2] * z[0];
}

// Gradients w.r.t. (xi, eta) where z0 = 1-xi-eta, z1 = xi, z2 = eta.
inline void p2_grad_ref(const double z[3], double G[6][2]) {
    const double dz[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (int i = 0; i < 3; ++i) {
        G[i][0] = (4.0 * z[i] - 1.0) * dz[i][0];
        G[i][1] = (4.0 * z[i] - 1.0) * dz[i][1];
    }
    const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
    for (int e = 0; e < 3; ++e) {
        G[3 + e][0] = 4.0 * (z[ea[e]] * dz[eb[e]][0] + z[eb[e]] * dz[ea[e]][0]);
        G[3 + e][1] = 4.0 * (z[ea[e]] * dz[eb[e]][1] + z[eb[e]] * dz[ea[e]][1]);
    }
}

struct ElementGeometry {
    Eigen::Matrix2d jac_inv_t;
    double area;
};

inline ElementGeometry element_geometry(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d a = mesh.vertices[tri[0]];
    const Eigen::Vector2d b = mesh.vertices[tri[1]];
    const Eigen::Vector2d c = mesh.vertices[tri[2]];
    Eigen::Matrix2d J;
    J.col(0) = b - a;
    J.col(1) = c - a;
    ElementGeometry g;
    g.area = 0.5 * J.determinant();
    g.jac_inv_t = J.inverse().transpose();
    return g;
}

inline std::array<int, 6> element_scalar_dofs(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const auto& te = mesh.triangle_edges[t];
    const int nv = mesh.n_vertices();
    return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

}  // namespace sgstokes::detail
