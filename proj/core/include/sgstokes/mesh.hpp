#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace sgstokes {

/// Uniform criss-cross triangulation of the unit square [-0.5,0.5]^2.
///
/// Level L has grid spacing h = 0.1 / 2^L; every square cell is split into
/// two triangles by the diagonal running from its lower-left to its
/// upper-right corner, so the mesh at level L+1 is an exact uniform
/// refinement of the mesh at level L.
struct TriMesh {
    int level = 0;
    double h = 0.1;
    int cells_per_side = 10;

    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;       // ccw vertex triples
    std::vector<std::array<int, 2>> edges;           // (vmin, vmax), lexicographic
    std::vector<Eigen::Vector2d> edge_midpoints;
    std::vector<std::array<int, 3>> triangle_edges;  // local edges 01, 12, 20

    std::vector<int> boundary_vertex_ids;
    std::vector<int> boundary_edge_ids;
    std::vector<std::uint8_t> vertex_on_boundary;
    std::vector<std::uint8_t> edge_on_boundary;

    std::shared_ptr<const TriMesh> parent;  // next-coarser mesh, null at level 0

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }

    double triangle_area(int t) const;
};

/// Builds the level-L mesh with parent links down to level 0.
/// Throws ResourceError when the vertex+edge count would exceed `dof_cap`.
std::shared_ptr<const TriMesh> build_mesh(int level, long dof_cap = 4000000);

}  // namespace sgstokes
