#include "sgstokes/mesh.hpp"

#include <algorithm>
#include <map>

#include "sgstokes/errors.hpp"

namespace sgstokes {

double TriMesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const Eigen::Vector2d a = vertices[tri[0]];
    const Eigen::Vector2d b = vertices[tri[1]];
    const Eigen::Vector2d c = vertices[tri[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

namespace {

std::shared_ptr<TriMesh> build_single_level(int level) {
    auto mesh = std::make_shared<TriMesh>();
    mesh->level = level;
    mesh->cells_per_side = 10 << level;
    mesh->h = 0.1 / static_cast<double>(1 << level);

    const int n = mesh->cells_per_side;
    const int nv = n + 1;
    mesh->vertices.reserve(static_cast<std::size_t>(nv) * nv);
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nv; ++i) {
            mesh->vertices.emplace_back(-0.5 + i * mesh->h, -0.5 + j * mesh->h);
        }
    }
    auto vid = [nv](int i, int j) { return j * nv + i; };

    mesh->triangles.reserve(static_cast<std::size_t>(2) * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
            mesh->triangles.push_back({v00, v10, v11});  // lower-right half
            mesh->triangles.push_back({v00, v11, v01});  // upper-left half
        }
    }

    // Lexicographic edge numbering keeps assembly order reproducible.
    std::map<std::array<int, 2>, int> edge_count;
    for (const auto& tri : mesh->triangles) {
        for (int l = 0; l < 3; ++l) {
            const int a = tri[l], b = tri[(l + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    std::map<std::array<int, 2>, int> edge_id;
    mesh->edges.reserve(edge_count.size());
    mesh->edge_midpoints.reserve(edge_count.size());
    mesh->edge_on_boundary.assign(edge_count.size(), 0);
    int next_id = 0;
    for (const auto& [key, count] : edge_count) {
        edge_id[key] = next_id;
        mesh->edges.push_back(key);
        mesh->edge_midpoints.push_back(0.5 * (mesh->vertices[key[0]] + mesh->vertices[key[1]]));
        if (count == 1) {
            mesh->edge_on_boundary[next_id] = 1;
            mesh->boundary_edge_ids.push_back(next_id);
        }
        ++next_id;
    }

    mesh->triangle_edges.reserve(mesh->triangles.size());
    for (const auto& tri : mesh->triangles) {
        std::array<int, 3> te{};
        for (int l = 0; l < 3; ++l) {
            const int a = tri[l], b = tri[(l + 1) % 3];
            te[l] = edge_id.at({std::min(a, b), std::max(a, b)});
        }
        mesh->triangle_edges.push_back(te);
    }

    mesh->vertex_on_boundary.assign(mesh->vertices.size(), 0);
    for (int e : mesh->boundary_edge_ids) {
        mesh->vertex_on_boundary[mesh->edges[e][0]] = 1;
        mesh->vertex_on_boundary[mesh->edges[e][1]] = 1;
    }
    for (int v = 0; v < mesh->n_vertices(); ++v) {
        if (mesh->vertex_on_boundary[v]) mesh->boundary_vertex_ids.push_back(v);
    }
    return mesh;
}

}  // namespace

std::shared_ptr<const TriMesh> build_mesh(int level, long dof_cap) {
    if (level < 0) throw ConfigError("mesh level must be >= 0");
    const long n = 10L << level;
    const long nv = (n + 1) * (n + 1);
    const long ne = 3 * n * n + 2 * n;  // horizontal + vertical + diagonal edges
    if (nv + ne > dof_cap) {
        throw ResourceError("mesh level " + std::to_string(level) + " needs " +
                            std::to_string(nv + ne) + " scalar dofs, cap is " +
                            std::to_string(dof_cap));
    }
    std::shared_ptr<const TriMesh> coarse;
    for (int l = 0; l < level; ++l) {
        auto m = build_single_level(l);
        m->parent = coarse;
        coarse = m;
    }
    auto finest = build_single_level(level);
    finest->parent = coarse;
    return finest;
}

}  // namespace sgstokes
