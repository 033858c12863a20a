#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "sgstokes/assembly.hpp"
#include "sgstokes/errors.hpp"
#include "sgstokes/mesh.hpp"
#include "sgstokes/taylor_hood.hpp"

using namespace sgstokes;

TEST_CASE("level-0 mesh counts") {
    auto mesh = build_mesh(0);
    CHECK(mesh->n_vertices() == 121);  // 11 x 11 grid
    CHECK(mesh->n_triangles() == 200);
    CHECK(mesh->h == doctest::Approx(0.1).epsilon(1e-15));
    for (int t = 0; t < mesh->n_triangles(); ++t) {
        CHECK(mesh->triangle_area(t) == doctest::Approx(0.005).epsilon(1e-13));
    }
    CHECK(mesh->parent == nullptr);
}

TEST_CASE("level-1 mesh refines level 0") {
    auto mesh = build_mesh(1);
    CHECK(mesh->h == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(mesh->n_vertices() == 21 * 21);
    REQUIRE(mesh->parent != nullptr);
    CHECK(mesh->parent->level == 0);
    // every fine vertex is a coarse vertex or a coarse edge midpoint
    std::set<std::pair<double, double>> coarse_points;
    for (const auto& v : mesh->parent->vertices) coarse_points.insert({v.x(), v.y()});
    for (const auto& m : mesh->parent->edge_midpoints) coarse_points.insert({m.x(), m.y()});
    for (const auto& v : mesh->vertices) {
        bool found = false;
        for (const auto& [x, y] : coarse_points) {
            if (std::abs(x - v.x()) < 1e-12 && std::abs(y - v.y()) < 1e-12) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("mesh level cap raises resource error") {
    CHECK_THROWS_AS(build_mesh(8, 1000), ResourceError);
    CHECK_THROWS_AS(build_mesh(-1), ConfigError);
}

TEST_CASE("taylor-hood dof counts and index sets") {
    auto mesh = build_mesh(0);
    auto space = build_spaces(mesh);
    CHECK(space.n_p == 121);

    // independent edge recount directly from the triangle list
    std::set<std::pair<int, int>> edge_set;
    for (const auto& tri : mesh->triangles) {
        for (int l = 0; l < 3; ++l) {
            const int a = tri[l], b = tri[(l + 1) % 3];
            edge_set.insert({std::min(a, b), std::max(a, b)});
        }
    }
    CHECK(static_cast<int>(edge_set.size()) == 320);  // 110 + 110 horizontal/vertical + 100 diagonal
    CHECK(space.n_u == 121 + static_cast<int>(edge_set.size()));
    CHECK(space.n_p < space.n_u);
    CHECK(space.velocity_dofs() == 2 * space.n_u);

    // lid dofs are a subset of the dirichlet set, and every boundary dof
    // appears exactly once
    std::set<int> dir(space.dirichlet_dofs.begin(), space.dirichlet_dofs.end());
    CHECK(dir.size() == space.dirichlet_dofs.size());
    for (int d : space.lid_dofs) CHECK(dir.count(d) == 1);
    CHECK(static_cast<int>(space.dirichlet_scalar.size() + space.free_scalar.size()) ==
          space.n_u);
}

TEST_CASE("boundary lifting is the regularized lid profile") {
    auto space = build_spaces(build_mesh(0));
    const Vector w0 = lift_boundary(space);
    // corners are on the lid and carry value 0 there
    for (int s : space.lid_scalar) {
        const double x = space.dof_coords[s].x();
        if (std::abs(std::abs(x) - 0.5) < 1e-14) CHECK(w0[s] == 0.0);
        if (std::abs(x) < 1e-14) CHECK(w0[s] == doctest::Approx(1.0).epsilon(1e-15));
    }
    // all y-component dofs vanish
    CHECK(w0.tail(space.n_u).norm() == 0.0);
    // non-lid boundary dofs vanish
    for (int s : space.dirichlet_scalar) {
        if (std::abs(space.dof_coords[s].y() - 0.5) > 1e-12) CHECK(w0[s] == 0.0);
    }
}

TEST_CASE("weighted laplacian: constants, linearity, determinism") {
    auto space = build_spaces(build_mesh(0));
    const SparseMatrix L1 = assemble_weighted_laplacian(space, [](double, double) { return 1.0; });
    CHECK(L1.rows() == space.velocity_dofs());

    // constants lie in the kernel (row sums vanish)
    Vector ones = Vector::Ones(space.velocity_dofs());
    CHECK((L1 * ones).lpNorm<Eigen::Infinity>() < 1e-12);

    const SparseMatrix L2 = assemble_weighted_laplacian(space, [](double, double) { return 2.0; });
    CHECK((L2 - 2.0 * L1).norm() < 1e-14 * L1.norm());

    // linearity in the weight for smooth non-constant weights
    auto wa = [](double x, double y) { return 1.0 + 0.3 * x + 0.1 * y * y; };
    auto wb = [](double x, double y) { return 0.5 + 0.2 * std::sin(3.0 * x) * y; };
    const SparseMatrix La = assemble_weighted_laplacian(space, wa);
    const SparseMatrix Lb = assemble_weighted_laplacian(space, wb);
    const SparseMatrix Lab = assemble_weighted_laplacian(
        space, [&](double x, double y) { return wa(x, y) + wb(x, y); });
    CHECK((Lab - La - Lb).norm() < 1e-13 * Lab.norm());

    // bit-for-bit reproducibility
    const SparseMatrix L1_again =
        assemble_weighted_laplacian(space, [](double, double) { return 1.0; });
    REQUIRE(L1_again.nonZeros() == L1.nonZeros());
    CHECK(std::memcmp(L1_again.valuePtr(), L1.valuePtr(),
                      sizeof(double) * L1.nonZeros()) == 0);

    CHECK(symmetry_defect(L1) < 1e-14);

    // non-finite weight names the element
    CHECK_THROWS_AS(assemble_weighted_laplacian(
                        space, [](double, double) { return std::nan(""); }),
                    AssemblyError);
}

TEST_CASE("eliminated laplacian is SPD on the free dofs") {
    auto space = build_spaces(build_mesh(0));
    const SparseMatrix L = assemble_weighted_laplacian(space, [](double, double) { return 1.0; });
    std::vector<int> free2;
    for (int c = 0; c < 2; ++c) {
        for (int s : space.free_scalar) free2.push_back(c * space.n_u + s);
    }
    const SparseMatrix Lf = submatrix(L, free2, free2);
    const Eigen::MatrixXd Lf_dense(Lf);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lf_dense);
    CHECK(es.eigenvalues()[0] > 0.0);
}

TEST_CASE("divergence matrix dimensions and null vectors") {
    auto space = build_spaces(build_mesh(0));
    const SparseMatrix B = assemble_divergence(space);
    CHECK(B.rows() == space.n_p);
    CHECK(B.cols() == 2 * space.n_u);

    // B^T 1 vanishes on the interior velocity dofs (enclosed flow)
    Vector ones = Vector::Ones(space.n_p);
    Vector bt1 = B.transpose() * ones;
    double interior_norm = 0.0;
    for (int s : space.free_scalar) {
        interior_norm += bt1[s] * bt1[s] + bt1[space.n_u + s] * bt1[space.n_u + s];
    }
    CHECK(std::sqrt(interior_norm) < 1e-13);

    // divergence-free linear interpolants are annihilated to quadrature accuracy
    Vector u_rot(2 * space.n_u), u_str(2 * space.n_u);
    for (int s = 0; s < space.n_u; ++s) {
        const auto& pt = space.dof_coords[s];
        u_rot[s] = pt.y();
        u_rot[space.n_u + s] = pt.x();
        u_str[s] = pt.x();
        u_str[space.n_u + s] = -pt.y();
    }
    CHECK((B * u_rot).lpNorm<Eigen::Infinity>() < 1e-13);
    CHECK((B * u_str).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("pressure mass: partition of unity and diagonal equivalence") {
    for (int level : {0, 1}) {
        auto space = build_spaces(build_mesh(level));
        const PressureMass pm = assemble_pressure_mass(space);
        Vector ones = Vector::Ones(space.n_p);
        CHECK(ones.dot(pm.M_p * ones) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(pm.D_p_diag.minCoeff() > 0.0);
        CHECK(symmetry_defect(pm.M_p) < 1e-15);

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
            Eigen::MatrixXd(pm.M_p), Eigen::MatrixXd(Vector(pm.D_p_diag).asDiagonal()));
        CHECK(ges.eigenvalues().minCoeff() >= 0.5 - 1e-10);
        CHECK(ges.eigenvalues().maxCoeff() <= 2.0 + 1e-10);
    }
}

TEST_CASE("schur complement against the pressure mass diagonal") {
    auto space = build_spaces(build_mesh(0));
    const SparseMatrix L = assemble_weighted_laplacian(space, [](double, double) { return 1.0; });
    const SparseMatrix B = assemble_divergence(space);
    const PressureMass pm = assemble_pressure_mass(space);

    std::vector<int> free2, all_p(space.n_p);
    for (int c = 0; c < 2; ++c) {
        for (int s : space.free_scalar) free2.push_back(c * space.n_u + s);
    }
    for (int i = 0; i < space.n_p; ++i) all_p[i] = i;
    const Eigen::MatrixXd A = Eigen::MatrixXd(submatrix(L, free2, free2));
    const Eigen::MatrixXd Bf = Eigen::MatrixXd(submatrix(B, all_p, free2));
    const Eigen::MatrixXd S = Bf * A.ldlt().solve(Bf.transpose());

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        S, Eigen::MatrixXd(Vector(pm.D_p_diag).asDiagonal()));
    const auto& ev = ges.eigenvalues();
    // smallest eigenvalue belongs to the hydrostatic constant
    CHECK(std::abs(ev[0]) < 1e-10);
    CHECK(ev[1] > 0.0);
    CHECK(ev[ev.size() - 1] <= 2.0 + 1e-10);
}

TEST_CASE("matrix market export round-trips through a file") {
    auto space = build_spaces(build_mesh(0));
    const PressureMass pm = assemble_pressure_mass(space);
    const std::string path = "mp_debug.mtx";
    write_matrix_market(pm.M_p, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    long rows, cols, nnz;
    in >> rows >> cols >> nnz;
    CHECK(rows == space.n_p);
    CHECK(nnz == pm.M_p.nonZeros());
    std::remove(path.c_str());
}
