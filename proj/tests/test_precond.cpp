#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "sgstokes/block_precon.hpp"
#include "sgstokes/errors.hpp"
#include "sgstokes/krylov.hpp"

using namespace sgstokes;

namespace {

struct Instance {
    std::shared_ptr<const TaylorHoodSpace> space;
    std::shared_ptr<const KLField> field;
    SGBasis basis;
    SGFEOperator op;
    std::shared_ptr<const MGHierarchy> mg;

    explicit Instance(int M = 2, double sigma = 0.2, int level = 0) {
        space = std::make_shared<TaylorHoodSpace>(build_spaces(build_mesh(level)));
        field = std::make_shared<KLField>(build_2d_kle(1.0, 1.0, sigma, M));
        basis = build_basis(M, 1);
        op = build_operator(space, field, basis);
        mg = std::make_shared<MGHierarchy>(space);
    }

    double lambda_min_pencil() const {
        LinOp A = [this](const Vector& x, Vector& y) { op.apply_velocity_block(x, y); };
        LinOp W = [this](const Vector& x, Vector& y) {
            y.resize(x.size());
            Vector z(op.n_free);
            for (int mode = 0; mode < op.N_z; ++mode) {
                for (int c = 0; c < 2; ++c) {
                    mg->vcycle(op.u_mode(x, mode, c), z);
                    op.u_mode(y, mode, c) = z;
                }
            }
        };
        return estimate_extreme_eigs(A, W, op.dim_u(), 1e-6).lambda_min;
    }
};

SGVector random_vector(const SGFEOperator& op, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SGVector v = op.zero_vector();
    for (int i = 0; i < v.u.size(); ++i) v.u[i] = u(rng);
    for (int i = 0; i < v.p.size(); ++i) v.p[i] = u(rng);
    return v;
}

// dense velocity-block matrix of Atilde = I (x) diag(Atilde_sc, Atilde_sc)
Eigen::MatrixXd dense_Atilde(const SGFEOperator& op, const MGHierarchy& mg) {
    const Eigen::MatrixXd W = dense_vcycle_matrix(mg);
    const Eigen::MatrixXd A_sc = W.inverse();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(op.dim_u(), op.dim_u());
    for (int mode = 0; mode < op.N_z; ++mode) {
        for (int c = 0; c < 2; ++c) {
            const int off = mode * 2 * op.n_free + c * op.n_free;
            out.block(off, off, op.n_free, op.n_free) = A_sc;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("block-diagonal preconditioner: linearity, symmetry, diagonal action") {
    Instance s;
    BlockPrecon P = make_block_diag(s.op, s.mg);
    std::mt19937_64 rng(31);

    const SGVector r = random_vector(s.op, rng);
    const SGVector t = random_vector(s.op, rng);
    SGVector rt = s.op.zero_vector();
    rt.u = 2.0 * r.u - 0.5 * t.u;
    rt.p = 2.0 * r.p - 0.5 * t.p;
    const SGVector Pr = P.apply_inv(r);
    const SGVector Pt = P.apply_inv(t);
    const SGVector Prt = P.apply_inv(rt);
    CHECK((Prt.u - 2.0 * Pr.u + 0.5 * Pt.u).norm() < 1e-12 * Prt.u.norm());
    CHECK((Prt.p - 2.0 * Pr.p + 0.5 * Pt.p).norm() < 1e-12 * Prt.p.norm());

    const double lhs = Pr.dot(t);
    const double rhs = r.dot(Pt);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));

    // D_p^{-1} applied to D_p * 1 returns 1
    SGVector dp1 = s.op.zero_vector();
    for (int mode = 0; mode < s.op.N_z; ++mode) s.op.p_mode(dp1.p, mode) = s.op.D_p;
    const SGVector back = P.apply_inv(dp1);
    CHECK((back.p - Vector::Ones(s.op.dim_p())).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("block-triangular preconditioner: substitution identities") {
    Instance s;
    const double a = 0.7;
    BlockPrecon P = make_block_tri(s.op, s.mg, a);
    std::mt19937_64 rng(37);

    // r_p = B((a Atilde)^{-1} r_u) makes the pressure output vanish
    SGVector r = random_vector(s.op, rng);
    SGVector z_u_only = s.op.zero_vector();
    P.apply_Atilde_inv(r.u, z_u_only.u);
    z_u_only.u /= a;
    for (int mode = 0; mode < s.op.N_z; ++mode) {
        s.op.p_mode(r.p, mode) = s.op.Bx_free * s.op.u_mode(z_u_only.u, mode, 0) +
                                 s.op.By_free * s.op.u_mode(z_u_only.u, mode, 1);
    }
    const SGVector z = P.apply_inv(r);
    CHECK(z.p.lpNorm<Eigen::Infinity>() < 1e-12 * z.u.lpNorm<Eigen::Infinity>());

    // doubling a halves the velocity output
    BlockPrecon P2 = make_block_tri(s.op, s.mg, 2.0 * a);
    const SGVector z2 = P2.apply_inv(r);
    CHECK((2.0 * z2.u - z.u).norm() < 1e-12 * z.u.norm());

    CHECK_THROWS_AS(make_block_tri(s.op, s.mg, 0.0), ConfigError);
    CHECK_THROWS_AS(make_block_tri(s.op, s.mg, -1.0), ConfigError);
}

TEST_CASE("block-triangular composition closes on explicit blocks") {
    Instance s(1);  // M = 1 keeps the dense check quick
    const double a = 0.8;
    BlockPrecon P = make_block_tri(s.op, s.mg, a);
    const Eigen::MatrixXd Atilde = dense_Atilde(s.op, *s.mg);

    std::mt19937_64 rng(41);
    const SGVector r = random_vector(s.op, rng);
    const SGVector z = P.apply_inv(r);

    // velocity block: a Atilde z_u = r_u
    const Vector ru_back = a * (Atilde * z.u);
    CHECK((ru_back - r.u).norm() < 1e-10 * r.u.norm());
    // pressure block: B z_u - D_p z_p = r_p
    Vector rp_back(s.op.dim_p());
    for (int mode = 0; mode < s.op.N_z; ++mode) {
        s.op.p_mode(rp_back, mode) = s.op.Bx_free * s.op.u_mode(z.u, mode, 0) +
                                     s.op.By_free * s.op.u_mode(z.u, mode, 1) -
                                     s.op.p_mode(z.p, mode).cwiseProduct(s.op.D_p);
    }
    CHECK((rp_back - r.p).norm() < 1e-10 * r.p.norm());
}

TEST_CASE("H operator: symmetry and positivity under the scaling contract") {
    Instance s;
    const double lambda_min = s.lambda_min_pencil();
    REQUIRE(lambda_min > 0.0);

    const HOperator H9 = make_h_operator(s.op, *s.mg, 0.9 * lambda_min);
    const HOperator H5 = make_h_operator(s.op, *s.mg, 0.5 * lambda_min);

    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const SGVector v = random_vector(s.op, rng);
        CHECK(H9.inner(v, v) > 0.0);
    }
    for (int trial = 0; trial < 5; ++trial) {
        const SGVector x = random_vector(s.op, rng);
        const SGVector y = random_vector(s.op, rng);
        const double lhs = H9.inner(x, y);
        const double rhs = H9.inner(y, x);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
    }

    // smallest Ritz value of the velocity block grows as the scaling shrinks
    auto lambda_min_H = [&](const HOperator& H) {
        LinOp Hu = [&](const Vector& x, Vector& y) {
            SGVector vx = s.op.zero_vector();
            vx.u = x;
            const SGVector hv = H.apply(vx);
            y = hv.u;
        };
        LinOp identity = [](const Vector& x, Vector& y) { y = x; };
        return estimate_extreme_eigs(Hu, identity, s.op.dim_u(), 1e-3, 400).lambda_min;
    };
    const double l9 = lambda_min_H(H9);
    const double l5 = lambda_min_H(H5);
    CHECK(l9 > 0.0);
    CHECK(l5 > l9);
}

TEST_CASE("triangular-preconditioned system is H-symmetric and H-positive") {
    Instance s(1);  // dense checks on the smallest instance
    const double lambda_min = s.lambda_min_pencil();
    const double a = 0.9 * lambda_min;

    const Eigen::MatrixXd C(assemble_explicit(s.op));
    const Eigen::MatrixXd Atilde = dense_Atilde(s.op, *s.mg);
    const int nu = s.op.dim_u(), np = s.op.dim_p();

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nu + np, nu + np);
    H.topLeftCorner(nu, nu) = C.topLeftCorner(nu, nu) - a * Atilde;
    for (int mode = 0; mode < s.op.N_z; ++mode) {
        for (int i = 0; i < s.op.n_p; ++i) {
            const int k = nu + mode * s.op.n_p + i;
            H(k, k) = s.op.D_p[i];
        }
    }

    // explicit P_tri^{-1} from the block inverse formula
    Eigen::MatrixXd Pinv = Eigen::MatrixXd::Zero(nu + np, nu + np);
    const Eigen::MatrixXd W = dense_vcycle_matrix(*s.mg);
    Eigen::MatrixXd Wfull = Eigen::MatrixXd::Zero(nu, nu);
    for (int mode = 0; mode < s.op.N_z; ++mode) {
        for (int c = 0; c < 2; ++c) {
            const int off = mode * 2 * s.op.n_free + c * s.op.n_free;
            Wfull.block(off, off, s.op.n_free, s.op.n_free) = W;
        }
    }
    Eigen::MatrixXd Bfull = Eigen::MatrixXd::Zero(np, nu);
    for (int mode = 0; mode < s.op.N_z; ++mode) {
        Bfull.block(mode * s.op.n_p, mode * 2 * s.op.n_free, s.op.n_p, s.op.n_free) =
            Eigen::MatrixXd(s.op.Bx_free);
        Bfull.block(mode * s.op.n_p, mode * 2 * s.op.n_free + s.op.n_free, s.op.n_p,
                    s.op.n_free) = Eigen::MatrixXd(s.op.By_free);
    }
    Eigen::MatrixXd Dinv = Eigen::MatrixXd::Zero(np, np);
    for (int mode = 0; mode < s.op.N_z; ++mode) {
        for (int i = 0; i < s.op.n_p; ++i) {
            Dinv(mode * s.op.n_p + i, mode * s.op.n_p + i) = 1.0 / s.op.D_p[i];
        }
    }
    Pinv.topLeftCorner(nu, nu) = Wfull / a;
    Pinv.bottomLeftCorner(np, nu) = Dinv * Bfull * Wfull / a;
    Pinv.bottomRightCorner(np, np) = -Dinv;

    // the preconditioner application agrees with the explicit inverse
    {
        BlockPrecon P = make_block_tri(s.op, s.mg, a);
        std::mt19937_64 rng(47);
        const SGVector r = random_vector(s.op, rng);
        const SGVector z = P.apply_inv(r);
        Vector flat_r(nu + np), flat_z(nu + np);
        flat_r << r.u, r.p;
        flat_z << z.u, z.p;
        CHECK((Pinv * flat_r - flat_z).norm() < 1e-10 * flat_z.norm());
    }

    const Eigen::MatrixXd Mo = Pinv * C;
    const Eigen::MatrixXd K = H * Mo;
    const double sym_defect = (K - K.transpose()).norm() / K.norm();
    CHECK(sym_defect <= 1e-10);

    // H-positive definiteness off the hydrostatic null space
    const Eigen::MatrixXd Ksym = 0.5 * (K + K.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ksym);
    const auto& ev = es.eigenvalues();
    // one zero eigenvalue per stochastic mode from the constant pressures
    for (int i = 0; i < s.op.N_z; ++i) CHECK(std::abs(ev[i]) < 1e-8 * ev[ev.size() - 1]);
    CHECK(ev[s.op.N_z] > 0.0);
}

TEST_CASE("preconditioned Schur complement stays below the measured bound") {
    Instance s;  // M = 2, k = 1, level 0
    const Eigen::MatrixXd C(assemble_explicit(s.op));
    const int nu = s.op.dim_u(), np = s.op.dim_p();
    const Eigen::MatrixXd A = C.topLeftCorner(nu, nu);
    const Eigen::MatrixXd Bt = C.topRightCorner(nu, np);
    const Eigen::MatrixXd S = Bt.transpose() * A.ldlt().solve(Bt);

    Eigen::MatrixXd Dp = Eigen::MatrixXd::Zero(np, np);
    for (int mode = 0; mode < s.op.N_z; ++mode) {
        for (int i = 0; i < s.op.n_p; ++i) {
            Dp(mode * s.op.n_p + i, mode * s.op.n_p + i) = s.op.D_p[i];
        }
    }

    // measured upper eigenvalue of the velocity pencil, with theta = 2 for
    // the P1 mass-diagonal equivalence
    LinOp A_op = [&](const Vector& x, Vector& y) { s.op.apply_velocity_block(x, y); };
    LinOp W_op = [&](const Vector& x, Vector& y) {
        y.resize(x.size());
        Vector z(s.op.n_free);
        for (int mode = 0; mode < s.op.N_z; ++mode) {
            for (int c = 0; c < 2; ++c) {
                s.mg->vcycle(s.op.u_mode(x, mode, c), z);
                s.op.u_mode(y, mode, c) = z;
            }
        }
    };
    const double Delta = estimate_extreme_eigs(A_op, W_op, nu, 1e-5).lambda_max;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(S, Dp);
    const auto& ev = ges.eigenvalues();
    for (int i = 0; i < s.op.N_z; ++i) CHECK(std::abs(ev[i]) < 1e-9);  // constants
    CHECK(ev[s.op.N_z] > 0.0);
    CHECK(ev[ev.size() - 1] <= Delta * 2.0 * (1.0 + 1e-8));
}
