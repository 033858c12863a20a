#include "sgstokes/sgfe_operator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sgstokes/errors.hpp"

namespace sgstokes {

SGVector SGFEOperator::zero_vector() const {
    SGVector v;
    v.u = Vector::Zero(dim_u());
    v.p = Vector::Zero(dim_p());
    return v;
}

void SGFEOperator::apply_velocity_block(const Vector& x, Vector& y) const {
    y.setZero();
    std::vector<int> needed;
    std::vector<std::uint8_t> mark(N_z);
    // cache of A_q * x_(j,c), keyed by (j, c), rebuilt per q
    Eigen::MatrixXd cache(n_free, 2 * N_z);
    for (int q = 0; q < N_nu; ++q) {
        const SparseMatrix& Gq = G[q].matrix;
        needed.clear();
        std::fill(mark.begin(), mark.end(), 0);
        for (int i = 0; i < Gq.outerSize(); ++i) {
            for (SparseMatrix::InnerIterator it(Gq, i); it; ++it) {
                if (!mark[it.col()]) {
                    mark[it.col()] = 1;
                    needed.push_back(static_cast<int>(it.col()));
                }
            }
        }
        std::sort(needed.begin(), needed.end());
        for (int j : needed) {
            for (int c = 0; c < 2; ++c) {
                cache.col(2 * j + c).noalias() = A_free[q] * u_mode(x, j, c);
            }
        }
        for (int i = 0; i < Gq.outerSize(); ++i) {
            for (SparseMatrix::InnerIterator it(Gq, i); it; ++it) {
                const int j = static_cast<int>(it.col());
                for (int c = 0; c < 2; ++c) {
                    u_mode(y, i, c) += it.value() * cache.col(2 * j + c);
                }
            }
        }
    }
}

void SGFEOperator::apply(const SGVector& x, SGVector& y) const {
    if (x.u.size() != dim_u() || x.p.size() != dim_p()) {
        throw ConfigError("operator/vector dimension mismatch in apply");
    }
    y.u.resize(dim_u());
    y.p.resize(dim_p());
    apply_velocity_block(x.u, y.u);
    for (int i = 0; i < N_z; ++i) {
        u_mode(y.u, i, 0).noalias() += BxT_free * p_mode(x.p, i);
        u_mode(y.u, i, 1).noalias() += ByT_free * p_mode(x.p, i);
        p_mode(y.p, i).noalias() = Bx_free * u_mode(x.u, i, 0);
        p_mode(y.p, i).noalias() += By_free * u_mode(x.u, i, 1);
    }
}

SGVector SGFEOperator::apply(const SGVector& x) const {
    SGVector y;
    apply(x, y);
    return y;
}

SGFEOperator build_operator(std::shared_ptr<const TaylorHoodSpace> space,
                            std::shared_ptr<const KLField> field, const SGBasis& basis_z) {
    if (basis_z.M != field->M) {
        throw ConfigError("solution basis dimension does not match KL truncation index");
    }
    SGFEOperator op;
    op.space = space;
    op.field = field;
    op.basis_z = basis_z;
    op.basis_nu = build_basis(basis_z.M, 2 * basis_z.k);
    op.N_z = op.basis_z.size();
    op.N_nu = op.basis_nu.size();
    op.n_p = space->n_p;
    op.n_free = static_cast<int>(space->free_scalar.size());
    op.n_bdry = static_cast<int>(space->dirichlet_scalar.size());

    LaplacianAssembler assembler(*space);
    const auto& qp = assembler.quad_points();
    std::vector<double> weights(qp.size());

    op.A_free.reserve(op.N_nu);
    op.A_bdry.resize(op.N_z);
    op.G.reserve(op.N_nu);
    for (int q = 0; q < op.N_nu; ++q) {
        const MultiIndex& mi = op.basis_nu[q];
        for (std::size_t p = 0; p < qp.size(); ++p) {
            weights[p] = chaos_coefficient(*field, mi, qp[p].x(), qp[p].y());
        }
        SparseMatrix full = assembler.assemble_scalar(weights);
        op.A_free.push_back(submatrix(full, space->free_scalar, space->free_scalar));
        const int zi = op.basis_z.find(mi);
        if (zi >= 0) {
            op.A_bdry[zi] = submatrix(full, space->free_scalar, space->dirichlet_scalar);
        }
        op.G.push_back(assemble_G(mi, op.basis_z));
    }

    SparseMatrix B = assemble_divergence(*space);
    std::vector<int> all_p(space->n_p);
    for (int i = 0; i < space->n_p; ++i) all_p[i] = i;
    std::vector<int> free_x = space->free_scalar;
    std::vector<int> free_y(free_x.size());
    std::vector<int> bdry_x = space->dirichlet_scalar;
    std::vector<int> bdry_y(bdry_x.size());
    for (std::size_t i = 0; i < free_x.size(); ++i) free_y[i] = free_x[i] + space->n_u;
    for (std::size_t i = 0; i < bdry_x.size(); ++i) bdry_y[i] = bdry_x[i] + space->n_u;
    op.Bx_free = submatrix(B, all_p, free_x);
    op.By_free = submatrix(B, all_p, free_y);
    op.Bx_bdry = submatrix(B, all_p, bdry_x);
    op.By_bdry = submatrix(B, all_p, bdry_y);
    op.BxT_free = SparseMatrix(op.Bx_free.transpose());
    op.ByT_free = SparseMatrix(op.By_free.transpose());

    PressureMass pm = assemble_pressure_mass(*space);
    op.M_p = std::move(pm.M_p);
    op.D_p = std::move(pm.D_p_diag);
    return op;
}

SGVector build_rhs(const SGFEOperator& op, const Vector& w0) {
    if (w0.size() != op.space->velocity_dofs()) {
        throw ConfigError("boundary lifting has wrong length");
    }
    const auto& bdry = op.space->dirichlet_scalar;
    Vector w0_bx(op.n_bdry), w0_by(op.n_bdry);
    for (int i = 0; i < op.n_bdry; ++i) {
        w0_bx[i] = w0[bdry[i]];
        w0_by[i] = w0[op.space->n_u + bdry[i]];
    }
    SGVector b = op.zero_vector();
    // The lifting couples every solution mode i through the coefficient
    // function with multi-index equal to i; all other couplings vanish by
    // orthonormality against psi_0.
    for (int i = 0; i < op.N_z; ++i) {
        op.u_mode(b.u, i, 0).noalias() = -(op.A_bdry[i] * w0_bx);
        op.u_mode(b.u, i, 1).noalias() -= op.A_bdry[i] * w0_by;
    }
    op.p_mode(b.p, 0).noalias() = -(op.Bx_bdry * w0_bx);
    op.p_mode(b.p, 0).noalias() -= op.By_bdry * w0_by;
    return b;
}

SparseMatrix assemble_explicit(const SGFEOperator& op, int dim_cap) {
    if (op.dim() > dim_cap) {
        throw ResourceError("explicit assembly of dimension " + std::to_string(op.dim()) +
                            " exceeds cap " + std::to_string(dim_cap));
    }
    const int nf = op.n_free;
    const int u_off = 0;
    const int p_off = op.dim_u();
    std::vector<Triplet> trips;
    for (int q = 0; q < op.N_nu; ++q) {
        const SparseMatrix& Gq = op.G[q].matrix;
        const SparseMatrix& Aq = op.A_free[q];
        for (int i = 0; i < Gq.outerSize(); ++i) {
            for (SparseMatrix::InnerIterator git(Gq, i); git; ++git) {
                const int j = static_cast<int>(git.col());
                for (int r = 0; r < Aq.outerSize(); ++r) {
                    for (SparseMatrix::InnerIterator ait(Aq, r); ait; ++ait) {
                        const double v = git.value() * ait.value();
                        for (int c = 0; c < 2; ++c) {
                            trips.emplace_back(u_off + i * 2 * nf + c * nf + r,
                                               u_off + j * 2 * nf + c * nf +
                                                   static_cast<int>(ait.col()),
                                               v);
                        }
                    }
                }
            }
        }
    }
    for (int i = 0; i < op.N_z; ++i) {
        auto add_B = [&](const SparseMatrix& Bc, int comp) {
            for (int r = 0; r < Bc.outerSize(); ++r) {
                for (SparseMatrix::InnerIterator it(Bc, r); it; ++it) {
                    const int urow = u_off + i * 2 * nf + comp * nf + static_cast<int>(it.col());
                    const int prow = p_off + i * op.n_p + r;
                    trips.emplace_back(prow, urow, it.value());
                    trips.emplace_back(urow, prow, it.value());
                }
            }
        };
        add_B(op.Bx_free, 0);
        add_B(op.By_free, 1);
    }
    SparseMatrix C(op.dim(), op.dim());
    C.setFromTriplets(trips.begin(), trips.end());
    return C;
}

Vector flatten(const SGFEOperator& op, const SGVector& x) {
    Vector out(op.dim());
    out.head(op.dim_u()) = x.u;
    out.tail(op.dim_p()) = x.p;
    return out;
}

SGVector unflatten(const SGFEOperator& op, const Vector& x) {
    SGVector out;
    out.u = x.head(op.dim_u());
    out.p = x.tail(op.dim_p());
    return out;
}

MomentFields postprocess_moments(const SGFEOperator& op, const SGVector& w, const Vector& w0) {
    const TaylorHoodSpace& sp = *op.space;
    const int nv = sp.mesh->n_vertices();
    MomentFields f;
    f.coords.reserve(nv);
    for (int v = 0; v < nv; ++v) f.coords.push_back(sp.mesh->vertices[v]);
    f.mean_u1.assign(nv, 0.0);
    f.mean_u2.assign(nv, 0.0);
    f.var_u1.assign(nv, 0.0);
    f.var_u2.assign(nv, 0.0);
    f.mean_p.assign(nv, 0.0);
    f.var_p.assign(nv, 0.0);

    std::vector<int> free_pos(sp.n_u, -1);
    for (int i = 0; i < op.n_free; ++i) free_pos[sp.free_scalar[i]] = i;

    for (int v = 0; v < nv; ++v) {
        const int pos = free_pos[v];
        for (int mode = 0; mode < op.N_z; ++mode) {
            double c1, c2;
            if (pos >= 0) {
                c1 = op.u_mode(w.u, mode, 0)[pos];
                c2 = op.u_mode(w.u, mode, 1)[pos];
            } else {  // Dirichlet dof: deterministic data lives in mode 0
                c1 = (mode == 0) ? w0[v] : 0.0;
                c2 = (mode == 0) ? w0[sp.n_u + v] : 0.0;
            }
            const double cp = op.p_mode(w.p, mode)[v];
            if (mode == 0) {
                f.mean_u1[v] = c1;
                f.mean_u2[v] = c2;
                f.mean_p[v] = cp;
            } else {
                f.var_u1[v] += c1 * c1;
                f.var_u2[v] += c2 * c2;
                f.var_p[v] += cp * cp;
            }
        }
    }
    return f;
}

void export_moments_csv(const MomentFields& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "x1,x2,mean_u1,mean_u2,var_u1,var_u2,mean_p,var_p\n";
    char buf[256];
    for (std::size_t v = 0; v < f.coords.size(); ++v) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      f.coords[v].x(), f.coords[v].y(), f.mean_u1[v], f.mean_u2[v], f.var_u1[v],
                      f.var_u2[v], f.mean_p[v], f.var_p[v]);
        out << buf;
    }
}

}  // namespace sgstokes
