#include "sgstokes/block_precon.hpp"

#include "sgstokes/errors.hpp"

namespace sgstokes {

void BlockPrecon::apply_Atilde_inv(const Vector& r_u, Vector& z_u) const {
    z_u.resize(r_u.size());
    Vector z_scalar(op->n_free);
    for (int mode = 0; mode < op->N_z; ++mode) {
        for (int c = 0; c < 2; ++c) {
            mg->vcycle(op->u_mode(r_u, mode, c), z_scalar);
            op->u_mode(z_u, mode, c) = z_scalar;
        }
    }
}

void BlockPrecon::apply_inv(const SGVector& r, SGVector& z) const {
    if (r.u.size() != op->dim_u() || r.p.size() != op->dim_p()) {
        throw ConfigError("preconditioner/vector dimension mismatch");
    }
    z.u.resize(op->dim_u());
    z.p.resize(op->dim_p());
    apply_Atilde_inv(r.u, z.u);
    if (kind == Kind::diag) {
        for (int mode = 0; mode < op->N_z; ++mode) {
            op->p_mode(z.p, mode) =
                op->p_mode(r.p, mode).cwiseQuotient(op->D_p);
        }
    } else {
        z.u /= a;
        // block forward substitution: S_p z_p = B z_u - r_p
        for (int mode = 0; mode < op->N_z; ++mode) {
            Vector bz = op->Bx_free * op->u_mode(z.u, mode, 0);
            bz.noalias() += op->By_free * op->u_mode(z.u, mode, 1);
            bz -= op->p_mode(r.p, mode);
            op->p_mode(z.p, mode) = bz.cwiseQuotient(op->D_p);
        }
    }
}

SGVector BlockPrecon::apply_inv(const SGVector& r) const {
    SGVector z;
    apply_inv(r, z);
    return z;
}

BlockPrecon make_block_diag(const SGFEOperator& op, std::shared_ptr<const MGHierarchy> mg) {
    if (mg->finest_free_dofs() != op.n_free) {
        throw ConfigError("multigrid hierarchy does not match operator dof layout");
    }
    BlockPrecon p;
    p.kind = BlockPrecon::Kind::diag;
    p.op = &op;
    p.mg = std::move(mg);
    return p;
}

BlockPrecon make_block_tri(const SGFEOperator& op, std::shared_ptr<const MGHierarchy> mg,
                           double a) {
    if (a <= 0.0) throw ConfigError("block-triangular scaling a must be positive");
    if (mg->finest_free_dofs() != op.n_free) {
        throw ConfigError("multigrid hierarchy does not match operator dof layout");
    }
    BlockPrecon p;
    p.kind = BlockPrecon::Kind::tri;
    p.op = &op;
    p.mg = std::move(mg);
    p.a = a;
    return p;
}

SGVector HOperator::apply(const SGVector& v) const {
    SGVector out;
    out.u.resize(op->dim_u());
    out.p.resize(op->dim_p());
    op->apply_velocity_block(v.u, out.u);
    for (int mode = 0; mode < op->N_z; ++mode) {
        for (int c = 0; c < 2; ++c) {
            out.u.segment(static_cast<Eigen::Index>(mode) * 2 * op->n_free + c * op->n_free,
                          op->n_free)
                .noalias() -= a * (Atilde_scalar * op->u_mode(v.u, mode, c));
        }
        op->p_mode(out.p, mode) = op->p_mode(v.p, mode).cwiseProduct(op->D_p);
    }
    return out;
}

double HOperator::inner(const SGVector& x, const SGVector& y) const {
    const SGVector hy = apply(y);
    return x.dot(hy);
}

HOperator make_h_operator(const SGFEOperator& op, const MGHierarchy& mg, double a,
                          int dim_cap) {
    HOperator h;
    h.op = &op;
    h.a = a;
    Eigen::MatrixXd W = dense_vcycle_matrix(mg, dim_cap);
    h.Atilde_scalar = W.inverse();
    return h;
}

}  // namespace sgstokes
