#pragma once

#include <string>

#include "sgstokes/multiindex.hpp"
#include "sgstokes/sparse.hpp"

namespace sgstokes {

/// Stochastic Galerkin coupling matrix (G_q)_{ij} = <psi_i psi_j psi_q> over
/// a total-degree solution basis, with the analytic eigenvalue inclusion
/// bound g_q = exp(M (k+1)/2 + sum_m q_m / 2).
struct GMatrix {
    MultiIndex q;
    SparseMatrix matrix;  // N_z x N_z, symmetric, structural nonzeros only
    double bound = 0.0;
};

/// q is drawn from the degree-2k basis over the same M as `basis`.
/// Throws ConfigError on dimension mismatch.
GMatrix assemble_G(const MultiIndex& q, const SGBasis& basis);

/// CSV export of the index set together with the g_q bound table.
void export_basis_csv(const SGBasis& basis, const std::string& path);

}  // namespace sgstokes
