#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>

namespace sgstokes {

// Row-compressed storage throughout; assembly sums duplicate triplets once.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;
using Vector = Eigen::VectorXd;

/// Debug export in Matrix Market coordinate format (1-based indices).
void write_matrix_market(const SparseMatrix& m, const std::string& path);

/// Keep rows/cols listed in `rows`/`cols` (ascending dof ids), renumbered densely.
SparseMatrix submatrix(const SparseMatrix& m,
                       const std::vector<int>& rows,
                       const std::vector<int>& cols);

/// Max |a(i,j) - a(j,i)| over stored entries (symmetry check helper).
double symmetry_defect(const SparseMatrix& m);

}  // namespace sgstokes
