#include "sgstokes/sparse.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "sgstokes/errors.hpp"

namespace sgstokes {

void write_matrix_market(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    char buf[64];
    for (int r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                          static_cast<int>(it.col()) + 1, it.value());
            out << buf;
        }
    }
}

SparseMatrix submatrix(const SparseMatrix& m,
                       const std::vector<int>& rows,
                       const std::vector<int>& cols) {
    std::vector<int> rmap(m.rows(), -1), cmap(m.cols(), -1);
    for (std::size_t k = 0; k < rows.size(); ++k) rmap[rows[k]] = static_cast<int>(k);
    for (std::size_t k = 0; k < cols.size(); ++k) cmap[cols[k]] = static_cast<int>(k);
    std::vector<Triplet> trips;
    for (int r : rows) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            const int c = cmap[it.col()];
            if (c >= 0) trips.emplace_back(rmap[r], c, it.value());
        }
    }
    SparseMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

double symmetry_defect(const SparseMatrix& m) {
    double defect = 0.0;
    for (int r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            defect = std::max(defect, std::abs(it.value() - m.coeff(it.col(), it.row())));
        }
    }
    return defect;
}

}  // namespace sgstokes
