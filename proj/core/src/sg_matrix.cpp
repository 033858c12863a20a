#include "sgstokes/sg_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sgstokes/errors.hpp"
#include "sgstokes/hermite.hpp"

namespace sgstokes {

GMatrix assemble_G(const MultiIndex& q, const SGBasis& basis) {
    if (q.size() != basis.M) {
        throw ConfigError("multi-index dimension does not match basis dimension");
    }
    GMatrix g;
    g.q = q;
    g.bound = std::exp(0.5 * basis.M * (basis.k + 1) + 0.5 * q.total_degree());

    const int n = basis.size();
    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = triple_product(basis[i], basis[j], q);
            if (v != 0.0) {
                trips.emplace_back(i, j, v);
                if (j != i) trips.emplace_back(j, i, v);  // mirror keeps symmetry exact
            }
        }
    }
    g.matrix = SparseMatrix(n, n);
    g.matrix.setFromTriplets(trips.begin(), trips.end());
    return g;
}

void export_basis_csv(const SGBasis& basis, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "index,multi_index,total_degree,g_bound\n";
    char buf[160];
    for (int i = 0; i < basis.size(); ++i) {
        std::string mi;
        for (int m = 0; m < basis.M; ++m) {
            mi += (m ? " " : "") + std::to_string(basis[i].degrees[m]);
        }
        const double bound =
            std::exp(0.5 * basis.M * (basis.k + 1) + 0.5 * basis[i].total_degree());
        std::snprintf(buf, sizeof buf, "%d,\"%s\",%d,%.17g\n", i, mi.c_str(),
                      basis[i].total_degree(), bound);
        out << buf;
    }
}

}  // namespace sgstokes
