#include "sgstokes/multiindex.hpp"

#include <cmath>
#include <string>

#include "sgstokes/errors.hpp"

namespace sgstokes {

double binomial(int n, int r) {
    if (r < 0 || r > n) return 0.0;
    r = std::min(r, n - r);
    double v = 1.0;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return std::round(v);
}

namespace {

void enumerate_grade(int M, int grade, int dim, MultiIndex& scratch,
                     std::vector<MultiIndex>& out) {
    if (dim == M - 1) {
        scratch.degrees[dim] = grade;
        out.push_back(scratch);
        return;
    }
    for (int d = 0; d <= grade; ++d) {
        scratch.degrees[dim] = d;
        enumerate_grade(M, grade - d, dim + 1, scratch, out);
    }
}

}  // namespace

SGBasis build_basis(int M, int k, long size_cap) {
    if (M < 1) throw ConfigError("basis dimension M must be >= 1");
    if (k < 0) throw ConfigError("total degree k must be >= 0");
    const double size = binomial(M + k, k);
    if (size > static_cast<double>(size_cap)) {
        throw ResourceError("chaos basis size C(" + std::to_string(M + k) + "," +
                            std::to_string(k) + ") = " + std::to_string(size) +
                            " exceeds cap " + std::to_string(size_cap));
    }
    SGBasis basis;
    basis.M = M;
    basis.k = k;
    MultiIndex scratch;
    scratch.degrees.assign(M, 0);
    for (int g = 0; g <= k; ++g) {
        enumerate_grade(M, g, 0, scratch, basis.indices);
    }
    for (int i = 0; i < basis.size(); ++i) basis.index_of[basis.indices[i]] = i;
    return basis;
}

}  // namespace sgstokes
