#pragma once

#include <map>
#include <vector>

namespace sgstokes {

/// Univariate degrees of one multivariate Hermite basis function.
struct MultiIndex {
    std::vector<int> degrees;

    int total_degree() const {
        int s = 0;
        for (int d : degrees) s += d;
        return s;
    }
    int size() const { return static_cast<int>(degrees.size()); }
    bool operator==(const MultiIndex&) const = default;
    bool operator<(const MultiIndex& o) const { return degrees < o.degrees; }
};

/// Complete total-degree Hermite chaos basis over M dimensions.
///
/// Ordering is graded lexicographic: ascending total degree, then ascending
/// lexicographic comparison of the degree vectors. Index 0 is always the
/// zero multi-index, and size = C(M + k, k).
struct SGBasis {
    int M = 0;
    int k = 0;
    std::vector<MultiIndex> indices;
    std::map<MultiIndex, int> index_of;

    int size() const { return static_cast<int>(indices.size()); }
    const MultiIndex& operator[](int i) const { return indices[i]; }
    /// -1 when the multi-index is not in the basis.
    int find(const MultiIndex& mi) const {
        auto it = index_of.find(mi);
        return it == index_of.end() ? -1 : it->second;
    }
};

/// C(n, r) in double precision (exact for the sizes accepted by build_basis).
double binomial(int n, int r);

/// Throws ResourceError when C(M+k, k) exceeds `size_cap`.
SGBasis build_basis(int M, int k, long size_cap = 2000000);

}  // namespace sgstokes
