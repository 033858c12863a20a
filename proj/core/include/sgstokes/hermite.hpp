#pragma once

#include <span>

#include "sgstokes/multiindex.hpp"

namespace sgstokes {

/// Orthonormal probabilists' Hermite polynomial h_n(y), evaluated with the
/// stable three-term recurrence; <h_i h_j> = delta_ij under the standard
/// Gaussian density.
double hermite_eval(int n, double y);

/// <h_i h_j h_q> under the standard Gaussian density. Nonzero only when
/// i+j+q is even and |i-j| <= q <= i+j; then with s = (i+j+q)/2 the value is
/// sqrt(i! j! q!) / ((s-i)! (s-j)! (s-q)!).
double triple_product(int i, int j, int q);

/// Multivariate triple product: product of univariate ones per dimension.
double triple_product(const MultiIndex& i, const MultiIndex& j, const MultiIndex& q);

/// Mean of a chaos-expanded scalar: the psi_0 coefficient.
double chaos_mean(std::span<const double> coeffs);

/// Variance of a chaos-expanded scalar: sum of squared coefficients j >= 1.
double chaos_variance(std::span<const double> coeffs);

}  // namespace sgstokes
