#include "sgstokes/hermite.hpp"

#include <cmath>

#include "sgstokes/errors.hpp"

namespace sgstokes {

double hermite_eval(int n, double y) {
    if (n < 0) throw ConfigError("hermite degree must be >= 0");
    double h_prev = 1.0;  // h_0
    if (n == 0) return h_prev;
    double h = y;  // h_1
    for (int m = 1; m < n; ++m) {
        const double h_next =
            (y * h - std::sqrt(static_cast<double>(m)) * h_prev) /
            std::sqrt(static_cast<double>(m + 1));
        h_prev = h;
        h = h_next;
    }
    return h;
}

namespace {

// log n!; exact table below 21, lgamma above (degrees > 20 only occur in
// stress configurations, never in the k <= 4 production range).
double log_factorial(int n) {
    static const double table[21] = {
        0.0,
        0.0,
        0.6931471805599453,
        1.791759469228055,
        3.1780538303479458,
        4.787491742782046,
        6.579251212010101,
        8.525161361065415,
        10.60460290274525,
        12.801827480081469,
        15.104412573075516,
        17.502307845873887,
        19.987214495661885,
        22.552163853123425,
        25.19122118273868,
        27.89927138384089,
        30.671860106080672,
        33.50507345013689,
        36.39544520803305,
        39.339884187199495,
        42.335616460753485};
    if (n <= 20) return table[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace

double triple_product(int i, int j, int q) {
    if (i < 0 || j < 0 || q < 0) throw ConfigError("hermite degrees must be >= 0");
    const int total = i + j + q;
    if (total % 2 != 0) return 0.0;
    if (q < std::abs(i - j) || q > i + j) return 0.0;
    const int s = total / 2;
    if (total <= 40) {
        // exact integer combinatorics in double
        auto fact = [](int n) {
            double v = 1.0;
            for (int r = 2; r <= n; ++r) v *= r;
            return v;
        };
        return std::sqrt(fact(i) * fact(j) * fact(q)) /
               (fact(s - i) * fact(s - j) * fact(s - q));
    }
    const double log_val = 0.5 * (log_factorial(i) + log_factorial(j) + log_factorial(q)) -
                           log_factorial(s - i) - log_factorial(s - j) - log_factorial(s - q);
    return std::exp(log_val);
}

double triple_product(const MultiIndex& i, const MultiIndex& j, const MultiIndex& q) {
    if (i.size() != j.size() || i.size() != q.size()) {
        throw ConfigError("multi-index dimensions mismatch in triple product");
    }
    double v = 1.0;
    for (int m = 0; m < i.size() && v != 0.0; ++m) {
        v *= triple_product(i.degrees[m], j.degrees[m], q.degrees[m]);
    }
    return v;
}

double chaos_mean(std::span<const double> coeffs) {
    return coeffs.empty() ? 0.0 : coeffs[0];
}

double chaos_variance(std::span<const double> coeffs) {
    double v = 0.0;
    for (std::size_t j = 1; j < coeffs.size(); ++j) v += coeffs[j] * coeffs[j];
    return v;
}

}  // namespace sgstokes
