#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgstokes/multiindex.hpp"

namespace sgstokes {

/// One eigenpair of the 1D operator with kernel exp(-|s-t|/b) on [-a, a].
struct Eig1D {
    enum class Parity { even, odd };
    double omega = 0.0;   // frequency root
    double lambda = 0.0;  // 1D eigenvalue 2c / (omega^2 + c^2), c = 1/b
    Parity parity = Parity::even;
    double norm = 1.0;    // L2 normalization constant

    double eval(double s) const;
};

/// The n largest eigenpairs, lambda strictly decreasing. Even-family roots
/// solve 1/b = omega tan(omega a), odd-family roots omega = -(1/b) tan(omega a);
/// each is bracketed in its half-pi subinterval and bisected to |f| <= 1e-12.
std::vector<Eig1D> solve_1d_eigenpairs(double b, double half_width, int n);

/// Truncated KL representation of the Gaussian log-viscosity on the unit
/// square. Eigenvalues carry the sigma_mu^2 factor of the covariance, so the
/// field is mu0 + sum_m sqrt(lambda_m) mu_m(x) y_m.
struct KLField {
    double mu0 = 0.0;  // constant mean of the Gaussian field
    double sigma_mu = 0.0;
    double b1 = 1.0, b2 = 1.0;
    int M = 0;

    struct Pair {
        double lambda = 0.0;  // 2D eigenvalue, sigma^2-scaled, descending
        int ix = 0, iy = 0;   // indices into the 1D families
        double chi = 0.0;     // sup_x |sqrt(lambda) mu(x)| (analytic)
    };
    std::vector<Pair> pairs;
    std::vector<Eig1D> eig_x, eig_y;

    /// Unit-L2-norm 2D eigenfunction mu_m(x).
    double eigenfunction(int m, double x, double y) const;
    /// sqrt(lambda_m) mu_m(x), the m-th scaled KL term.
    double scaled_term(int m, double x, double y) const;
};

KLField build_2d_kle(double b1, double b2, double sigma_mu, int M, double mu0 = 0.0);

/// nu_M(x, y) = exp(mu0 + sum_m sqrt(lambda_m) mu_m(x) y_m); strictly positive.
double evaluate_log_field(const KLField& field, double x, double y,
                          std::span<const double> y_params);

/// Hermite chaos coefficient function nu_q(x) of the lognormal field.
double chaos_coefficient(const KLField& field, const MultiIndex& q, double x, double y);

/// Sup-norm tables over a fixed set of evaluation points (typically the
/// quadrature points of the finest requested mesh).
struct DecayReport {
    std::vector<double> chi;     // per KL mode, max |sqrt(lambda) mu_m| over points
    std::vector<double> nu_bar;  // per chaos index q, max |nu_q| over points
};

DecayReport decay_report(const KLField& field, const SGBasis& nu_basis,
                         std::span<const Eigen::Vector2d> points);

/// CSV exports: (m, lambda_m, chi_m) and (q, multi-index, nu_bar_q).
void export_kle_csv(const KLField& field, const std::string& path);
void export_decay_csv(const DecayReport& report, const SGBasis& nu_basis,
                      const std::string& path);

}  // namespace sgstokes
