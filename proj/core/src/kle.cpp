#include "sgstokes/kle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sgstokes/errors.hpp"

namespace sgstokes {

double Eig1D::eval(double s) const {
    return (parity == Parity::even ? std::cos(omega * s) : std::sin(omega * s)) / norm;
}

namespace {

constexpr double kBracketMargin = 1e-8;  // keeps bisection off the tangent poles
constexpr double kRootTol = 1e-12;

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo * fhi < 0.0)) {
        throw RootFindError("eigenvalue root not bracketed", lo, hi);
    }
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at double resolution
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    const double root = 0.5 * (lo + hi);
    if (std::abs(f(root)) > kRootTol) {
        throw RootFindError("bisection stalled above |f| tolerance", lo, hi);
    }
    return root;
}

}  // namespace

std::vector<Eig1D> solve_1d_eigenpairs(double b, double half_width, int n) {
    if (b <= 0.0) throw ConfigError("correlation length must be positive");
    if (n < 1) throw ConfigError("eigenpair count must be >= 1");
    const double c = 1.0 / b;
    const double a = half_width;
    const double pi = std::acos(-1.0);

    // Pole-free forms of c = omega tan(omega a) and omega = -c tan(omega a);
    // multiplying by cos(omega a) keeps |f| evaluable to ~1e-13 near the
    // tangent singularities, where the tan form drowns in roundoff.
    const auto even_f = [&](double w) { return c * std::cos(w * a) - w * std::sin(w * a); };
    const auto odd_f = [&](double w) { return w * std::cos(w * a) + c * std::sin(w * a); };

    std::vector<Eig1D> out;
    const int per_family = n / 2 + 1;
    for (int j = 1; j <= per_family; ++j) {
        // even root: theta = omega*a in ((j-1)pi, (j-1/2)pi)
        {
            const double lo = ((j - 1) * pi + (j == 1 ? kRootTol : kBracketMargin)) / a;
            const double hi = ((j - 0.5) * pi - kBracketMargin) / a;
            const double w = bisect(even_f, lo, hi);
            Eig1D e;
            e.omega = w;
            e.lambda = 2.0 * c / (w * w + c * c);
            e.parity = Eig1D::Parity::even;
            e.norm = std::sqrt(a + std::sin(2.0 * w * a) / (2.0 * w));
            out.push_back(e);
        }
        // odd root: theta in ((j-1/2)pi, j pi)
        {
            const double lo = ((j - 0.5) * pi + kBracketMargin) / a;
            const double hi = (j * pi - kBracketMargin) / a;
            const double w = bisect(odd_f, lo, hi);
            Eig1D e;
            e.omega = w;
            e.lambda = 2.0 * c / (w * w + c * c);
            e.parity = Eig1D::Parity::odd;
            e.norm = std::sqrt(a - std::sin(2.0 * w * a) / (2.0 * w));
            out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Eig1D& l, const Eig1D& r) { return l.lambda > r.lambda; });
    out.resize(n);
    return out;
}

double KLField::eigenfunction(int m, double x, double y) const {
    const auto& p = pairs[m];
    return eig_x[p.ix].eval(x) * eig_y[p.iy].eval(y);
}

double KLField::scaled_term(int m, double x, double y) const {
    return std::sqrt(pairs[m].lambda) * eigenfunction(m, x, y);
}

KLField build_2d_kle(double b1, double b2, double sigma_mu, int M, double mu0) {
    if (M < 1) throw ConfigError("KL truncation index M must be >= 1");
    if (sigma_mu < 0.0) throw ConfigError("sigma_mu must be >= 0");
    KLField field;
    field.mu0 = mu0;
    field.sigma_mu = sigma_mu;
    field.b1 = b1;
    field.b2 = b2;
    field.M = M;
    // M pairs per direction guarantee the top-M set of products is complete.
    field.eig_x = solve_1d_eigenpairs(b1, 0.5, M + 2);
    field.eig_y = solve_1d_eigenpairs(b2, 0.5, M + 2);

    std::vector<KLField::Pair> all;
    for (int i = 0; i < static_cast<int>(field.eig_x.size()); ++i) {
        for (int j = 0; j < static_cast<int>(field.eig_y.size()); ++j) {
            KLField::Pair p;
            p.lambda = sigma_mu * sigma_mu * field.eig_x[i].lambda * field.eig_y[j].lambda;
            p.ix = i;
            p.iy = j;
            // trig eigenfunctions attain |.| = 1 inside [-1/2,1/2] in both families
            p.chi = std::sqrt(p.lambda) / (field.eig_x[i].norm * field.eig_y[j].norm);
            all.push_back(p);
        }
    }
    std::sort(all.begin(), all.end(), [](const KLField::Pair& l, const KLField::Pair& r) {
        if (l.lambda != r.lambda) return l.lambda > r.lambda;
        if (l.ix != r.ix) return l.ix < r.ix;
        return l.iy < r.iy;
    });
    all.resize(M);
    field.pairs = std::move(all);
    return field;
}

double evaluate_log_field(const KLField& field, double x, double y,
                          std::span<const double> y_params) {
    if (static_cast<int>(y_params.size()) != field.M) {
        throw ConfigError("parameter vector length must equal M");
    }
    double exponent = field.mu0;
    for (int m = 0; m < field.M; ++m) {
        exponent += field.scaled_term(m, x, y) * y_params[m];
    }
    return std::exp(exponent);
}

double chaos_coefficient(const KLField& field, const MultiIndex& q, double x, double y) {
    if (q.size() != field.M) {
        throw ConfigError("multi-index length must equal M");
    }
    double exponent = field.mu0;
    for (int m = 0; m < field.M; ++m) {
        const double mu_m = field.eigenfunction(m, x, y);
        exponent += 0.5 * field.pairs[m].lambda * mu_m * mu_m;
    }
    double product = 1.0;
    for (int m = 0; m < field.M; ++m) {
        const int km = q.degrees[m];
        if (km == 0) continue;
        const double t = field.scaled_term(m, x, y);
        double factor = 1.0;
        for (int r = 1; r <= km; ++r) factor *= t / std::sqrt(static_cast<double>(r));
        product *= factor;
    }
    return std::exp(exponent) * product;
}

DecayReport decay_report(const KLField& field, const SGBasis& nu_basis,
                         std::span<const Eigen::Vector2d> points) {
    DecayReport rep;
    rep.chi.assign(field.M, 0.0);
    rep.nu_bar.assign(nu_basis.size(), 0.0);
    for (const auto& pt : points) {
        for (int m = 0; m < field.M; ++m) {
            rep.chi[m] = std::max(rep.chi[m], std::abs(field.scaled_term(m, pt.x(), pt.y())));
        }
        for (int q = 0; q < nu_basis.size(); ++q) {
            rep.nu_bar[q] = std::max(
                rep.nu_bar[q], std::abs(chaos_coefficient(field, nu_basis[q], pt.x(), pt.y())));
        }
    }
    return rep;
}

void export_kle_csv(const KLField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "m,lambda,chi\n";
    char buf[128];
    for (int m = 0; m < field.M; ++m) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", m + 1, field.pairs[m].lambda,
                      field.pairs[m].chi);
        out << buf;
    }
}

void export_decay_csv(const DecayReport& report, const SGBasis& nu_basis,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "q,multi_index,nu_bar\n";
    char buf[128];
    for (int q = 0; q < nu_basis.size(); ++q) {
        std::string mi;
        for (int m = 0; m < nu_basis.M; ++m) {
            mi += (m ? " " : "") + std::to_string(nu_basis[q].degrees[m]);
        }
        std::snprintf(buf, sizeof buf, "%d,\"%s\",%.17g\n", q, mi.c_str(), report.nu_bar[q]);
        out << buf;
    }
}

}  // namespace sgstokes
