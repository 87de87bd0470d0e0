#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "carleman/bell.hpp"
#include "carleman/carleman_matrix.hpp"
#include "carleman/errors.hpp"
#include "carleman/iterate.hpp"
#include "carleman/linalg.hpp"
#include "carleman/series.hpp"
#include "carleman/spectral.hpp"
#include "carleman/tetration.hpp"

namespace carleman::verification {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    bool expected_failure = false;  // known truncation floor, kept visible
    std::string detail;
};

namespace detail {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline CheckResult check_exp_matrix() {
    CheckResult r{1, "order-2 exp carleman matrix and spectrum", false, false, ""};
    const auto c = carleman_exp(2);
    const double expect[3][3] = {{1, 1, 0.5}, {0, 1, 1}, {0, 1, 2}};
    double worst_entry = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            worst_entry = std::max(worst_entry, std::abs(c.entries(i, j) - expect[i][j]));
    const auto eigs = eigenvalues(c.entries);
    const double s5 = std::sqrt(5.0);
    const double target[] = {(3.0 - s5) / 2.0, 1.0, (3.0 + s5) / 2.0};
    double worst_eig = 0.0;
    for (int j = 0; j < 3; ++j)
        worst_eig = std::max(worst_eig, std::abs(eigs[static_cast<std::size_t>(j)] -
                                                 Complex(target[j], 0.0)));
    r.passed = worst_entry <= 1e-14 && worst_eig <= 1e-12;
    r.detail = "entries off by " + fmt(worst_entry) + " (bound 1e-14), eigenvalues by " +
               fmt(worst_eig) + " (bound 1e-12)";
    return r;
}

inline CheckResult check_quoted_values() {
    CheckResult r{2, "order-2 iterate values at x = e", false, false, ""};
    const double e = std::exp(1.0);
    const double r1 = std::abs(exp_iterate(1.0, e, 2) - 7.41281) / 7.41281;
    const double r2 = std::abs(exp_iterate(e, e, 2) - 37.5795) / 37.5795;
    r.passed = r1 <= 1e-4 && r2 <= 1e-3;
    r.detail = "height 1 off by " + fmt(r1) + " (bound 1e-4), height e by " + fmt(r2) +
               " (bound 1e-3)";
    return r;
}

inline CheckResult check_convergence_threshold() {
    CheckResult r{3, "one percent error threshold between orders 6 and 7", false, false, ""};
    const double e = std::exp(1.0);
    const double ref = std::exp(e);
    const double e6 = std::abs(exp_iterate(1.0, e, 6) - ref) / ref;
    const double e7 = std::abs(exp_iterate(1.0, e, 7) - ref) / ref;
    r.passed = e6 > 0.01 && e7 <= 0.01;
    r.detail = "N=6 error " + fmt(e6) + ", N=7 error " + fmt(e7);
    return r;
}

inline CheckResult check_closed_form_grid() {
    CheckResult r{4, "closed-form arrangements equal the order-2 engine", false, false, ""};
    double worst = 0.0;
    for (double t : {-1.0, 0.0, 0.5, 1.7, 3.0}) {
        for (double x : {0.2, 1.1, 2.3, 3.0}) {
            const auto f = closed_form_N2_forms(t, x);
            const double engine = exp_iterate(t, x, 2);
            worst = std::max({worst, rel(f.eigensum, f.grouped), rel(f.golden, f.grouped),
                              rel(engine, f.grouped)});
        }
    }
    r.passed = worst <= 1e-10;
    r.detail = "worst spread " + fmt(worst) + " over 20 grid points (bound 1e-10)";
    return r;
}

inline CheckResult check_affine_oracle() {
    CheckResult r{5, "affine iterates match the closed form", false, false, ""};
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> g0s(-2.0, 2.0), alphas(-2.0, 2.5);
    std::uniform_real_distribution<double> lo(0.2, 0.93), hi(1.07, 3.0), pick(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double g0 = g0s(rng);
        const double g1 = pick(rng) < 0.5 ? lo(rng) : hi(rng);
        double a = alphas(rng);
        const auto res = iterate_series(named_series("affine", 4, {g0, g1}), a, 4);
        const double c0 = g0 * (1.0 - std::pow(g1, a)) / (1.0 - g1);
        worst = std::max({worst, rel(res.series.taylor(0), c0),
                          rel(res.series.taylor(1), std::pow(g1, a))});
        for (int k = 2; k <= 4; ++k)
            worst = std::max(worst, std::abs(res.series.taylor(k)));
    }
    r.passed = worst <= 1e-10;
    r.detail = "worst deviation " + fmt(worst) + " over 100 draws (bound 1e-10)";
    return r;
}

inline CheckResult check_logistic_half() {
    CheckResult r{6, "logistic half-iterate against the sine closed form", false, false, ""};
    const auto half = iterate_series(named_series("logistic", 8), 0.5, 8);
    const auto closed =
        compose(named_series("sin_sq_sqrt", 8), scale(named_series("arcsin_sq", 8), 2.0));
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k)
        worst = std::max(worst, std::abs(half.series.taylor(k) - closed.taylor(k)) /
                                    std::abs(closed.taylor(k)));
    r.passed = worst <= 1e-6;
    r.detail = "worst coefficient error " + fmt(worst) + " (bound 1e-6)";
    return r;
}

inline CheckResult check_lambert() {
    CheckResult r{7, "series reversion of x e^x gives Lambert W", false, false, ""};
    const auto w = invert_series(named_series("xe^x", 6));
    double worst = 0.0;
    double expect = 1.0;  // (-n)^{n-1}
    for (int n = 1; n <= 6; ++n) {
        expect = std::pow(-static_cast<double>(n), n - 1);
        worst = std::max(worst, std::abs(w.taylor(n) - expect) / std::abs(expect));
    }
    r.passed = worst <= 1e-9;
    r.detail = "worst coefficient error " + fmt(worst) + " (bound 1e-9)";
    return r;
}

inline CheckResult check_dobinski() {
    CheckResult r{8, "dobinski identities", false, false, ""};
    double worst_sum = 0.0;
    for (int n = 0; n <= 8; ++n)
        worst_sum = std::max(worst_sum, dobinski_check(n, 30).relative_error);
    const bool sums_ok = worst_sum <= 1e-9;

    const auto c = carleman_exp(10);
    const auto prod = carleman_product(c, c);
    const double e = std::exp(1.0);
    double worst_row = 0.0;
    for (int n = 0; n <= 6; ++n) {
        const double target = e * static_cast<double>(bell_number(n));
        worst_row = std::max(worst_row, std::abs(prod.entries(n, 1) - target) / target);
    }
    const bool rows_ok = worst_row <= 1e-6;

    r.passed = sums_ok && rows_ok;
    r.expected_failure = sums_ok && !rows_ok;
    r.detail = "partial sums worst " + fmt(worst_sum) + " (bound 1e-9); squared-matrix column worst " +
               fmt(worst_row) + " (bound 1e-6, truncation floor of the order-10 section)";
    return r;
}

inline CheckResult check_property_bundle() {
    CheckResult r{9, "property bundle", false, false, ""};
    std::ostringstream why;
    bool ok = true;

    // projector identities on matrices inside the validated operating range;
    // conditioning erodes them from order 5 on (see the notes in the README)
    {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-0.08, 0.08);
        Matrix d = Matrix::Zero(5, 5);
        const double spec_vals[] = {0.5, 1.2, 2.0, 3.1, 4.4};
        for (int i = 0; i < 5; ++i) d(i, i) = spec_vals[i];
        Matrix s = Matrix::Identity(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) s(i, j) += u(rng);
        const Matrix sim = s * d * s.inverse();
        const Matrix aff = carleman_direct(named_series("affine", 1, {0.8, 2.5}), 1).entries;
        for (const Matrix& m : {carleman_exp(4).entries, aff, sim}) {
            const auto dec = decompose(m);
            const auto n = static_cast<Eigen::Index>(dec.eigenvalues.size());
            CMatrix total = CMatrix::Zero(n, n);
            double worst_eig = 0.0, worst_abs = 0.0;
            for (std::size_t j = 0; j < dec.projectors.size(); ++j) {
                const CMatrix& z = dec.projectors[j];
                worst_eig = std::max(worst_eig, (m.cast<Complex>() * z - dec.eigenvalues[j] * z)
                                                    .cwiseAbs()
                                                    .maxCoeff());
                worst_abs = std::max(worst_abs, (z * z - z).cwiseAbs().maxCoeff());
                for (std::size_t i = 0; i < dec.projectors.size(); ++i)
                    if (i != j)
                        worst_abs = std::max(worst_abs,
                                             (z * dec.projectors[i]).cwiseAbs().maxCoeff());
                worst_abs = std::max(worst_abs, std::abs(z.trace() - Complex(1.0, 0.0)));
                total += z;
            }
            worst_abs =
                std::max(worst_abs, (total - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
            if (worst_eig > 1e-9 * std::max(1.0, inf_norm(m)) || worst_abs > 1e-9) {
                ok = false;
                why << "projector identities off by " << fmt(std::max(worst_eig, worst_abs))
                    << "; ";
            }
        }
    }

    // semigroup on truncation-exact prefixes
    {
        const std::pair<double, double> pairs[] = {{0.5, 0.5}, {1.0, -1.0}, {0.3, 0.7}};
        const TruncatedSeries gens[] = {named_series("logistic", 8),
                                        named_series("affine", 6, {0.7, 1.6})};
        double worst = 0.0;
        for (const auto& g : gens) {
            const int n = g.order();
            for (auto [sv, tv] : pairs) {
                const auto a = iterate_series(g, sv, n).series;
                const auto b = iterate_series(g, tv, n).series;
                const auto both = compose(b, a);
                const auto direct = iterate_series(g, sv + tv, n).series;
                for (int k = 0; k <= (n + 1) / 2; ++k)
                    worst = std::max(worst, rel(both.taylor(k), direct.taylor(k)));
            }
        }
        {
            const auto g = named_series("exp", 8);
            const auto fwd = iterate_series(g, 1.0, 8).series;
            const auto bwd = iterate_series(g, -1.0, 8).series;
            const auto both = compose(bwd, fwd);
            for (int k = 0; k <= 4; ++k)
                worst = std::max(worst, std::abs(both.taylor(k) - (k == 1 ? 1.0 : 0.0)));
        }
        if (worst > 1e-7) {
            ok = false;
            why << "semigroup off by " << fmt(worst) << "; ";
        }
    }

    // factored and direct carleman construction agree
    {
        double worst = 0.0;
        const TruncatedSeries cases[] = {named_series("exp", 5),
                                         named_series("affine", 5, {1.3, 0.6}),
                                         named_series("logistic", 5)};
        for (const auto& g : cases) {
            const auto direct = carleman_direct(g, g.order());
            const auto fact = carleman_factored(g, g.order());
            worst = std::max(worst, inf_norm(Matrix(direct.entries - fact.entries)) /
                                        std::max(1.0, inf_norm(direct.entries)));
        }
        if (worst > 1e-11) {
            ok = false;
            why << "construction routes differ by " << fmt(worst) << "; ";
        }
    }

    // bell and carleman iterate paths coincide at zero constant term
    {
        std::vector<double> a{0.0, 1.4, 0.3, -0.2, 0.1};
        const auto g = TruncatedSeries::from_monomial(a);
        const double alpha = 0.6;
        const auto via_bell = iterate_series(g, alpha, 4);
        const auto dec = decompose(carleman_direct(g, 4).entries);
        const auto p =
            apply_function(dec, [alpha](Complex u) { return std::exp(alpha * std::log(u)); });
        double worst = 0.0;
        for (int k = 1; k <= 4; ++k)
            worst = std::max(worst, rel(via_bell.series.taylor(k), p(k, 1).real()));
        if (worst > 1e-9) {
            ok = false;
            why << "iterate paths differ by " << fmt(worst) << "; ";
        }
    }

    // spectral inverse against the identity
    {
        const Matrix c = carleman_exp(4).entries;
        const Matrix inv = matrix_power(c, -1.0);
        const double worst = inf_norm(Matrix(c * inv - Matrix::Identity(5, 5)));
        if (worst > 1e-9) {
            ok = false;
            why << "spectral inverse off by " << fmt(worst) << "; ";
        }
    }

    r.passed = ok;
    r.detail = ok ? "projectors, semigroup, dual construction, path consistency, inverse all hold"
                  : why.str();
    return r;
}

inline CheckResult check_degenerate() {
    CheckResult r{10, "degenerate multiplier handling", false, false, ""};
    bool frac_throws = false, schroder_throws = false;
    try {
        iterate_series(named_series("smoluchowski", 6), 0.5, 6);
    } catch (const DegenerateSpectrum&) {
        frac_throws = true;
    }
    try {
        schroder_solve_bell(named_series("smoluchowski", 5), 5);
    } catch (const DegenerateSpectrum&) {
        schroder_throws = true;
    }
    double worst = 0.0;
    for (long k : {2L, 3L}) {
        const auto res = iterate_series(named_series("smoluchowski", 6),
                                        static_cast<double>(k), 6);
        double sign = 1.0;
        for (int n = 1; n <= 6; ++n) {
            worst = std::max(worst,
                             std::abs(res.series.monomial(n) -
                                      sign * std::pow(static_cast<double>(k), n - 1)));
            sign = -sign;
        }
    }
    r.passed = frac_throws && schroder_throws && worst <= 1e-9;
    r.detail = std::string("fractional path ") + (frac_throws ? "refused" : "ACCEPTED") +
               ", schroder " + (schroder_throws ? "refused" : "ACCEPTED") +
               ", integer powers off by " + fmt(worst) + " (bound 1e-9)";
    return r;
}

}  // namespace detail

inline std::vector<CheckResult> run_all_checks() {
    return {detail::check_exp_matrix(),    detail::check_quoted_values(),
            detail::check_convergence_threshold(), detail::check_closed_form_grid(),
            detail::check_affine_oracle(), detail::check_logistic_half(),
            detail::check_lambert(),       detail::check_dobinski(),
            detail::check_property_bundle(), detail::check_degenerate()};
}

// Prints one line per criterion; returns the number of unexpected failures.
inline int print_report(std::ostream& os, const std::vector<CheckResult>& checks) {
    int passed = 0, expected = 0, unexpected = 0;
    for (const auto& c : checks) {
        const char* verdict = c.passed ? "PASS" : (c.expected_failure ? "FAIL (expected)" : "FAIL");
        os << (c.id < 10 ? " " : "") << c.id << "  " << verdict << "  " << c.name << "\n";
        os << "      " << c.detail << "\n";
        if (c.passed)
            ++passed;
        else if (c.expected_failure)
            ++expected;
        else
            ++unexpected;
    }
    os << "RESULT: " << passed << " passed, " << expected << " expected failure(s), " << unexpected
       << " unexpected failure(s)\n";
    return unexpected;
}

}  // namespace carleman::verification
