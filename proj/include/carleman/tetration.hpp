#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/iterate.hpp"
#include "carleman/series.hpp"

namespace carleman {

// a > 0, a != 1; height and argument are free reals. The base enters the
// engine as the series of a^x = e^{(ln a) x}.
struct TetrationQuery {
    double base = std::exp(1.0);
    double height = 1.0;
    double argument = 1.0;
    int order = 8;
};

inline double exp_iterate(double t, double x, int N, double degeneracy_tol = -1.0) {
    return evaluate(iterate_series(named_series("exp", N), t, N, degeneracy_tol).series, x);
}

// The order-2 iterate of exp in three algebraically identical arrangements.
struct ClosedFormN2 {
    double eigensum;  // coefficients of 1, x, x^2/2 assembled from eigenvalue powers
    double grouped;   // one bracket per eigenvalue
    double golden;    // golden-ratio rewrite, alpha = (1+sqrt5)/2
};

inline ClosedFormN2 closed_form_N2_forms(double t, double x) {
    const double s5 = std::sqrt(5.0);
    const double lpt = std::pow((3.0 + s5) / 2.0, t);
    const double lmt = std::pow((3.0 - s5) / 2.0, t);
    ClosedFormN2 r;
    const double c0 = 0.5 - (1.0 - s5) / 4.0 * lpt - (1.0 + s5) / 4.0 * lmt;
    const double c1 = (5.0 - s5) / 10.0 * lpt + (5.0 + s5) / 10.0 * lmt;
    const double c2 = (lpt - lmt) / s5;
    r.eigensum = c0 + c1 * x + c2 * x * x / 2.0;
    r.grouped = 0.5 +
                lpt * ((5.0 - s5) / 10.0 * x - (1.0 - s5) / 4.0 + x * x / (2.0 * s5)) +
                lmt * ((5.0 + s5) / 10.0 * x - (1.0 + s5) / 4.0 - x * x / (2.0 * s5));
    const double a = (1.0 + s5) / 2.0;
    r.golden = 0.5 +
               std::pow(1.0 + a, t) *
                   ((3.0 - a) / 5.0 * x - (1.0 - a) / 2.0 + x * x / (4.0 * a - 2.0)) +
               std::pow(2.0 - a, t) *
                   ((2.0 + a) / 5.0 * x - a / 2.0 - x * x / (4.0 * a - 2.0));
    return r;
}

inline double closed_form_N2(double t, double x) { return closed_form_N2_forms(t, x).grouped; }

inline double tetrate(const TetrationQuery& q, double degeneracy_tol = -1.0) {
    if (!(q.base > 0.0) || q.base == 1.0)
        throw BaseOutOfRange("tetrate requires base > 0 and base != 1");
    auto g = (q.base == std::exp(1.0)) ? named_series("exp", q.order)
                                       : named_series("exp_base", q.order, {q.base});
    return evaluate(iterate_series(g, q.height, q.order, degeneracy_tol).series, q.argument);
}

namespace detail {

inline std::uint64_t checked_add_u64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw ArithmeticOverflow("64-bit overflow in integer sum");
    return r;
}

inline std::uint64_t checked_mul_u64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw ArithmeticOverflow("64-bit overflow in integer product");
    return r;
}

}  // namespace detail

// S(n,k) by the standard recurrence, exact or ArithmeticOverflow.
inline std::uint64_t stirling2(int n, int k) {
    if (n < 0 || k < 0 || k > n) throw InvalidParameter("stirling2 requires 0 <= k <= n");
    if (n == 0) return 1;
    if (k == 0) return 0;
    std::vector<std::uint64_t> row(static_cast<std::size_t>(k) + 1, 0);  // S(i, .)
    row[0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = std::min(i, k); j >= 1; --j)
            row[static_cast<std::size_t>(j)] = detail::checked_add_u64(
                detail::checked_mul_u64(static_cast<std::uint64_t>(j),
                                        row[static_cast<std::size_t>(j)]),
                row[static_cast<std::size_t>(j) - 1]);
        row[0] = 0;
    }
    return row[static_cast<std::size_t>(k)];
}

// omega(n) = sum_k S(n,k), with omega(0) = 1 by convention.
inline std::uint64_t bell_number(int n) {
    if (n < 0) throw InvalidParameter("bell_number requires n >= 0");
    if (n == 0) return 1;
    std::vector<std::uint64_t> row(static_cast<std::size_t>(n) + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = i; j >= 1; --j)
            row[static_cast<std::size_t>(j)] = detail::checked_add_u64(
                detail::checked_mul_u64(static_cast<std::uint64_t>(j),
                                        row[static_cast<std::size_t>(j)]),
                row[static_cast<std::size_t>(j) - 1]);
        row[0] = 0;
    }
    std::uint64_t total = 0;
    for (const auto v : row) total = detail::checked_add_u64(total, v);
    return total;
}

struct DobinskiCheck {
    double lhs;  // partial sum over j of j^n / j!
    double rhs;  // e * omega(n)
    double relative_error;
};

inline DobinskiCheck dobinski_check(int n, int J) {
    if (n < 0 || J < n) throw InvalidParameter("dobinski_check requires 0 <= n <= J");
    double lhs = (n == 0) ? 1.0 : 0.0;  // j = 0 term, 0^0 = 1
    double fact = 1.0;
    for (int j = 1; j <= J; ++j) {
        fact *= static_cast<double>(j);
        lhs += std::pow(static_cast<double>(j), n) / fact;
    }
    const double rhs = std::exp(1.0) * static_cast<double>(bell_number(n));
    const double rel = std::abs(lhs - rhs) / std::abs(rhs);
    return {lhs, rhs, rel};
}

namespace detail {

inline double exp_tower(double height, double x) {
    double y = x;
    for (long i = 0; i < std::lround(height); ++i) y = std::exp(y);
    return y;
}

}  // namespace detail

struct ConvergenceEntry {
    int order = 0;
    bool ok = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    double error = std::numeric_limits<double>::quiet_NaN();       // vs the reference
    double difference = std::numeric_limits<double>::quiet_NaN();  // vs previous good order
    std::string note;
};

struct ConvergenceReport {
    double height = 0.0;
    double argument = 0.0;
    bool has_reference = false;
    double reference = std::numeric_limits<double>::quiet_NaN();
    std::string provenance;
    std::vector<ConvergenceEntry> entries;
};

// exp_iterate over a range of truncation orders. Integer nonnegative heights
// have an exact tower reference; anything else gets differences only.
inline ConvergenceReport convergence_sweep(double t, double x, int n_first, int n_last,
                                           double degeneracy_tol = -1.0) {
    if (n_first < 1 || n_last < n_first)
        throw InvalidParameter("convergence_sweep requires 1 <= n_first <= n_last");
    ConvergenceReport rep;
    rep.height = t;
    rep.argument = x;
    if (detail::is_integer(t) && t >= 0.0) {
        rep.has_reference = true;
        rep.reference = detail::exp_tower(t, x);
        rep.provenance = (t == 1.0) ? "exact e^x" : "exact exp tower";
    } else {
        rep.provenance = "no external reference - successive-difference column only";
    }
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = n_first; n <= n_last; ++n) {
        ConvergenceEntry e;
        e.order = n;
        try {
            e.value = exp_iterate(t, x, n, degeneracy_tol);
            e.ok = true;
            if (rep.has_reference)
                e.error = rep.reference == 0.0
                              ? std::abs(e.value)
                              : std::abs(e.value - rep.reference) / std::abs(rep.reference);
            if (!std::isnan(prev)) e.difference = std::abs(e.value - prev);
            prev = e.value;
        } catch (const Error& err) {
            e.note = err.what();
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace carleman
