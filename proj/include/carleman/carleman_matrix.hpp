#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "carleman/bell.hpp"
#include "carleman/errors.hpp"
#include "carleman/linalg.hpp"
#include "carleman/series.hpp"

namespace carleman {

// C[G] for a general series, (N+1)x(N+1), indices 0..N. Column 0 is e0,
// column 1 carries G's Taylor coefficients, row 0 the powers of g0.
struct CarlemanMatrix {
    int order = 0;             // N; entries is (N+1) x (N+1)
    Matrix entries;
    TruncatedSeries source;

    double entry(int n, int r) const { return entries(n, r); }
};

inline TruncatedSeries series_from_carleman(const CarlemanMatrix& c) {
    std::vector<double> g(static_cast<std::size_t>(c.order) + 1);
    for (int k = 0; k <= c.order; ++k) g[static_cast<std::size_t>(k)] = c.entries(k, 1);
    return TruncatedSeries::from_taylor(std::move(g));
}

// C_nr = n! [x^n] G(x)^r / r!, powers built incrementally.
inline CarlemanMatrix carleman_direct(const TruncatedSeries& G, int N) {
    if (N < 1) throw InvalidParameter("carleman_direct needs N >= 1");
    const TruncatedSeries gt = truncate(G, N);
    Matrix c = Matrix::Zero(N + 1, N + 1);
    c(0, 0) = 1.0;
    TruncatedSeries p = TruncatedSeries::from_monomial(
        [N] { std::vector<double> one(static_cast<std::size_t>(N) + 1, 0.0); one[0] = 1.0; return one; }());
    for (int r = 1; r <= N; ++r) {
        p = scale(multiply(p, gt), 1.0 / r);  // G^r / r!
        double nfac = 1.0;
        for (int n = 0; n <= N; ++n) {
            if (n > 0) nfac *= n;
            c(n, r) = nfac * p.monomial(n);
        }
    }
    return CarlemanMatrix{N, std::move(c), gt};
}

// B bordered with a trivial zero-th row and column.
inline Matrix embed_bell(const BellMatrix& b) {
    Matrix e = Matrix::Zero(b.order + 1, b.order + 1);
    e(0, 0) = 1.0;
    e.block(1, 1, b.order, b.order) = b.entries;
    return e;
}

namespace detail {

// Shared diagonal recurrence d_j = d_{j-1} g0 / j, so the explicit fill and the
// shift-exponential path below produce bitwise-identical entries.
inline std::vector<double> pascal_diagonals(double g0, int N) {
    std::vector<double> d(static_cast<std::size_t>(N) + 1);
    d[0] = 1.0;
    for (int j = 1; j <= N; ++j) d[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(j - 1)] * g0 / j;
    return d;
}

}  // namespace detail

// M[g0] with M_rm = g0^{m-r}/(m-r)!; upper triangular, unit determinant.
inline Matrix pascal_matrix(double g0, int N) {
    const auto d = detail::pascal_diagonals(g0, N);
    Matrix m = Matrix::Zero(N + 1, N + 1);
    for (int r = 0; r <= N; ++r)
        for (int c = r; c <= N; ++c) m(r, c) = d[static_cast<std::size_t>(c - r)];
    return m;
}

// Superdiagonal ones; nilpotent, W^{N+1} = 0. Right-multiplication by W shifts
// columns one place to the right.
inline Matrix shift_matrix(int N) {
    Matrix w = Matrix::Zero(N + 1, N + 1);
    for (int i = 0; i < N; ++i) w(i, i + 1) = 1.0;
    return w;
}

// M[g0] as the order-N truncated exponential of W g0.
inline Matrix pascal_via_shift_exp(double g0, int N) {
    const auto d = detail::pascal_diagonals(g0, N);
    const Matrix w = shift_matrix(N);
    Matrix wpow = Matrix::Identity(N + 1, N + 1);
    Matrix sum = Matrix::Zero(N + 1, N + 1);
    for (int j = 0; j <= N; ++j) {
        if (j > 0) wpow = wpow * w;  // exact 0/1 entries
        sum += d[static_cast<std::size_t>(j)] * wpow;
    }
    return sum;
}

// C[G] = B-hat[g] . M[g0] with g = G - g0.
inline CarlemanMatrix carleman_factored(const TruncatedSeries& G, int N) {
    if (N < 1) throw InvalidParameter("carleman_factored needs N >= 1");
    const TruncatedSeries gt = truncate(G, N);
    std::vector<double> a(gt.monomial_coefficients());
    const double g0 = a[0];
    a[0] = 0.0;
    auto bhat = embed_bell(bell_matrix(TruncatedSeries::from_monomial(std::move(a)), N));
    Matrix c = bhat * pascal_matrix(g0, N);
    return CarlemanMatrix{N, std::move(c), gt};
}

// C_nj[exp] = j^n / j! with the 0^0 = 1 convention.
inline CarlemanMatrix carleman_exp(int N) {
    if (N < 1) throw InvalidParameter("carleman_exp needs N >= 1");
    Matrix c = Matrix::Zero(N + 1, N + 1);
    c(0, 0) = 1.0;
    double jfac = 1.0;
    for (int j = 1; j <= N; ++j) {
        jfac *= j;
        double jn = 1.0 / jfac;  // j^n / j!
        for (int n = 0; n <= N; ++n) {
            c(n, j) = jn;
            jn *= j;
        }
    }
    return CarlemanMatrix{N, std::move(c), named_series("exp", N)};
}

// C[F] . C[G] = C[G o F]; contraction includes index 0.
inline CarlemanMatrix carleman_product(const CarlemanMatrix& cf, const CarlemanMatrix& cg) {
    if (cf.order != cg.order) throw InvalidParameter("carleman_product: order mismatch");
    CarlemanMatrix out{cf.order, cf.entries * cg.entries, cf.source};
    out.source = series_from_carleman(out);
    return out;
}

}  // namespace carleman
