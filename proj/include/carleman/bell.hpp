#pragma once

#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/linalg.hpp"
#include "carleman/series.hpp"

namespace carleman {

// B[g] for a series with g(0) = 0. Logical indices n, m run 1..N, the usual
// convention for these matrices; storage is 0-based, offset handled by entry() only.
struct BellMatrix {
    int order = 0;             // N; entries is N x N
    Matrix entries;
    TruncatedSeries source;    // series whose first column this is

    double entry(int n, int m) const { return entries(n - 1, m - 1); }
};

namespace detail {

inline constexpr double kZeroConstantTol = 1e-15;

// Inverse of a lower-triangular matrix by forward substitution, column by column.
inline Matrix lower_triangular_inverse(const Matrix& l) {
    const auto n = l.rows();
    Matrix x = Matrix::Zero(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index i = c; i < n; ++i) {
            if (l(i, i) == 0.0)
                throw NonInvertible("zero pivot in triangular inverse");
            double s = (i == c) ? 1.0 : 0.0;
            for (Eigen::Index j = c; j < i; ++j) s -= l(i, j) * x(j, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

inline TruncatedSeries series_from_first_column(int order, const Matrix& entries) {
    std::vector<double> g(static_cast<std::size_t>(order) + 1, 0.0);
    for (int k = 1; k <= order; ++k) g[static_cast<std::size_t>(k)] = entries(k - 1, 0);
    return TruncatedSeries::from_taylor(std::move(g));
}

}  // namespace detail

// B_{nm} = n! [x^n] g(x)^m / m!, built by incremental truncated multiplication.
inline BellMatrix bell_matrix(const TruncatedSeries& g, int N) {
    if (N < 1) throw InvalidParameter("bell_matrix needs N >= 1");
    if (std::abs(g.monomial(0)) > detail::kZeroConstantTol)
        throw NonzeroConstantTerm("bell_matrix requires g(0) = 0");
    const TruncatedSeries gt = truncate(g, N);
    Matrix b = Matrix::Zero(N, N);
    TruncatedSeries p = TruncatedSeries::from_monomial(
        [N] { std::vector<double> one(static_cast<std::size_t>(N) + 1, 0.0); one[0] = 1.0; return one; }());
    for (int m = 1; m <= N; ++m) {
        p = scale(multiply(p, gt), 1.0 / m);  // g^m / m!
        double nfac = 1.0;
        for (int n = 1; n <= N; ++n) {
            nfac *= n;
            b(n - 1, m - 1) = nfac * p.monomial(n);
        }
    }
    return BellMatrix{N, std::move(b), gt};
}

// First column read back as Taylor coefficients (g_0 = 0).
inline TruncatedSeries series_from_bell(const BellMatrix& b) {
    return detail::series_from_first_column(b.order, b.entries);
}

// B[g] . B[f] = B[f o g]; plain product, composition read from the first column.
inline BellMatrix bell_product(const BellMatrix& bg, const BellMatrix& bf) {
    if (bg.order != bf.order) throw InvalidParameter("bell_product: order mismatch");
    Matrix p = bg.entries * bf.entries;
    TruncatedSeries s = detail::series_from_first_column(bg.order, p);
    return BellMatrix{bg.order, std::move(p), std::move(s)};
}

// Integer powers by repeated multiplication; negative powers via the triangular
// inverse. No spectral decomposition, so degenerate eigenvalues (g_1 = 1) are fine.
inline BellMatrix bell_power_int(const BellMatrix& b, long k) {
    const int N = b.order;
    Matrix base = b.entries;
    if (k < 0) {
        if (b.entry(1, 1) == 0.0)
            throw NonInvertible("bell_power_int: g_1 = 0, series not invertible");
        base = detail::lower_triangular_inverse(base);
    }
    Matrix acc = Matrix::Identity(N, N);
    for (long i = 0, reps = std::labs(k); i < reps; ++i) acc = acc * base;
    TruncatedSeries s = detail::series_from_first_column(N, acc);
    return BellMatrix{N, std::move(acc), std::move(s)};
}

}  // namespace carleman
