#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <sstream>
#include <utility>
#include <vector>

#include "carleman/bell.hpp"
#include "carleman/carleman_matrix.hpp"
#include "carleman/errors.hpp"
#include "carleman/series.hpp"
#include "carleman/spectral.hpp"

namespace carleman {

enum class IteratePath { bell, carleman, integer_power };

inline const char* to_string(IteratePath p) {
    switch (p) {
        case IteratePath::bell: return "bell";
        case IteratePath::carleman: return "carleman";
        default: return "integer-power";
    }
}

// Taylor coefficients of g^<alpha> (column 1 of the alpha-th matrix power)
// plus diagnostics. gap and max_imag are 0 on the integer path, which never
// builds a spectral decomposition.
struct IterateResult {
    TruncatedSeries series;
    double alpha = 0.0;
    IteratePath path = IteratePath::integer_power;
    double gap = 0.0;
    double max_imag = 0.0;
};

struct SchroderSolution {
    double multiplier = 0.0;   // K = g_1
    TruncatedSeries F;         // normalized F_1 = 1
    double residual = 0.0;     // max per-coefficient residual of F o g - K F, monomial scale
};

namespace detail {

inline bool is_integer(double a) {
    return std::isfinite(a) && a == std::nearbyint(a) && std::abs(a) < 1e15;
}

inline void check_spectrum_invertible(const std::vector<Complex>& eigs, double scale) {
    const double zero_tol = 1e-12 * std::max(1.0, scale);
    for (const Complex& lambda : eigs)
        if (std::abs(lambda) <= zero_tol) {
            std::ostringstream msg;
            msg << "eigenvalue " << lambda << " numerically zero";
            throw ZeroEigenvalue(msg.str());
        }
}

// Column `col` of a complex matrix as a real Taylor series of order N,
// reporting (not rejecting) the discarded imaginary part.
inline std::pair<TruncatedSeries, double> real_series_from_column(const CMatrix& m, int col,
                                                                 int N, bool zero_constant) {
    std::vector<double> g(static_cast<std::size_t>(N) + 1, 0.0);
    double mi = 0.0;
    const int row0 = zero_constant ? 1 : 0;
    for (int k = row0; k <= N; ++k) {
        const Complex v = zero_constant ? m(k - 1, col) : m(k, col);
        g[static_cast<std::size_t>(k)] = v.real();
        mi = std::max(mi, std::abs(v.imag()));
    }
    return {TruncatedSeries::from_taylor(std::move(g)), mi};
}

inline Matrix checked_lu_inverse(const Matrix& m) {
    Matrix inv = m.partialPivLu().inverse();
    const double resid = ((m * inv) - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
    if (!inv.allFinite() || resid > 1e-9 * std::max(1.0, inf_norm(m)))
        throw NonInvertible("matrix inverse residual too large");
    return inv;
}

}  // namespace detail

// Continuous iteration. Bell path when g(0) = 0, Carleman path otherwise;
// integer alpha short-circuits to plain matrix powers so degenerate spectra
// (smoluchowski) still work there.
inline IterateResult iterate_series(const TruncatedSeries& G, double alpha, int N,
                                    double degeneracy_tol = -1.0) {
    const TruncatedSeries gt = truncate(G, N);
    if (gt.taylor(1) == 0.0)
        throw ZeroEigenvalue("iterate_series: g_1 = 0, series not iterable");
    const bool zero_constant = std::abs(gt.monomial(0)) <= detail::kZeroConstantTol;

    if (detail::is_integer(alpha)) {
        const long k = static_cast<long>(alpha);
        if (zero_constant) {
            auto p = bell_power_int(bell_matrix(gt, N), k);
            return IterateResult{series_from_bell(p), alpha, IteratePath::integer_power, 0.0, 0.0};
        }
        const Matrix c = carleman_direct(gt, N).entries;
        Matrix base = (k < 0) ? detail::checked_lu_inverse(c) : c;
        Matrix acc = Matrix::Identity(N + 1, N + 1);
        for (long i = 0, reps = std::labs(k); i < reps; ++i) acc = acc * base;
        auto [series, mi] = detail::real_series_from_column(acc.cast<Complex>(), 1, N, false);
        return IterateResult{std::move(series), alpha, IteratePath::integer_power, 0.0, mi};
    }

    const Matrix m = zero_constant ? bell_matrix(gt, N).entries : carleman_direct(gt, N).entries;
    const auto d = decompose(m, degeneracy_tol);
    detail::check_spectrum_invertible(d.eigenvalues, inf_norm(m));
    CMatrix p = apply_function(
        d, [alpha](Complex lambda) { return std::exp(alpha * std::log(lambda)); });
    const int col = zero_constant ? 0 : 1;
    auto [series, mi] = detail::real_series_from_column(p, col, N, zero_constant);
    return IterateResult{std::move(series), alpha,
                         zero_constant ? IteratePath::bell : IteratePath::carleman, d.gap, mi};
}

// Compositional inverse via the first column of B[g]^{-1} (triangular
// back-substitution, so g_1 = 1 is fine).
inline TruncatedSeries invert_series(const TruncatedSeries& g) {
    const int N = g.order();
    if (std::abs(g.monomial(0)) > detail::kZeroConstantTol)
        throw NonzeroConstantTerm("invert_series requires g(0) = 0");
    if (g.taylor(1) == 0.0)
        throw NonInvertible("invert_series: g_1 = 0");
    auto b = bell_matrix(g, N);
    return detail::series_from_first_column(N, detail::lower_triangular_inverse(b.entries));
}

// R_j(x) = sum_k Z_(j),k1 x^k / k!. Real spectrum only: with complex pairs the
// individual series are complex and cannot be represented here.
inline std::vector<TruncatedSeries> projector_functions(const TruncatedSeries& G, int N,
                                                        double degeneracy_tol = -1.0) {
    const auto d = decompose(carleman_direct(truncate(G, N), N).entries, degeneracy_tol);
    std::vector<TruncatedSeries> out;
    out.reserve(d.projectors.size());
    for (const auto& z : d.projectors) {
        auto [series, mi] = detail::real_series_from_column(z, 1, N, false);
        if (mi > 1e-9 * std::max(1.0, z.cwiseAbs().maxCoeff()))
            throw BranchViolation("projector function is complex (conjugate eigenvalue pair)");
        out.push_back(std::move(series));
    }
    return out;
}

// Taylor coefficients of sum_j f(lambda_j) Z_(j) read along column 1.
template <typename F>
TruncatedSeries apply_functional(const TruncatedSeries& G, F&& f, int N,
                                 double degeneracy_tol = -1.0) {
    const auto d = decompose(carleman_direct(truncate(G, N), N).entries, degeneracy_tol);
    const CMatrix m = apply_function(d, std::forward<F>(f));
    auto [series, mi] = detail::real_series_from_column(m, 1, N, false);
    if (mi > 1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw BranchViolation("functional result is not real");
    return series;
}

// Solve F o g = K F with K = g_1 by forward substitution (Eq. of the
// step-by-step Schroeder calculation): f_k = -(sum_{r<k} B_kr f_r)/(g_1^k - g_1).
inline SchroderSolution schroder_solve_bell(const TruncatedSeries& g, int N) {
    const TruncatedSeries gt = truncate(g, N);
    if (std::abs(gt.monomial(0)) > detail::kZeroConstantTol)
        throw NonzeroConstantTerm("schroder_solve_bell requires g(0) = 0");
    const double g1 = gt.taylor(1);
    if (g1 == 0.0) throw ZeroEigenvalue("schroder_solve_bell: K = g_1 = 0");
    double g1k = g1;
    for (int k = 2; k <= N; ++k) {
        g1k *= g1;
        if (std::abs(g1k - g1) <= 1e-12 * (std::abs(g1k) + std::abs(g1))) {
            std::ostringstream msg;
            msg << "multiplier resonance g_1^" << k << " = g_1 (g_1 = " << g1 << ")";
            throw DegenerateSpectrum(msg.str());
        }
    }
    const auto b = bell_matrix(gt, N);
    std::vector<double> f(static_cast<std::size_t>(N) + 1, 0.0);
    f[1] = 1.0;
    g1k = g1;
    for (int k = 2; k <= N; ++k) {
        g1k *= g1;
        double s = 0.0;
        for (int r = 1; r < k; ++r) s += b.entry(k, r) * f[static_cast<std::size_t>(r)];
        f[static_cast<std::size_t>(k)] = -s / (g1k - g1);
    }
    auto F = TruncatedSeries::from_taylor(std::move(f));
    auto resid_series = add(compose(F, gt), scale(F, -g1));
    // measured on monomial coefficients; the k! of the taylor scale would
    // swamp the defect for high orders
    double resid = 0.0;
    for (int k = 0; k <= N; ++k) resid = std::max(resid, std::abs(resid_series.monomial(k)));
    return SchroderSolution{g1, std::move(F), resid};
}

// Right eigenvectors of C[G], each scaled so its largest-magnitude entry is 1.
inline std::vector<std::pair<Complex, CVector>> schroder_eigenvectors_carleman(
    const TruncatedSeries& G, int N) {
    const Matrix c = carleman_direct(truncate(G, N), N).entries;
    Eigen::EigenSolver<Matrix> solver(c, true);
    if (solver.info() != Eigen::Success)
        throw IterationFailure("eigenvector iteration did not converge");
    const double cnorm = std::max(1.0, inf_norm(c));
    std::vector<std::pair<Complex, CVector>> out;
    out.reserve(static_cast<std::size_t>(c.rows()));
    const CMatrix cc = c.cast<Complex>();
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
        const Complex lambda = solver.eigenvalues()(j);
        CVector v = solver.eigenvectors().col(j);
        if ((cc * v - lambda * v).norm() > 1e-9 * cnorm * v.norm())
            throw IterationFailure("eigenpair residual exceeds contract");
        Eigen::Index at = 0;
        v.cwiseAbs().maxCoeff(&at);
        v /= v(at);
        out.emplace_back(lambda, std::move(v));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });
    return out;
}

}  // namespace carleman
