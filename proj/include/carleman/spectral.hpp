#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/linalg.hpp"

namespace carleman {

using Complex = std::complex<double>;

// Eigenvalues plus Lagrange projectors Z_j with
//   M Z_j = lambda_j Z_j,  sum_j Z_j = I,  Z_i Z_j = delta_ij Z_j,  tr Z_j = 1.
struct SpectralDecomposition {
    std::vector<Complex> eigenvalues;  // sorted by (re, im)
    std::vector<CMatrix> projectors;
    double gap = 0.0;                  // minimum pairwise eigenvalue distance
};

namespace detail {

inline bool is_triangular(const Matrix& m) {
    bool lower = true, upper = true;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i < j && m(i, j) != 0.0) lower = false;
            if (i > j && m(i, j) != 0.0) upper = false;
        }
    return lower || upper;
}

}  // namespace detail

// Full spectrum of a dense unsymmetric matrix (balanced Hessenberg + shifted QR
// via Eigen). Every returned pair is residual-checked: |Mv - lambda v| must not
// exceed 1e-10 |M| |v|. Triangular input short-circuits to the exact diagonal;
// QR would otherwise scatter defective repeated eigenvalues (Bell matrices at
// g_1 = 1) far enough to defeat the degeneracy check.
inline std::vector<Complex> eigenvalues(const Matrix& m) {
    if (detail::is_triangular(m)) {
        std::vector<Complex> out;
        out.reserve(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m(i, i), 0.0);
        std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
            return a.real() < b.real();
        });
        return out;
    }
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw IterationFailure("eigenvalue iteration did not converge");
    const double mnorm = std::max(inf_norm(m), std::numeric_limits<double>::min());
    const CMatrix mc = m.cast<Complex>();
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        const Complex lambda = solver.eigenvalues()(j);
        const CVector v = solver.eigenvectors().col(j);
        const double resid = (mc * v - lambda * v).norm();
        if (resid > 1e-10 * mnorm * v.norm()) {
            std::ostringstream msg;
            msg << "eigenpair residual " << resid << " exceeds contract for lambda = " << lambda;
            throw IterationFailure(msg.str());
        }
        out.push_back(lambda);
    }
    std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

// Minimum pairwise distance, or DegenerateSpectrum naming the offending pair.
inline double check_nondegenerate(const std::vector<Complex>& eigs, double tol) {
    double gap = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < eigs.size(); ++i)
        for (std::size_t j = i + 1; j < eigs.size(); ++j) {
            const double d = std::abs(eigs[i] - eigs[j]);
            if (d < gap) {
                gap = d;
                bi = i;
                bj = j;
            }
        }
    if (eigs.size() > 1 && gap < tol) {
        std::ostringstream msg;
        msg << "eigenvalue gap " << gap << " below tolerance " << tol << " for pair ("
            << eigs[bi] << ", " << eigs[bj] << ")";
        throw DegenerateSpectrum(msg.str());
    }
    return gap;
}

inline double default_degeneracy_tol(const Matrix& m) { return 1e-8 * inf_norm(m); }

// Lagrange form Z_j = prod_{i != j} (M - lambda_i I)/(lambda_j - lambda_i).
// Factors are multiplied largest |lambda_j - lambda_i| first to limit
// cancellation in the small factors.
inline std::vector<CMatrix> projectors(const Matrix& m, const std::vector<Complex>& eigs) {
    const auto n = static_cast<std::size_t>(eigs.size());
    const CMatrix mc = m.cast<Complex>();
    const CMatrix id = CMatrix::Identity(m.rows(), m.cols());
    std::vector<CMatrix> zs;
    zs.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < n; ++i)
            if (i != j) others.push_back(i);
        std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(eigs[j] - eigs[a]) > std::abs(eigs[j] - eigs[b]);
        });
        CMatrix z = id;
        for (std::size_t i : others) z = (z * (mc - eigs[i] * id)) / (eigs[j] - eigs[i]);
        zs.push_back(std::move(z));
    }
    return zs;
}

// tol < 0 selects the default 1e-8 |M|.
inline SpectralDecomposition decompose(const Matrix& m, double tol = -1.0) {
    if (tol < 0.0) tol = default_degeneracy_tol(m);
    auto eigs = eigenvalues(m);
    const double gap = check_nondegenerate(eigs, tol);
    auto zs = projectors(m, eigs);
    return SpectralDecomposition{std::move(eigs), std::move(zs), gap};
}

// sum_j f(lambda_j) Z_j on an existing decomposition; complex result.
template <typename F>
CMatrix apply_function(const SpectralDecomposition& d, F&& f) {
    CMatrix sum = CMatrix::Zero(d.projectors.front().rows(), d.projectors.front().cols());
    for (std::size_t j = 0; j < d.eigenvalues.size(); ++j) {
        const Complex w = f(d.eigenvalues[j]);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
            std::ostringstream msg;
            msg << "function not defined at eigenvalue " << d.eigenvalues[j];
            throw BranchViolation(msg.str());
        }
        sum += w * d.projectors[j];
    }
    return sum;
}

namespace detail {

inline double max_imag(const CMatrix& m) { return m.imag().cwiseAbs().maxCoeff(); }

// Real truncation with a hard guard: the imaginary part must be rounding noise.
inline Matrix real_checked(const CMatrix& m, const char* what) {
    const double im = max_imag(m);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (im > 1e-8 * scale) {
        std::ostringstream msg;
        msg << what << " has non-negligible imaginary part " << im
            << " (eigenvalues on the negative real axis raised to a non-integer power?)";
        throw BranchViolation(msg.str());
    }
    return m.real();
}

}  // namespace detail

// F(M) = sum f(lambda_j) Z_j, truncated to real. Requires f to map conjugate
// eigenvalue pairs to conjugate values; otherwise the result is genuinely
// complex and BranchViolation is thrown.
template <typename F>
Matrix matrix_function(const Matrix& m, F&& f, double tol = -1.0) {
    const auto d = decompose(m, tol);
    return detail::real_checked(apply_function(d, std::forward<F>(f)), "matrix function");
}

// M^t via exp(t Log lambda), principal branch.
inline Matrix matrix_power(const Matrix& m, double t, double tol = -1.0) {
    const auto d = decompose(m, tol);
    const double zero_tol = 1e-12 * std::max(1.0, inf_norm(m));
    for (const Complex& lambda : d.eigenvalues)
        if (std::abs(lambda) <= zero_tol) {
            std::ostringstream msg;
            msg << "matrix_power: eigenvalue " << lambda << " numerically zero";
            throw ZeroEigenvalue(msg.str());
        }
    CMatrix p = apply_function(d, [t](Complex lambda) { return std::exp(t * std::log(lambda)); });
    return detail::real_checked(p, "matrix power");
}

}  // namespace carleman
