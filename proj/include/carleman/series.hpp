#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "carleman/errors.hpp"

namespace carleman {

// Formal power series truncated at order N, G(x) = sum_k g_k x^k / k!.
// Stored internally as monomial coefficients a_k = g_k/k! (convolution-friendly,
// no factorial overflow at large N); the public contract is the taylor
// (derivative) convention g_k.
class TruncatedSeries {
public:
    static TruncatedSeries from_taylor(std::vector<double> g) {
        check_size(g.size());
        std::vector<double> a(g.size());
        double kfac = 1.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (k > 0) kfac *= static_cast<double>(k);
            a[k] = g[k] / kfac;
        }
        return TruncatedSeries(std::move(a));
    }

    static TruncatedSeries from_monomial(std::vector<double> a) {
        check_size(a.size());
        return TruncatedSeries(std::move(a));
    }

    static TruncatedSeries zero(int order) {
        return TruncatedSeries(std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    }

    int order() const { return static_cast<int>(mono_.size()) - 1; }

    double monomial(int k) const { return mono_[static_cast<std::size_t>(k)]; }

    double taylor(int k) const {
        double kfac = 1.0;
        for (int i = 2; i <= k; ++i) kfac *= i;
        return mono_[static_cast<std::size_t>(k)] * kfac;
    }

    const std::vector<double>& monomial_coefficients() const { return mono_; }

    std::vector<double> taylor_coefficients() const {
        std::vector<double> g(mono_.size());
        double kfac = 1.0;
        for (std::size_t k = 0; k < mono_.size(); ++k) {
            if (k > 0) kfac *= static_cast<double>(k);
            g[k] = mono_[k] * kfac;
        }
        return g;
    }

private:
    explicit TruncatedSeries(std::vector<double> mono) : mono_(std::move(mono)) {}

    static void check_size(std::size_t n) {
        if (n < 2)
            throw InvalidParameter("series order must be at least 1");
    }

    std::vector<double> mono_;
};

inline TruncatedSeries truncate(const TruncatedSeries& s, int order) {
    std::vector<double> a(s.monomial_coefficients());
    a.resize(static_cast<std::size_t>(order) + 1, 0.0);
    return TruncatedSeries::from_monomial(std::move(a));
}

// Horner evaluation of the truncated polynomial.
inline double evaluate(const TruncatedSeries& s, double x) {
    double r = 0.0;
    for (int k = s.order(); k >= 0; --k) r = r * x + s.monomial(k);
    return r;
}

inline TruncatedSeries add(const TruncatedSeries& f, const TruncatedSeries& g) {
    const int n = std::min(f.order(), g.order());
    std::vector<double> a(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) a[static_cast<std::size_t>(k)] = f.monomial(k) + g.monomial(k);
    return TruncatedSeries::from_monomial(std::move(a));
}

inline TruncatedSeries scale(const TruncatedSeries& f, double c) {
    std::vector<double> a(f.monomial_coefficients());
    for (double& v : a) v *= c;
    return TruncatedSeries::from_monomial(std::move(a));
}

// Cauchy product truncated at the smaller order.
inline TruncatedSeries multiply(const TruncatedSeries& f, const TruncatedSeries& g) {
    const int n = std::min(f.order(), g.order());
    std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        const double fi = f.monomial(i);
        if (fi == 0.0) continue;
        for (int j = 0; j <= n - i; ++j)
            a[static_cast<std::size_t>(i + j)] += fi * g.monomial(j);
    }
    return TruncatedSeries::from_monomial(std::move(a));
}

// f(g(x)) with f treated as a degree-N polynomial (Horner over series).
// Exact to order N when g(0) = 0; for g(0) != 0 this is polynomial-composition
// semantics: f's discarded tail is simply absent, no resummation is attempted.
inline TruncatedSeries compose(const TruncatedSeries& f, const TruncatedSeries& g) {
    const int n = std::min(f.order(), g.order());
    TruncatedSeries r = TruncatedSeries::zero(n);
    const TruncatedSeries gt = truncate(g, n);
    for (int k = n; k >= 0; --k) {
        r = multiply(r, gt);
        std::vector<double> a(r.monomial_coefficients());
        a[0] += f.monomial(k);
        r = TruncatedSeries::from_monomial(std::move(a));
    }
    return r;
}

inline TruncatedSeries identity_series(int order) {
    std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
    a[1] = 1.0;
    return TruncatedSeries::from_monomial(std::move(a));
}

// Catalog of named series used throughout as inputs and oracles.
// params: exp_base takes {a}; affine takes {g0, g1}; others take none.
inline TruncatedSeries named_series(const std::string& name, int order,
                                    const std::vector<double>& params = {}) {
    const auto n = static_cast<std::size_t>(order);
    std::vector<double> a(n + 1, 0.0);
    if (name == "exp") {
        double kfac = 1.0;
        for (std::size_t k = 0; k <= n; ++k) {
            if (k > 0) kfac *= static_cast<double>(k);
            a[k] = 1.0 / kfac;
        }
    } else if (name == "exp_base") {
        if (params.size() != 1)
            throw InvalidParameter("exp_base needs one parameter (the base)");
        if (params[0] <= 0.0)
            throw BaseOutOfRange("exp_base requires a > 0");
        const double l = std::log(params[0]);
        double term = 1.0;  // l^k / k!
        for (std::size_t k = 0; k <= n; ++k) {
            if (k > 0) term *= l / static_cast<double>(k);
            a[k] = term;
        }
    } else if (name == "affine") {
        if (params.size() != 2)
            throw InvalidParameter("affine needs two parameters (g0, g1)");
        a[0] = params[0];
        a[1] = params[1];
    } else if (name == "logistic") {  // 4x(1-x)
        a[1] = 4.0;
        if (n >= 2) a[2] = -4.0;
    } else if (name == "smoluchowski") {  // x/(1+x)
        for (std::size_t k = 1; k <= n; ++k) a[k] = (k % 2 == 1) ? 1.0 : -1.0;
    } else if (name == "identity") {
        a[1] = 1.0;
    } else if (name == "xe^x") {
        double kfac = 1.0;  // a_k = 1/(k-1)!
        for (std::size_t k = 1; k <= n; ++k) {
            if (k > 1) kfac *= static_cast<double>(k - 1);
            a[k] = 1.0 / kfac;
        }
    } else if (name == "arcsin_sq") {  // q(x) = (arcsin sqrt(x))^2
        double term = 1.0;  // 4^n / (2 n^2 binom(2n,n)), by ratio recurrence
        for (std::size_t k = 1; k <= n; ++k) {
            if (k > 1) {
                const double m = static_cast<double>(k);
                term *= 2.0 * (m - 1.0) * (m - 1.0) / (m * (2.0 * m - 1.0));
            }
            a[k] = term;
        }
    } else if (name == "sin_sq_sqrt") {  // h(z) = sin^2(sqrt(z))
        double term = 1.0;  // (-1)^{k+1} 4^k / (2 (2k)!)
        for (std::size_t k = 1; k <= n; ++k) {
            if (k > 1) {
                const double m = static_cast<double>(k);
                term *= -4.0 / ((2.0 * m) * (2.0 * m - 1.0));
            }
            a[k] = term;
        }
    } else {
        throw InvalidParameter("unknown series name: " + name);
    }
    return TruncatedSeries::from_monomial(std::move(a));
}

}  // namespace carleman
