#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace carleman {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bell-matrix path requires g(0) = 0.
struct NonzeroConstantTerm : Error {
    explicit NonzeroConstantTerm(const std::string& msg) : Error(msg) {}
};

// Triangular back-substitution or matrix inversion hit a zero pivot.
struct NonInvertible : Error {
    explicit NonInvertible(const std::string& msg) : Error(msg) {}
};

// Negative matrix power requested while an eigenvalue is (numerically) zero.
struct ZeroEigenvalue : Error {
    explicit ZeroEigenvalue(const std::string& msg) : Error(msg) {}
};

// Eigenvalue gap below tolerance; Lagrange projectors would blow up.
struct DegenerateSpectrum : Error {
    explicit DegenerateSpectrum(const std::string& msg) : Error(msg) {}
};

// Backend eigenvalue iteration failed or residual check did not pass.
struct IterationFailure : Error {
    explicit IterationFailure(const std::string& msg) : Error(msg) {}
};

// Principal-branch power asked to cross the cut (lambda on the negative real
// axis with branch checks enabled).
struct BranchViolation : Error {
    explicit BranchViolation(const std::string& msg) : Error(msg) {}
};

// Tetration base outside (0, 1) ∪ (1, ∞).
struct BaseOutOfRange : Error {
    explicit BaseOutOfRange(const std::string& msg) : Error(msg) {}
};

// Exact integer combinatorics (Stirling / Bell numbers) left the 64-bit range.
struct ArithmeticOverflow : Error {
    explicit ArithmeticOverflow(const std::string& msg) : Error(msg) {}
};

// Argument outside an operation's documented domain (orders, ranges, ...).
struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& msg) : Error(msg) {}
};

// Malformed textual function spec; `position` is a byte offset into the input.
struct SpecParseError : Error {
    std::size_t position;
    SpecParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

}  // namespace carleman
