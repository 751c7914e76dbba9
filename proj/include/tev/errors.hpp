#pragma once

#include <stdexcept>
#include <string>

namespace tev {

// Base class for all toolkit errors. Subclasses mirror the failure modes of
// the individual solvers so callers can react per category.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Material parameters do not fall into a coefficient regime the solver supports.
struct RegimeError : Error {
    using Error::Error;
};

// Argument outside a function's documented working range.
struct RangeError : Error {
    using Error::Error;
};

// Coefficient shape not supported by the requested backend (e.g. the radial
// disk solver needs A = aI).
struct ShapeError : Error {
    using Error::Error;
};

// A root scan finished without bracketing a sign change.
struct NoRootInRange : Error {
    using Error::Error;
};

// The determinant curve vanishes identically; the medium carries no
// spectral information (a = n = 1, eta = 0).
struct DegenerateMedium : Error {
    using Error::Error;
};

// Bad run configuration (unknown domain kind, inconsistent knobs, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Malformed input file; carries the 1-based line number where parsing stopped.
struct ParseError : Error {
    ParseError(const std::string& what, int line_no)
        : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    int line;
};

// Structural invariant of a loaded or constructed object is violated.
struct ValidationError : Error {
    using Error::Error;
};

// Sparse Cholesky hit a nonpositive pivot. Upstream this signals a regime or
// mesh inconsistency, not merely a linear-algebra failure.
struct FactorizationError : Error {
    using Error::Error;
};

// Eigensolver ran out of iterations; carries the best Rayleigh quotient seen.
struct NoConvergence : Error {
    NoConvergence(const std::string& what, double best_value_, int iterations_)
        : Error(what), best_value(best_value_), iterations(iterations_) {}
    double best_value;
    int iterations;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace tev
