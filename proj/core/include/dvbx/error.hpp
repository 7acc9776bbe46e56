#pragma once

#include <stdexcept>
#include <string>

namespace dvbx {

enum class ErrorCode {
    MissingAssignment,   // evaluate: fiber/symbol value absent
    DomainError,         // evaluate: ln of non-positive argument
    NonInvertible,       // division by a non-monomial expression
    UnsupportedShift,    // shift of a negative power of a base coordinate
    SignatureMismatch,   // combining objects from different space signatures
    BidegreeError,       // operation applied to a form of the wrong bidegree
    NotAFixedPoint,      // input is not fixed by the interior Euler projection
    NonPolynomial,       // vertical homotopy needs polynomial fiber dependence
    NegativeOffset,      // stencil translation skipped before F/h_h
    NotClosed,           // reconstruction input fails the closedness check
    VerificationFailed,  // a posteriori identity check left a nonzero residual
    HelmholtzFailed,     // source form is not variational
    AnsatzInsufficient,  // divergence inversion stencil too small at the cap
    PreconditionFailed,  // e.g. Noether called on a non-symmetry
    ParseError,          // DSL syntax error (message carries line/column)
    ConfigError,         // invalid run configuration
    ConvergenceError,    // Newton / fixed-point sweep did not converge
    SolverError,         // linear solve failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dvbx
