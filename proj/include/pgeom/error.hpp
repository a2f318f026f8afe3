#ifndef PGEOM_ERROR_HPP
#define PGEOM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pgeom {

/// Error category, used by the CLI to pick an exit code and by tests
/// to assert on specific failure modes.
enum class ErrorKind {
    Parse,            // syntax error, unknown identifier, bad schema
    Validation,       // bad arguments, chart mismatch, odd constraint count
    Domain,           // log of non-positive, sqrt of negative, division by zero
    Overflow,         // exact arithmetic exceeded 64-bit bounds
    DegenerateStructure,
    DegenerateDelta,
    DimensionTooLarge,
    NotClosed,
    NotHamiltonian,
    NonPolynomialEntry,
    NotACasimir,
    NotFirstIntegral,
    Contradiction,
    StepLimit,
    SingularMatrix,
    Undecidable,      // zero test had no usable sample points
    Numeric           // non-finite state, singular-at-point, mid-run aborts
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace pgeom

#endif
