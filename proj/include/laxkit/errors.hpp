#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace laxkit {

enum class ErrorKind {
    // special functions
    NonConvergent,
    Overflow,
    PoleAtArgument,
    // linear algebra and root finding
    DimensionMismatch,
    Singular,
    NotRankDeficient,
    KernelDimensionTooLarge,
    DegenerateLeadingCoefficient,
    BoundaryTooClose,
    CountMismatch,
    // rational Lax matrices
    EvaluationAtPole,
    ResidueRankNotOne,
    DegenerateDeterminant,
    NotGeneralPosition,
    PairingInconsistent,
    PoleHit,
    PoleAtZero,
    DegenerateL0,
    // Sklyanin
    GaugeSingular,
    AllEntriesZero,
    RootCountUnexpected,
    DegenerateRoot,
    NotOnLeaf,
    DegenerateConstraints,
    // chains
    DegenerateDelta,
    ZeroCountMismatch,
    PairingClosureFailure,
    KernelSolveSingular,
    // I/O
    ParseError,
    InvariantViolation,
    UnknownSuite,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Input errors map to CLI exit code 2, everything else to 3.
bool is_input_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

} // namespace laxkit
