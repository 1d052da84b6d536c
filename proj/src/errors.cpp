#include "laxkit/errors.hpp"

namespace laxkit {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::PoleAtArgument: return "PoleAtArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotRankDeficient: return "NotRankDeficient";
    case ErrorKind::KernelDimensionTooLarge: return "KernelDimensionTooLarge";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::BoundaryTooClose: return "BoundaryTooClose";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::EvaluationAtPole: return "EvaluationAtPole";
    case ErrorKind::ResidueRankNotOne: return "ResidueRankNotOne";
    case ErrorKind::DegenerateDeterminant: return "DegenerateDeterminant";
    case ErrorKind::NotGeneralPosition: return "NotGeneralPosition";
    case ErrorKind::PairingInconsistent: return "PairingInconsistent";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::PoleAtZero: return "PoleAtZero";
    case ErrorKind::DegenerateL0: return "DegenerateL0";
    case ErrorKind::GaugeSingular: return "GaugeSingular";
    case ErrorKind::AllEntriesZero: return "AllEntriesZero";
    case ErrorKind::RootCountUnexpected: return "RootCountUnexpected";
    case ErrorKind::DegenerateRoot: return "DegenerateRoot";
    case ErrorKind::NotOnLeaf: return "NotOnLeaf";
    case ErrorKind::DegenerateConstraints: return "DegenerateConstraints";
    case ErrorKind::DegenerateDelta: return "DegenerateDelta";
    case ErrorKind::ZeroCountMismatch: return "ZeroCountMismatch";
    case ErrorKind::PairingClosureFailure: return "PairingClosureFailure";
    case ErrorKind::KernelSolveSingular: return "KernelSolveSingular";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
    }
    return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::InvariantViolation:
    case ErrorKind::UnknownSuite:
    case ErrorKind::DimensionMismatch:
        return true;
    default:
        return false;
    }
}

} // namespace laxkit
