#include "thermo/errors.hpp"

namespace thermo {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::PoleProximity: return "PoleProximity";
        case ErrorKind::LiftNonMonotone: return "LiftNonMonotone";
        case ErrorKind::RootEscape: return "RootEscape";
        case ErrorKind::LogSingularity: return "LogSingularity";
        case ErrorKind::ZeroMultiplier: return "ZeroMultiplier";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::NotFixed: return "NotFixed";
        case ErrorKind::ExceptionalPoint: return "ExceptionalPoint";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::GapLost: return "GapLost";
        case ErrorKind::NotFoundWithinBudget: return "NotFoundWithinBudget";
        case ErrorKind::SummabilityViolated: return "SummabilityViolated";
        case ErrorKind::DivergentSeries: return "DivergentSeries";
        case ErrorKind::DegenerateVariance: return "DegenerateVariance";
        case ErrorKind::NonDecaying: return "NonDecaying";
        case ErrorKind::NotDoublyParabolic: return "NotDoublyParabolic";
        case ErrorKind::BisectionFail: return "BisectionFail";
        case ErrorKind::NoReturnWithinCap: return "NoReturnWithinCap";
        case ErrorKind::TailBoundExceeded: return "TailBoundExceeded";
    }
    return "Unknown";
}

bool is_budget_or_convergence(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::BudgetExceeded:
        case ErrorKind::NoConvergence:
        case ErrorKind::GapLost:
        case ErrorKind::NotFoundWithinBudget:
        case ErrorKind::SummabilityViolated:
        case ErrorKind::DivergentSeries:
        case ErrorKind::NonDecaying:
        case ErrorKind::BisectionFail:
        case ErrorKind::NoReturnWithinCap:
        case ErrorKind::TailBoundExceeded:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace thermo
