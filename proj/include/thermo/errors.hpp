#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

enum class ErrorKind {
    InvalidArgument,
    InvalidConfig,
    PoleProximity,
    LiftNonMonotone,
    RootEscape,
    LogSingularity,
    ZeroMultiplier,
    BudgetExceeded,
    NotFixed,
    ExceptionalPoint,
    NoConvergence,
    GapLost,
    NotFoundWithinBudget,
    SummabilityViolated,
    DivergentSeries,
    DegenerateVariance,
    NonDecaying,
    NotDoublyParabolic,
    BisectionFail,
    NoReturnWithinCap,
    TailBoundExceeded,
};

const char* to_string(ErrorKind kind);

// Budget and convergence failures are reported differently from bad input
// by the command line runner.
bool is_budget_or_convergence(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace thermo
