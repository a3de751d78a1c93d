#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wealthdist {

/// Machine-readable failure causes shared by every engine, the service and the CLI.
enum class ErrorCode {
    // numerics
    NonFiniteIntegrand,
    NoSignChange,
    MaxIterations,
    OutOfRange,
    // market
    SingularVolatility,
    RiskPriceOutOfBounds,
    TimeOutOfRange,
    // distributions and engines
    InvalidParameter,
    DegenerateMarkers,
    GrowthViolation,
    NoAnalyticExtension,
    IntegralDivergence,
    InfeasibleWealth,
    NoRoot,
    BudgetViolated,
    AssumptionViolated,
    ComplexResidue,
    DensityVanishes,
    RecoveryFailure,
    NegativeMass,
    SupportViolation,
    Inadmissible,
    // single-period builder
    NoArbitrageViolated,
    RootBracketFailure,
    DimensionMismatch,
    NotSubmitted,
    IllegalTransition,
    UnknownSession,
    // simulator
    EvaluationOutOfGrid,
    TimeMismatch,
    // wire
    SchemaViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for "mathematically valid refusals": the input was well formed but the
/// requested target or preference object does not exist. Everything else is a
/// fault or a malformed request.
bool is_refusal(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace wealthdist
