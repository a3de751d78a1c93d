#include "wealthdist/error.hpp"

namespace wealthdist {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
        case ErrorCode::NoSignChange: return "NoSignChange";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::SingularVolatility: return "SingularVolatility";
        case ErrorCode::RiskPriceOutOfBounds: return "RiskPriceOutOfBounds";
        case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::DegenerateMarkers: return "DegenerateMarkers";
        case ErrorCode::GrowthViolation: return "GrowthViolation";
        case ErrorCode::NoAnalyticExtension: return "NoAnalyticExtension";
        case ErrorCode::IntegralDivergence: return "IntegralDivergence";
        case ErrorCode::InfeasibleWealth: return "InfeasibleWealth";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::BudgetViolated: return "BudgetViolated";
        case ErrorCode::AssumptionViolated: return "AssumptionViolated";
        case ErrorCode::ComplexResidue: return "ComplexResidue";
        case ErrorCode::DensityVanishes: return "DensityVanishes";
        case ErrorCode::RecoveryFailure: return "RecoveryFailure";
        case ErrorCode::NegativeMass: return "NegativeMass";
        case ErrorCode::SupportViolation: return "SupportViolation";
        case ErrorCode::Inadmissible: return "Inadmissible";
        case ErrorCode::NoArbitrageViolated: return "NoArbitrageViolated";
        case ErrorCode::RootBracketFailure: return "RootBracketFailure";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotSubmitted: return "NotSubmitted";
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::EvaluationOutOfGrid: return "EvaluationOutOfGrid";
        case ErrorCode::TimeMismatch: return "TimeMismatch";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
    }
    return "Unknown";
}

bool is_refusal(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InfeasibleWealth:
        case ErrorCode::GrowthViolation:
        case ErrorCode::NoAnalyticExtension:
        case ErrorCode::AssumptionViolated:
        case ErrorCode::Inadmissible:
        case ErrorCode::SupportViolation:
        case ErrorCode::NoRoot:
        case ErrorCode::BudgetViolated:
        case ErrorCode::NoArbitrageViolated:
        case ErrorCode::DegenerateMarkers:
        case ErrorCode::RiskPriceOutOfBounds:
        case ErrorCode::SingularVolatility:
        case ErrorCode::IntegralDivergence:
        case ErrorCode::RecoveryFailure:
        case ErrorCode::NegativeMass:
        case ErrorCode::ComplexResidue:
        case ErrorCode::DensityVanishes:
            return true;
        default:
            return false;
    }
}

}  // namespace wealthdist
