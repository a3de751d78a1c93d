#pragma once

#include "wealthdist/distributions.hpp"
#include "wealthdist/error.hpp"
#include "wealthdist/forward.hpp"
#include "wealthdist/market.hpp"
#include "wealthdist/simulator.hpp"
#include "wealthdist/single_period.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wealthdist::wire {

using json = nlohmann::json;

/// Reads a document; throws SchemaViolation on malformed text.
json parse(std::string_view text);

/// Compact text with round-trip exact numbers (shortest form of at most 17
/// significant digits).
std::string dump(const json& doc, int indent = -1);

/// Field accessors that raise SchemaViolation naming the offending path.
double number(const json& doc, const std::string& key, const std::string& where);
double number_or(const json& doc, const std::string& key, double fallback, const std::string& where);
std::string text_or(const json& doc, const std::string& key, const std::string& fallback,
                    const std::string& where);
std::vector<double> numbers(const json& doc, const std::string& key, const std::string& where);
const json& object(const json& doc, const std::string& key, const std::string& where);

/// {horizon, rate, drift, vol} for one constant piece, {horizon, lambda} for a
/// one-asset market with unit volatility and zero rate, or {horizon, pieces: [...]}.
MarketSpec market_from_json(const json& doc);
json to_json(const MarketSpec& spec);

/// Distribution as requested: family plus whichever parameters were given.
struct DistributionRequest {
    Family family = Family::Lognormal;
    std::optional<double> b;
    std::vector<double> levels;
    std::vector<std::pair<double, double>> table;
};

DistributionRequest distribution_from_json(const json& doc);
Family family_from_string(const std::string& name);

json to_json(const RecoveredMeasure& measure, double normalization);
json to_json(const BuilderSession& session, const std::string& id);
json to_json(const MarginalInference& inference);
json to_json(const QuantileFan& fan);
json to_json(const MartingaleResult& r);
json to_json(const KsResult& r);
json to_json(const SelfFinancingResult& r);

/// {"error": {"code", "message", "refusal"}}.
json error_body(ErrorCode code, const std::string& message);
json error_body(const std::string& code, const std::string& message);

}  // namespace wealthdist::wire
