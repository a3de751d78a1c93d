#include "wealthdist/serialization.hpp"

#include <cmath>
#include <sstream>

namespace wealthdist::wire {
namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
    fail(ErrorCode::SchemaViolation, where + ": " + what);
}

const json& field(const json& doc, const std::string& key, const std::string& where) {
    if (!doc.is_object()) schema(where, "expected an object");
    const auto it = doc.find(key);
    if (it == doc.end()) schema(where, "missing field '" + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) schema(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) schema(where, "expected a finite number");
    return x;
}

Eigen::VectorXd vector_of(const json& v, const std::string& where) {
    if (v.is_number()) return Eigen::VectorXd::Constant(1, as_number(v, where));
    if (!v.is_array() || v.empty()) schema(where, "expected a non-empty array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = as_number(v[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

Eigen::MatrixXd matrix_of(const json& v, const std::string& where) {
    if (v.is_number()) return Eigen::MatrixXd::Constant(1, 1, as_number(v, where));
    if (!v.is_array() || v.empty()) schema(where, "expected a square array of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) schema(at, "row length mismatch");
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = as_number(row[static_cast<std::size_t>(j)], at);
    }
    return out;
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

}  // namespace

json parse(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(ErrorCode::SchemaViolation, std::string("malformed document: ") + e.what());
    }
}

std::string dump(const json& doc, int indent) {
    return doc.dump(indent, ' ', false, json::error_handler_t::replace);
}

double number(const json& doc, const std::string& key, const std::string& where) {
    return as_number(field(doc, key, where), where + "." + key);
}

double number_or(const json& doc, const std::string& key, double fallback, const std::string& where) {
    if (!doc.is_object()) schema(where, "expected an object");
    return doc.contains(key) ? as_number(doc.at(key), where + "." + key) : fallback;
}

std::string text_or(const json& doc, const std::string& key, const std::string& fallback,
                    const std::string& where) {
    if (!doc.is_object()) schema(where, "expected an object");
    if (!doc.contains(key)) return fallback;
    if (!doc.at(key).is_string()) schema(where + "." + key, "expected a string");
    return doc.at(key).get<std::string>();
}

std::vector<double> numbers(const json& doc, const std::string& key, const std::string& where) {
    const json& v = field(doc, key, where);
    if (!v.is_array()) schema(where + "." + key, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_number(v[i], where + "." + key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

const json& object(const json& doc, const std::string& key, const std::string& where) {
    const json& v = field(doc, key, where);
    if (!v.is_object()) schema(where + "." + key, "expected an object");
    return v;
}

MarketSpec market_from_json(const json& doc) {
    const std::string where = "market";
    if (!doc.is_object()) schema(where, "expected an object");
    const double horizon = number(doc, "horizon", where);
    MarketSpec spec;
    if (doc.contains("pieces")) {
        const json& pieces = doc.at("pieces");
        if (!pieces.is_array() || pieces.empty()) schema(where + ".pieces", "expected a non-empty array");
        spec.horizon = horizon;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const std::string at = where + ".pieces[" + std::to_string(i) + "]";
            const json& p = pieces[i];
            MarketPiece piece;
            piece.t_start = number(p, "t_start", at);
            piece.t_end = number(p, "t_end", at);
            piece.rate = number_or(p, "rate", 0.0, at);
            piece.drift = vector_of(field(p, "drift", at), at + ".drift");
            piece.vol = matrix_of(field(p, "vol", at), at + ".vol");
            spec.pieces.push_back(std::move(piece));
        }
        spec.d = static_cast<int>(spec.pieces.front().drift.size());
    } else if (doc.contains("lambda")) {
        const double lambda = number(doc, "lambda", where);
        spec = MarketSpec::black_scholes(0.0, lambda, 1.0, horizon);
    } else {
        const double rate = number_or(doc, "rate", 0.0, where);
        spec = MarketSpec::constant(rate, vector_of(field(doc, "drift", where), where + ".drift"),
                                    matrix_of(field(doc, "vol", where), where + ".vol"), horizon);
    }
    spec.lambda_min = number_or(doc, "lambda_min", spec.lambda_min, where);
    spec.lambda_max = number_or(doc, "lambda_max", spec.lambda_max, where);
    for (const auto& p : spec.pieces) {
        if (p.drift.size() != p.vol.rows() || p.vol.rows() != p.vol.cols() || p.drift.size() != spec.d) {
            schema(where, "drift and volatility dimensions disagree");
        }
    }
    return spec;
}

json to_json(const MarketSpec& spec) {
    json pieces = json::array();
    for (const auto& p : spec.pieces) {
        pieces.push_back({{"t_start", p.t_start}, {"t_end", p.t_end}, {"rate", p.rate},
                          {"drift", vector_json(p.drift)}, {"vol", matrix_json(p.vol)}});
    }
    return {{"horizon", spec.horizon}, {"pieces", pieces}, {"lambda_min", spec.lambda_min},
            {"lambda_max", spec.lambda_max}};
}

Family family_from_string(const std::string& name) {
    for (Family f : {Family::Lognormal, Family::TransformedNormal, Family::Markers,
                     Family::CustomQuantile, Family::WholeLine}) {
        if (name == to_string(f)) return f;
    }
    fail(ErrorCode::SchemaViolation, "distribution.family: unknown family '" + name + "'");
}

DistributionRequest distribution_from_json(const json& doc) {
    const std::string where = "distribution";
    if (doc.is_string()) return {family_from_string(doc.get<std::string>()), {}, {}, {}};
    if (!doc.is_object()) schema(where, "expected an object or a family name");
    const json& fam = field(doc, "family", where);
    if (!fam.is_string()) schema(where + ".family", "expected a string");
    DistributionRequest req;
    req.family = family_from_string(fam.get<std::string>());
    if (doc.contains("b")) req.b = number(doc, "b", where);
    switch (req.family) {
        case Family::Markers:
            req.levels = numbers(doc, "levels", where);
            break;
        case Family::CustomQuantile: {
            const json& t = field(doc, "table", where);
            if (!t.is_array()) schema(where + ".table", "expected an array of [p, x] pairs");
            for (std::size_t i = 0; i < t.size(); ++i) {
                const std::string at = where + ".table[" + std::to_string(i) + "]";
                if (!t[i].is_array() || t[i].size() != 2) schema(at, "expected [p, x]");
                req.table.emplace_back(as_number(t[i][0], at), as_number(t[i][1], at));
            }
            break;
        }
        default:
            break;
    }
    return req;
}

json to_json(const RecoveredMeasure& measure, double normalization) {
    json out;
    out["admissible"] = measure.admissible;
    out["normalization"] = normalization;
    out["total_mass"] = measure.total_mass;
    out["fit_residual"] = measure.fit_residual;
    if (measure.form == RecoveredMeasure::Form::Atomic) {
        out["form"] = "atomic";
        json atoms = json::array();
        for (const auto& a : measure.atoms) atoms.push_back({{"y", a.location}, {"m", a.mass}});
        out["atoms"] = atoms;
    } else {
        out["form"] = "density";
        out["clipped_mass"] = measure.clipped_mass;
        json grid = json::array();
        for (const auto& a : measure.atoms) grid.push_back({{"y", a.location}, {"w", a.mass / measure.dy}});
        out["grid"] = grid;
    }
    return out;
}

json to_json(const BuilderSession& session, const std::string& id) {
    const auto& m = session.market();
    json out = {{"id", id},
                {"N", m.N},
                {"budget", session.budget()},
                {"r", m.r},
                {"mu", m.mu},
                {"sigma", m.sigma},
                {"markers", session.markers()},
                {"cost", session.cost()},
                {"cost_fraction", session.cost() / session.budget()},
                {"status", std::string(to_string(session.status()))},
                {"state_prices", m.state_prices},
                {"stock_states", m.stock_states},
                {"pricing_exponent", {{"b", m.pricing.b}, {"a", m.pricing.a}}}};
    if (const auto& r = session.realization()) {
        out["realized"] = {{"state", r->state}, {"wealth", r->wealth}};
    }
    return out;
}

json to_json(const MarginalInference& inference) {
    json pts = json::array();
    for (const auto& p : inference.points) pts.push_back({{"wealth", p.wealth}, {"marginal_utility", p.marginal_utility}});
    return {{"points", pts}, {"degenerate", inference.degenerate}};
}

json to_json(const QuantileFan& fan) {
    return {{"levels", fan.levels}, {"times", fan.times}, {"wealth", fan.wealth}, {"portfolio", fan.portfolio}};
}

json to_json(const MartingaleResult& r) {
    return {{"estimate", r.estimate}, {"std_error", r.std_error}, {"pass", r.pass}};
}

json to_json(const KsResult& r) {
    return {{"statistic", r.statistic}, {"threshold", r.threshold}, {"pass", r.pass}};
}

json to_json(const SelfFinancingResult& r) {
    return {{"median_coarse", r.median_coarse}, {"median_fine", r.median_fine}, {"ratio", r.ratio},
            {"pass", r.pass}};
}

json error_body(ErrorCode code, const std::string& message) {
    return {{"error", {{"code", std::string(to_string(code))}, {"message", message}, {"refusal", is_refusal(code)}}}};
}

json error_body(const std::string& code, const std::string& message) {
    return {{"error", {{"code", code}, {"message", message}, {"refusal", false}}}};
}

}  // namespace wealthdist::wire
