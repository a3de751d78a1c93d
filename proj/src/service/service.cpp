#include "wealthdist/service.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/fixed_horizon.hpp"
#include "wealthdist/forward.hpp"
#include "wealthdist/intermediate.hpp"
#include "wealthdist/rng.hpp"
#include "wealthdist/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <vector>

namespace wealthdist::api {
namespace {

enum class Mode { Terminal, Intermediate, Forward };

Mode mode_from(const std::string& s) {
    if (s == "terminal") return Mode::Terminal;
    if (s == "intermediate") return Mode::Intermediate;
    if (s == "forward") return Mode::Forward;
    fail(ErrorCode::SchemaViolation, "mode: expected terminal, intermediate or forward, got '" + s + "'");
}

std::string_view mode_name(Mode m) {
    switch (m) {
        case Mode::Terminal: return "terminal";
        case Mode::Intermediate: return "intermediate";
        case Mode::Forward: return "forward";
    }
    return "terminal";
}

struct Problem {
    MarketCurves curves;
    TargetDistribution dist;
    double x0;
    Mode mode;
    double target;
    std::optional<double> solved;
};

TargetDistribution build_distribution(const wire::DistributionRequest& req, double b, double A_target) {
    switch (req.family) {
        case Family::Lognormal: return lognormal_family(b);
        case Family::TransformedNormal: return transformed_normal_family(b);
        case Family::Markers: return from_markers(req.levels);
        case Family::CustomQuantile: return from_quantile_table(req.table);
        case Family::WholeLine: return whole_line_example(A_target);
    }
    fail(ErrorCode::SchemaViolation, "distribution.family: unsupported");
}

Problem resolve(const json& req) {
    if (!req.is_object()) fail(ErrorCode::SchemaViolation, "request: expected an object");
    MarketCurves curves(wire::market_from_json(wire::object(req, "market", "request")));
    const double x0 = wire::number(req, "x0", "request");
    const Mode mode = mode_from(wire::text_or(req, "mode", "terminal", "request"));
    const double target = wire::number_or(req, "target_time", curves.horizon(), "request");
    if (!req.contains("distribution")) fail(ErrorCode::SchemaViolation, "request: missing field 'distribution'");
    const auto dreq = wire::distribution_from_json(req.at("distribution"));
    const bool parametric = dreq.family == Family::Lognormal || dreq.family == Family::TransformedNormal;
    std::optional<double> solved;
    double b = dreq.b.value_or(0.0);
    if (parametric && !dreq.b) {
        b = solve_family_parameter(dreq.family, x0, curves, target);
        solved = b;
    }
    const double A_target = horizon_variance(curves, target);
    TargetDistribution dist = build_distribution(dreq, b, A_target);
    return Problem{std::move(curves), std::move(dist), x0, mode, target, solved};
}

// 100 wealth levels spanning the target's 0.1% to 99.9% quantiles.
std::vector<double> wealth_grid(const TargetDistribution& dist) {
    const double lo = dist.quantile(0.001);
    const double hi = dist.quantile(0.999);
    std::vector<double> x(100);
    const bool geometric = lo > 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = static_cast<double>(i) / 99.0;
        x[i] = geometric ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
    }
    return x;
}

std::uint64_t integer_or(const json& doc, const std::string& key, std::uint64_t fallback,
                         const std::string& where) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        fail(ErrorCode::SchemaViolation, where + "." + key + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string hex_id(std::uint64_t seed, std::uint64_t counter) {
    const auto block = rng::Philox4x32(seed).block(counter, 0xB1D);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%08x%08x", block[0], block[1]);
    return buf;
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') {
            ++i;
            continue;
        }
        const std::size_t j = path.find('/', i);
        const std::size_t end = j == std::string_view::npos ? path.size() : j;
        parts.push_back(path.substr(i, end - i));
        i = end;
    }
    return parts;
}

}  // namespace

std::pair<std::string, int> parse_bind(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) fail(ErrorCode::InvalidParameter, "bind address must be host:port");
    const std::string host = addr.substr(0, colon);
    const std::string port_text = addr.substr(colon + 1);
    char* end = nullptr;
    const long port = std::strtol(port_text.c_str(), &end, 10);
    if (host.empty() || end == port_text.c_str() || *end != '\0' || port < 0 || port > 65535) {
        fail(ErrorCode::InvalidParameter, "bind address must be host:port, got '" + addr + "'");
    }
    return {host, static_cast<int>(port)};
}

ServiceConfig ServiceConfig::from_env() {
    ServiceConfig cfg;
    if (const char* bind = std::getenv("WEALTHDIST_BIND")) std::tie(cfg.host, cfg.port) = parse_bind(bind);
    if (const char* ttl = std::getenv("WEALTHDIST_SESSION_TTL")) {
        const long v = std::strtol(ttl, nullptr, 10);
        if (v <= 0) fail(ErrorCode::InvalidParameter, "WEALTHDIST_SESSION_TTL must be a positive number of seconds");
        cfg.session_ttl = std::chrono::seconds(v);
    }
    if (const char* nodes = std::getenv("WEALTHDIST_QUADRATURE_NODES")) {
        cfg.quadrature.node_count = static_cast<int>(std::strtol(nodes, nullptr, 10));
    }
    if (const char* scheme = std::getenv("WEALTHDIST_QUADRATURE_SCHEME")) {
        const std::string s(scheme);
        if (s == "gauss-hermite") {
            cfg.quadrature.scheme = numerics::Scheme::GaussHermite;
        } else if (s == "adaptive-trapezoid") {
            cfg.quadrature.scheme = numerics::Scheme::AdaptiveTrapezoid;
        } else {
            fail(ErrorCode::InvalidParameter, "WEALTHDIST_QUADRATURE_SCHEME: unknown scheme '" + s + "'");
        }
    }
    cfg.quadrature.validate();
    return cfg;
}

json feasibility(const json& request, const numerics::QuadratureSpec& spec) {
    spec.validate();
    const Problem p = resolve(request);
    const double budget = p.mode == Mode::Intermediate
                              ? budget_constraint_intermediate(p.dist, p.curves, p.target, spec)
                              : budget_constraint_terminal(p.dist, p.curves, p.target, spec);
    json out = {{"mode", mode_name(p.mode)},
                {"family", to_string(p.dist.family())},
                {"target_time", p.target},
                {"A_target", p.curves.A(p.target)},
                {"budget_value", budget},
                {"feasible", std::abs(budget - p.x0) <= kBudgetTolerance * std::abs(p.x0)}};
    if (p.solved) out["solved_parameter"] = *p.solved;
    return out;
}

json preferences(const json& request, const numerics::QuadratureSpec& spec) {
    spec.validate();
    const Problem p = resolve(request);
    json out = {{"mode", mode_name(p.mode)}, {"family", to_string(p.dist.family())}, {"target_time", p.target}};
    if (p.solved) out["solved_parameter"] = *p.solved;
    switch (p.mode) {
        case Mode::Terminal: {
            const auto marginal = marginal_utility_terminal(p.dist, p.curves, p.target, p.x0);
            json samples = json::array();
            for (double x : wealth_grid(p.dist)) samples.push_back({{"x", x}, {"value", marginal(x)}});
            out["kind"] = "terminal-marginal-utility";
            out["samples"] = samples;
            break;
        }
        case Mode::Intermediate: {
            const auto sol = solve_intermediate(p.dist, p.curves, p.target, p.x0, spec);
            json samples = json::array();
            for (int i = 0; i <= 40; ++i) {
                const double y = -2.0 + 0.1 * i;
                samples.push_back({{"x", y}, {"marginal", std::exp(-y)}, {"value", sol.inverse_marginal(std::exp(-y))}});
            }
            out["kind"] = "inverse-marginal-utility";
            out["c"] = sol.c;
            out["samples"] = samples;
            break;
        }
        case Mode::Forward: {
            ForwardOptions opts;
            opts.quadrature = spec;
            const auto sol = solve_forward(p.dist, p.curves, p.target, p.x0, opts);
            json datum = json::array();
            for (double x : wealth_grid(p.dist)) datum.push_back({{"x", x}, {"value", sol.initial_datum(x)}});
            out["kind"] = "forward-measure";
            out["measure"] = wire::to_json(sol.canonical, sol.budget);
            out["budget_measure"] = wire::to_json(sol.measure, 1.0);
            out["initial_datum"] = datum;
            break;
        }
    }
    return out;
}

json simulate(const json& request, const numerics::QuadratureSpec& spec, PathBundle* bundle_out) {
    spec.validate();
    const Problem p = resolve(request);
    const json sim = request.contains("simulation") ? request.at("simulation") : json::object();
    if (!sim.is_object()) fail(ErrorCode::SchemaViolation, "simulation: expected an object");

    SimulationConfig cfg;
    cfg.horizon = p.mode == Mode::Intermediate ? p.curves.horizon() : p.target;
    cfg.target_time = p.target;
    cfg.path_count = integer_or(sim, "paths", 100000, "simulation");
    cfg.dt = wire::number_or(sim, "dt", 1e-3 * cfg.horizon, "simulation");
    cfg.seed = integer_or(sim, "seed", 0, "simulation");
    cfg.snapshots = static_cast<int>(integer_or(sim, "snapshots", 20, "simulation"));
    cfg.threads = static_cast<unsigned>(integer_or(sim, "threads", 0, "simulation"));
    if (sim.contains("checks")) {
        const json& checks = sim.at("checks");
        if (!checks.is_array()) fail(ErrorCode::SchemaViolation, "simulation.checks: expected an array");
        cfg.martingale = cfg.ks = cfg.self_financing = false;
        for (const auto& c : checks) {
            const std::string name = c.is_string() ? c.get<std::string>() : "";
            if (name == "martingale") {
                cfg.martingale = true;
            } else if (name == "ks") {
                cfg.ks = true;
            } else if (name == "self-financing") {
                cfg.self_financing = true;
            } else {
                fail(ErrorCode::SchemaViolation, "simulation.checks: unknown check '" + name + "'");
            }
        }
    }

    std::optional<HarmonicFunction> h;
    PolicyMode pmode = PolicyMode::Fixed;
    switch (p.mode) {
        case Mode::Terminal:
            h = solve_fixed_horizon(p.dist, p.curves, p.target, p.x0, spec).h;
            break;
        case Mode::Intermediate:
            h = solve_intermediate(p.dist, p.curves, p.target, p.x0, spec).h;
            break;
        case Mode::Forward: {
            ForwardOptions opts;
            opts.quadrature = spec;
            h = solve_forward(p.dist, p.curves, p.target, p.x0, opts).h;
            pmode = PolicyMode::Forward;
            break;
        }
    }
    const PathBundle bundle = wealthdist::simulate(*h, pmode, p.curves, p.x0, cfg);
    json checks = json::object();
    if (cfg.martingale) checks["martingale"] = wire::to_json(martingale_check(bundle, p.x0));
    if (cfg.ks) checks["ks"] = wire::to_json(ks_check(bundle, p.dist, p.target));
    if (cfg.self_financing) checks["self_financing"] = wire::to_json(self_financing_check(bundle));
    if (bundle_out != nullptr) *bundle_out = bundle;
    return {{"mode", mode_name(p.mode)},
            {"policy_clock", to_string(pmode)},
            {"path_count", bundle.path_count},
            {"seed", bundle.seed},
            {"dt", bundle.dt},
            {"horizon", bundle.horizon},
            {"target_time", bundle.target_time},
            {"quantiles", wire::to_json(quantile_fan(bundle))},
            {"checks", checks}};
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SchemaViolation:
        case ErrorCode::InvalidParameter:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::TimeOutOfRange:
        case ErrorCode::OutOfRange:
        case ErrorCode::TimeMismatch:
            return 400;
        case ErrorCode::IllegalTransition:
        case ErrorCode::NotSubmitted:
            return 409;
        case ErrorCode::UnknownSession:
            return 404;
        default:
            return is_refusal(code) ? 422 : 500;
    }
}

SessionStore::SessionStore(std::chrono::seconds ttl, std::uint64_t id_seed, Clock clock)
    : ttl_(ttl), id_seed_(id_seed), clock_(std::move(clock)) {}

std::string SessionStore::create(BuilderSession session) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string id;
    do {
        id = hex_id(id_seed_, counter_++);
    } while (sessions_.count(id) != 0);
    auto entry = std::make_shared<Entry>(std::move(session));
    entry->touched = clock_();
    sessions_.emplace(id, std::move(entry));
    return id;
}

json SessionStore::with(const std::string& id, const std::function<json(BuilderSession&)>& fn) {
    std::shared_ptr<Entry> entry;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end() || clock_() - it->second->touched > ttl_) {
            fail(ErrorCode::UnknownSession, "no session '" + id + "'");
        }
        entry = it->second;
        entry->touched = clock_();
    }
    std::lock_guard<std::mutex> lock(entry->lock);
    return fn(entry->session);
}

std::size_t SessionStore::purge() {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto now = clock_();
    std::size_t removed = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (now - it->second->touched > ttl_) {
            it = sessions_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

std::size_t SessionStore::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return sessions_.size();
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), sessions_(config_.session_ttl, config_.id_seed) {
    config_.quadrature.validate();
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) {
    try {
        sessions_.purge();
        return route(method, path, body);
    } catch (const Error& e) {
        return {http_status(e.code()), wire::error_body(e.code(), e.what())};
    } catch (const std::exception&) {
        return {500, wire::error_body("Internal", "internal error")};
    }
}

Response Service::route(std::string_view method, std::string_view path, std::string_view body) {
    const auto parts = split_path(path);
    auto doc = [&] { return body.empty() ? json::object() : wire::parse(body); };
    auto wrong_method = [&] {
        return Response{405, wire::error_body("MethodNotAllowed", std::string(method) + " " + std::string(path))};
    };
    if (parts.size() < 2 || parts[0] != "v1") {
        return {404, wire::error_body("UnknownRoute", std::string(path))};
    }
    const auto& q = config_.quadrature;
    if (parts.size() == 2 && parts[1] != "builder") {
        if (method != "POST") return wrong_method();
        if (parts[1] == "feasibility") return {200, feasibility(doc(), q)};
        if (parts[1] == "preferences") return {200, preferences(doc(), q)};
        if (parts[1] == "simulate") return {200, simulate(doc(), q)};
        return {404, wire::error_body("UnknownRoute", std::string(path))};
    }
    if (parts[1] != "builder") return {404, wire::error_body("UnknownRoute", std::string(path))};

    if (parts.size() == 2) {
        if (method != "POST") return wrong_method();
        const json req = doc();
        const double n = wire::number(req, "N", "builder");
        if (n != std::floor(n)) fail(ErrorCode::SchemaViolation, "builder.N: expected an integer");
        auto market = make_single_period_market(static_cast<int>(n), wire::number(req, "mu", "builder"),
                                                wire::number(req, "sigma", "builder"),
                                                wire::number(req, "r", "builder"));
        const std::string id = sessions_.create(BuilderSession(std::move(market), wire::number(req, "budget", "builder")));
        return {201, sessions_.with(id, [&](BuilderSession& s) { return wire::to_json(s, id); })};
    }
    const std::string id(parts[2]);
    if (parts.size() == 3) {
        if (method != "GET") return wrong_method();
        return {200, sessions_.with(id, [&](BuilderSession& s) { return wire::to_json(s, id); })};
    }
    if (parts.size() != 4) return {404, wire::error_body("UnknownRoute", std::string(path))};
    const std::string_view action = parts[3];
    if (action == "markers") {
        if (method != "PUT") return wrong_method();
        const auto levels = wire::numbers(doc(), "markers", "builder");
        return {200, sessions_.with(id, [&](BuilderSession& s) {
                    s.place_markers(levels);
                    return wire::to_json(s, id);
                })};
    }
    if (action == "submit") {
        if (method != "POST") return wrong_method();
        return {200, sessions_.with(id, [&](BuilderSession& s) {
                    const auto inference = s.submit();
                    return json{{"session", wire::to_json(s, id)}, {"inference", wire::to_json(inference)}};
                })};
    }
    if (action == "realize") {
        if (method != "POST") return wrong_method();
        const std::uint64_t seed = integer_or(doc(), "seed", 0, "realize");
        return {200, sessions_.with(id, [&](BuilderSession& s) {
                    const auto r = s.realize(seed);
                    return json{{"session", wire::to_json(s, id)}, {"state", r.state}, {"wealth", r.wealth}};
                })};
    }
    return {404, wire::error_body("UnknownRoute", std::string(path))};
}

}  // namespace wealthdist::api
