#include "wealthdist/error.hpp"
#include "wealthdist/serialization.hpp"
#include "wealthdist/service.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

using namespace wealthdist;
using api::json;

namespace {

const json kMarket = {{"horizon", 1.0}, {"lambda", 0.2}};

json problem(const std::string& mode, json dist, double x0) {
    return {{"market", kMarket}, {"distribution", std::move(dist)}, {"x0", x0}, {"mode", mode}};
}

api::Response call(api::Service& svc, std::string_view method, std::string_view path, const json& body = nullptr) {
    return svc.handle(method, path, body.is_null() ? "" : body.dump());
}

std::string error_code(const api::Response& r) { return r.body.at("error").at("code").get<std::string>(); }

}  // namespace

TEST_CASE("feasibility solves the lognormal parameter") {
    api::Service svc;
    const auto r = call(svc, "POST", "/v1/feasibility", problem("terminal", "lognormal", 1.0));
    REQUIRE(r.status == 200);
    CHECK(r.body.at("solved_parameter").get<double>() == doctest::Approx(0.16).epsilon(1e-10));
    CHECK(r.body.at("A_target").get<double>() == doctest::Approx(0.04));
    CHECK(r.body.at("feasible").get<bool>());
}

TEST_CASE("market documents in all three shapes describe the same market") {
    const json pieces = {{"horizon", 1.0},
                         {"pieces", {{{"t_start", 0.0}, {"t_end", 1.0}, {"rate", 0.01}, {"drift", {0.21}}, {"vol", {{1.0}}}}}}};
    const json flat = {{"horizon", 1.0}, {"rate", 0.01}, {"drift", {0.21}}, {"vol", {{1.0}}}};
    for (const auto& doc : {pieces, flat, kMarket}) {
        const MarketCurves c(wire::market_from_json(doc));
        CHECK(c.A_T() == doctest::Approx(0.04).epsilon(1e-14));
    }
    const auto back = wire::to_json(wire::market_from_json(flat));
    CHECK(MarketCurves(wire::market_from_json(back)).A_T() == doctest::Approx(0.04).epsilon(1e-14));
}

TEST_CASE("preferences for each engine") {
    api::Service svc;
    const auto term = call(svc, "POST", "/v1/preferences", problem("terminal", "lognormal", 1.0));
    REQUIRE(term.status == 200);
    for (const auto& s : term.body.at("samples")) {
        const double x = s.at("x").get<double>();
        CHECK(s.at("value").get<double>() == doctest::Approx(1.0 / std::sqrt(x)).epsilon(1e-9));
    }

    json inter = problem("intermediate", "lognormal", 1.0);
    inter["target_time"] = 0.5;
    const auto ir = call(svc, "POST", "/v1/preferences", inter);
    REQUIRE(ir.status == 200);
    CHECK(ir.body.at("c").get<double>() == doctest::Approx(0.1));

    const auto fw = call(svc, "POST", "/v1/preferences", problem("forward", "lognormal", 1.0));
    REQUIRE(fw.status == 200);
    const auto& atoms = fw.body.at("measure").at("atoms");
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].at("y").get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(atoms[0].at("m").get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fw.body.at("measure").at("form") == "atomic");
}

TEST_CASE("error mapping to status codes") {
    api::Service svc;
    CHECK(svc.handle("POST", "/v1/feasibility", "{not json").status == 400);
    auto missing = problem("terminal", "lognormal", 1.0);
    missing.erase("x0");
    const auto r400 = call(svc, "POST", "/v1/feasibility", missing);
    CHECK(r400.status == 400);
    CHECK(error_code(r400) == "SchemaViolation");
    CHECK_FALSE(r400.body.at("error").at("refusal").get<bool>());

    const auto r422 = call(svc, "POST", "/v1/feasibility", problem("terminal", "lognormal", 0.9));
    CHECK(r422.status == 422);
    CHECK(error_code(r422) == "InfeasibleWealth");
    CHECK(r422.body.at("error").at("refusal").get<bool>());

    const auto inad = call(svc, "POST", "/v1/preferences", problem("forward", "whole-line-example", 1.0));
    CHECK(inad.status == 422);
    CHECK(error_code(inad) == "Inadmissible");

    CHECK(call(svc, "GET", "/v1/builder/nope").status == 404);
    CHECK(call(svc, "POST", "/v1/nothing", json::object()).status == 404);
    CHECK(call(svc, "GET", "/v1/feasibility").status == 405);

    CHECK(api::http_status(ErrorCode::DimensionMismatch) == 400);
    CHECK(api::http_status(ErrorCode::IllegalTransition) == 409);
    CHECK(api::http_status(ErrorCode::NotSubmitted) == 409);
    CHECK(api::http_status(ErrorCode::UnknownSession) == 404);
    CHECK(api::http_status(ErrorCode::MaxIterations) == 500);
}

TEST_CASE("builder session over the wire") {
    api::Service svc;
    const auto created = call(svc, "POST", "/v1/builder", {{"N", 100}, {"mu", 0.08}, {"sigma", 0.2}, {"r", 0.02}, {"budget", 1.0}});
    REQUIRE(created.status == 201);
    const std::string id = created.body.at("id");
    const auto& xi = created.body.at("state_prices");
    REQUIRE(xi.size() == 100);
    double sum = 0.0;
    for (const auto& v : xi) sum += v.get<double>();
    CHECK(sum / 100.0 == doctest::Approx(1.0 / 1.02).epsilon(1e-10));

    const std::string base = "/v1/builder/" + id;
    CHECK(call(svc, "POST", base + "/realize", {{"seed", 1}}).status == 409);

    const auto low = call(svc, "PUT", base + "/markers", {{"markers", std::vector<double>(100, 0.95 * 1.02)}});
    REQUIRE(low.status == 200);
    CHECK(low.body.at("cost_fraction").get<double>() == doctest::Approx(0.95));
    CHECK(low.body.at("status") == "editing");
    CHECK(call(svc, "POST", base + "/submit").status == 409);

    const auto ok = call(svc, "PUT", base + "/markers", {{"markers", std::vector<double>(100, 1.02)}});
    CHECK(ok.body.at("status") == "submittable");
    CHECK(call(svc, "PUT", base + "/markers", {{"markers", {1.0, 2.0}}}).status == 400);

    const auto sub = call(svc, "POST", base + "/submit");
    REQUIRE(sub.status == 200);
    CHECK(sub.body.at("inference").at("points").size() == 100);
    const auto real = call(svc, "POST", base + "/realize", {{"seed", 5}});
    REQUIRE(real.status == 200);
    CHECK(real.body.at("wealth").get<double>() == 1.02);
    CHECK(call(svc, "POST", base + "/realize", {{"seed", 5}}).status == 409);
    CHECK(call(svc, "GET", base).body.at("status") == "realized");
}

TEST_CASE("session ids are unique and idle sessions expire") {
    auto now = std::chrono::steady_clock::time_point{};
    api::SessionStore store(std::chrono::seconds(60), 1, [&] { return now; });
    auto market = make_single_period_market(20, 0.08, 0.2, 0.02);
    std::set<std::string> ids;
    for (int i = 0; i < 50; ++i) ids.insert(store.create(BuilderSession(market, 1.0)));
    CHECK(ids.size() == 50);
    const std::string first = *ids.begin();
    now += std::chrono::seconds(30);
    CHECK_NOTHROW(store.with(first, [](BuilderSession&) { return json{}; }));
    now += std::chrono::seconds(45);
    CHECK(store.purge() == 49);
    CHECK(store.size() == 1);
    now += std::chrono::seconds(61);
    try {
        store.with(first, [](BuilderSession&) { return json{}; });
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownSession);
    }
    api::SessionStore again(std::chrono::seconds(60), 1);
    CHECK(again.create(BuilderSession(market, 1.0)) == api::SessionStore(std::chrono::seconds(60), 1).create(BuilderSession(market, 1.0)));
}

TEST_CASE("compute endpoints are deterministic") {
    json req = problem("terminal", "transformed-normal", 5.0);
    req["simulation"] = {{"paths", 2000}, {"dt", 0.005}, {"seed", 3}, {"checks", {"martingale", "ks"}}};
    api::Service a;
    api::Service b;
    const auto ra = call(a, "POST", "/v1/simulate", req);
    const auto rb = call(b, "POST", "/v1/simulate", req);
    REQUIRE(ra.status == 200);
    CHECK(ra.body.dump() == rb.body.dump());
    CHECK(ra.body.at("checks").contains("martingale"));
    CHECK_FALSE(ra.body.at("checks").contains("self_financing"));
}

TEST_CASE("numbers survive a text round trip") {
    const double values[] = {0.1, 1.0 / 3.0, 2.0 / 3.0 * 1e-300, 123456789.123456789, std::exp(1.0)};
    for (double v : values) {
        const json doc = wire::parse(wire::dump(json{{"v", v}}));
        CHECK(doc.at("v").get<double>() == v);
    }
}

TEST_CASE("environment configuration") {
    setenv("WEALTHDIST_BIND", "0.0.0.0:9001", 1);
    setenv("WEALTHDIST_SESSION_TTL", "120", 1);
    setenv("WEALTHDIST_QUADRATURE_SCHEME", "adaptive-trapezoid", 1);
    const auto cfg = api::ServiceConfig::from_env();
    CHECK(cfg.host == "0.0.0.0");
    CHECK(cfg.port == 9001);
    CHECK(cfg.session_ttl.count() == 120);
    CHECK(cfg.quadrature.scheme == numerics::Scheme::AdaptiveTrapezoid);
    setenv("WEALTHDIST_QUADRATURE_NODES", "4", 1);
    CHECK_THROWS_AS((void)api::ServiceConfig::from_env(), Error);
    unsetenv("WEALTHDIST_BIND");
    unsetenv("WEALTHDIST_SESSION_TTL");
    unsetenv("WEALTHDIST_QUADRATURE_SCHEME");
    unsetenv("WEALTHDIST_QUADRATURE_NODES");
    CHECK_THROWS_AS((void)api::parse_bind("localhost"), Error);
}
