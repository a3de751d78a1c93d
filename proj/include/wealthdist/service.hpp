#pragma once

#include "wealthdist/numerics/quadrature.hpp"
#include "wealthdist/serialization.hpp"
#include "wealthdist/simulator.hpp"
#include "wealthdist/single_period.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace wealthdist::api {

using wire::json;

/// Environment: WEALTHDIST_BIND (host:port), WEALTHDIST_SESSION_TTL (seconds),
/// WEALTHDIST_QUADRATURE_NODES, WEALTHDIST_QUADRATURE_SCHEME (gauss-hermite|adaptive-trapezoid).
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::chrono::seconds session_ttl{3600};
    numerics::QuadratureSpec quadrature;
    std::uint64_t id_seed = 0x5eed;

    static ServiceConfig from_env();
};

/// "host:port" into its parts. Throws InvalidParameter.
std::pair<std::string, int> parse_bind(const std::string& addr);

// Stateless compute endpoints; pure functions of the request document.
json feasibility(const json& request, const numerics::QuadratureSpec& spec = {});
json preferences(const json& request, const numerics::QuadratureSpec& spec = {});
/// Optionally hands back the simulated bundle for per-path export.
json simulate(const json& request, const numerics::QuadratureSpec& spec = {},
              PathBundle* bundle_out = nullptr);

/// HTTP status for an error code: 400 malformed, 422 refusal, 409 state, 404 session, 500 fault.
int http_status(ErrorCode code) noexcept;

/// Builder sessions with idle expiry. Ids are opaque, unique and reproducible
/// for a given seed and creation order.
class SessionStore {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    explicit SessionStore(std::chrono::seconds ttl, std::uint64_t id_seed = 0x5eed,
                          Clock clock = &std::chrono::steady_clock::now);

    std::string create(BuilderSession session);
    /// Runs fn under the session's lock. Throws UnknownSession.
    json with(const std::string& id, const std::function<json(BuilderSession&)>& fn);
    /// Drops idle sessions; returns how many were removed.
    std::size_t purge();
    [[nodiscard]] std::size_t size() const;

private:
    struct Entry {
        std::mutex lock;
        BuilderSession session;
        std::chrono::steady_clock::time_point touched;
        explicit Entry(BuilderSession s) : session(std::move(s)) {}
    };

    std::chrono::seconds ttl_;
    std::uint64_t id_seed_;
    std::uint64_t counter_ = 0;
    Clock clock_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct Response {
    int status = 200;
    json body;
};

/// Routes /v1 requests. Errors become structured bodies; nothing else escapes.
class Service {
public:
    explicit Service(ServiceConfig config = {});

    Response handle(std::string_view method, std::string_view path, std::string_view body);

    [[nodiscard]] const ServiceConfig& config() const noexcept { return config_; }
    [[nodiscard]] SessionStore& sessions() noexcept { return sessions_; }

private:
    Response route(std::string_view method, std::string_view path, std::string_view body);

    ServiceConfig config_;
    SessionStore sessions_;
};

/// Blocks serving HTTP on host:port until the process is stopped.
void serve(Service& service, const std::string& host, int port);

}  // namespace wealthdist::api
