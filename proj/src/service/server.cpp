#include "wealthdist/error.hpp"
#include "wealthdist/service.hpp"

#include <httplib.h>

namespace wealthdist::api {

void serve(Service& service, const std::string& host, int port) {
    httplib::Server server;
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        const Response r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(wire::dump(r.body), "application/json");
    };
    server.Get(R"(/.*)", handler);
    server.Post(R"(/.*)", handler);
    server.Put(R"(/.*)", handler);
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    if (!server.listen(host, port)) {
        fail(ErrorCode::InvalidParameter, "could not bind " + host + ":" + std::to_string(port));
    }
}

}  // namespace wealthdist::api
