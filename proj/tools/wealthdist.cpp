// Command-line front end: batch feasibility, preference inference, simulation,
// a scripted builder session, and the HTTP service.

#include "wealthdist/error.hpp"
#include "wealthdist/service.hpp"
#include "wealthdist/simulator.hpp"
#include "wealthdist/single_period.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using wealthdist::wire::json;

struct Inputs {
    std::string market;
    std::string dist = "lognormal";
    double x0 = 1.0;
    std::string mode = "terminal";
    double target_time = 0.0;
    std::string out;
    std::string format = "table";
};

json read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return wealthdist::wire::parse(buf.str());
}

json request_from(const Inputs& in) {
    json req;
    req["market"] = read_document(in.market);
    if (std::filesystem::exists(in.dist)) {
        req["distribution"] = read_document(in.dist);
    } else {
        req["distribution"] = in.dist;
    }
    req["x0"] = in.x0;
    req["mode"] = in.mode;
    if (in.target_time > 0.0) req["target_time"] = in.target_time;
    return req;
}

std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : wealthdist::wire::dump(v); }

bool is_record_array(const json& v) { return v.is_array() && !v.empty() && v.front().is_object(); }

void flatten(const json& doc, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& scalars,
             std::vector<std::pair<std::string, json>>& tables) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            flatten(*it, key, scalars, tables);
        } else if (is_record_array(*it)) {
            tables.emplace_back(key, *it);
        } else {
            scalars.emplace_back(key, scalar(*it));
        }
    }
}

void render(const json& doc, const std::string& format, std::ostream& os) {
    if (format == "structured") {
        os << wealthdist::wire::dump(doc, 2) << '\n';
        return;
    }
    std::vector<std::pair<std::string, std::string>> scalars;
    std::vector<std::pair<std::string, json>> tables;
    flatten(doc, "", scalars, tables);
    const bool csv = format == "csv";
    std::size_t width = 0;
    for (const auto& [k, v] : scalars) width = std::max(width, k.size());
    for (const auto& [k, v] : scalars) {
        if (csv) {
            os << k << ',' << v << '\n';
        } else {
            os << k << std::string(width + 2 - k.size(), ' ') << v << '\n';
        }
    }
    for (const auto& [name, rows] : tables) {
        os << '\n' << (csv ? "# " : "[") << name << (csv ? "" : "]") << '\n';
        std::vector<std::string> cols;
        for (auto it = rows.front().begin(); it != rows.front().end(); ++it) cols.push_back(it.key());
        for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? (csv ? "," : "  ") : "") << cols[c];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                os << (c ? (csv ? "," : "  ") : "") << (row.contains(cols[c]) ? scalar(row.at(cols[c])) : "");
            }
            os << '\n';
        }
    }
}

void emit(const json& doc, const Inputs& in) {
    if (in.out.empty()) {
        render(doc, in.format, std::cout);
        return;
    }
    std::ofstream f(in.out);
    if (!f) throw std::runtime_error("cannot write '" + in.out + "'");
    render(doc, in.format, f);
}

void add_problem_options(CLI::App* cmd, Inputs& in) {
    cmd->add_option("--market", in.market, "Market document")->required();
    cmd->add_option("--dist", in.dist, "Family name or distribution document");
    cmd->add_option("--x0", in.x0, "Initial wealth");
    cmd->add_option("--mode", in.mode, "terminal | intermediate | forward")
        ->check(CLI::IsMember({"terminal", "intermediate", "forward"}));
    cmd->add_option("--target-time", in.target_time, "Target date (default: market horizon)");
    cmd->add_option("--out", in.out, "Output file (default: stdout)");
    cmd->add_option("--format", in.format, "table | csv | structured")
        ->check(CLI::IsMember({"table", "csv", "structured"}));
}

json builder_demo(int N, double budget, std::uint64_t seed) {
    using namespace wealthdist;
    constexpr double mu = 0.08, sigma = 0.2, r = 0.02;
    BuilderSession session(make_single_period_market(N, mu, sigma, r), budget);
    // Lognormal-shaped placement scaled onto 99.5% of the budget; cost is linear in levels.
    std::vector<double> levels = discretize_lognormal(0.0, 0.4, N);
    const double unit = distributional_price(levels, session.market().state_prices);
    for (double& v : levels) v *= 0.995 * budget / unit;
    session.place_markers(levels);
    const auto inference = session.submit();
    const auto outcome = session.realize(seed);
    return {{"session", wire::to_json(session, "demo")},
            {"inference", wire::to_json(inference)},
            {"realized", {{"state", outcome.state}, {"wealth", outcome.wealth}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Target wealth distributions to preferences and optimal policies"};
    app.require_subcommand(1);
    Inputs in;
    std::size_t paths = 100000;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string csv_paths;
    int demo_n = 100;
    std::string serve_addr;

    auto* feas = app.add_subcommand("feasibility", "Budget check and solved family parameter");
    add_problem_options(feas, in);
    auto* infer = app.add_subcommand("infer", "Preferences implied by the target");
    add_problem_options(infer, in);
    auto* sim = app.add_subcommand("simulate", "Monte Carlo of optimal wealth with checks");
    add_problem_options(sim, in);
    sim->add_option("--paths", paths, "Path count");
    sim->add_option("--dt", dt, "Time step (default: horizon/1000)");
    sim->add_option("--seed", seed, "Random seed");
    sim->add_option("--paths-csv", csv_paths, "Also write per-path snapshots of the first 100 paths");
    auto* demo = app.add_subcommand("builder-demo", "Scripted single-period builder session");
    demo->add_option("--n", demo_n, "Number of states");
    demo->add_option("--x0", in.x0, "Budget");
    demo->add_option("--seed", seed, "Seed for the realized outcome");
    demo->add_option("--out", in.out, "Output file (default: stdout)");
    demo->add_option("--format", in.format, "table | csv | structured")
        ->check(CLI::IsMember({"table", "csv", "structured"}));
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--serve-addr", serve_addr, "host:port (default: WEALTHDIST_BIND or 127.0.0.1:8080)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*feas) {
            emit(wealthdist::api::feasibility(request_from(in)), in);
        } else if (*infer) {
            emit(wealthdist::api::preferences(request_from(in)), in);
        } else if (*sim) {
            json req = request_from(in);
            req["simulation"] = {{"paths", paths}, {"seed", seed}};
            if (dt > 0.0) req["simulation"]["dt"] = dt;
            wealthdist::PathBundle bundle;
            emit(wealthdist::api::simulate(req, {}, csv_paths.empty() ? nullptr : &bundle), in);
            if (!csv_paths.empty()) {
                std::ofstream f(csv_paths);
                if (!f) throw std::runtime_error("cannot write '" + csv_paths + "'");
                wealthdist::write_csv(bundle, f, 100);
            }
        } else if (*demo) {
            emit(builder_demo(demo_n, in.x0, seed), in);
        } else if (*serve) {
            auto cfg = wealthdist::api::ServiceConfig::from_env();
            if (!serve_addr.empty()) std::tie(cfg.host, cfg.port) = wealthdist::api::parse_bind(serve_addr);
            wealthdist::api::Service service(cfg);
            std::cerr << "listening on " << cfg.host << ':' << cfg.port << '\n';
            wealthdist::api::serve(service, cfg.host, cfg.port);
        }
    } catch (const wealthdist::Error& e) {
        std::cerr << "error [" << wealthdist::to_string(e.code()) << "]: " << e.what() << '\n';
        return wealthdist::is_refusal(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
