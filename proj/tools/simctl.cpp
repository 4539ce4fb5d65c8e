// simctl: schedulability checks, trace-driven simulation, hulls, feasible
// permutohedron vertices, and tandem composition for slot-timed worst-case
// service systems. Exit codes: 0 success, 1 negative verdict (unschedulable
// system / infeasible request), 2 usage or input errors.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "wcs/oracle.hpp"
#include "wcs/simulate.hpp"

using namespace wcs;

namespace {

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw domain_error("cannot open " + path + " for writing");
    out << text;
}

std::vector<std::uint32_t> parse_partition(const System& sys, const std::string& spec) {
    // "0,1|2" groups flows by position
    std::vector<std::uint32_t> classes;
    std::stringstream ss(spec);
    std::string group;
    while (std::getline(ss, group, '|')) {
        std::uint32_t mask = 0;
        std::stringstream gs(group);
        std::string tok;
        while (std::getline(gs, tok, ',')) {
            const std::size_t w = std::stoul(tok);
            if (w >= sys.n()) throw domain_error("partition refers to unknown flow index");
            mask |= (std::uint32_t(1) << w);
        }
        classes.push_back(mask);
    }
    return classes;
}

Policy parse_policy(const std::string& spec) {
    Policy p;
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::vector<std::uint64_t> args;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(std::stoull(tok));
    }
    if (name == "max_slack") p.kind = Policy::Kind::MaxSlack;
    else if (name == "edf") p.kind = Policy::Kind::Edf;
    else if (name == "fair") p.kind = Policy::Kind::Fair;
    else if (name == "vertex") {
        p.kind = Policy::Kind::Vertex;
        for (std::uint64_t v : args) p.perm.push_back(std::uint32_t(v));
    } else if (name == "gps") {
        p.kind = Policy::Kind::Gps;
        p.weights = args;
    } else if (name == "unwieldy_first") p.kind = Policy::Kind::UnwieldyFirst;
    else throw domain_error("unknown policy: " + name);
    return p;
}

int cmd_check(const std::string& path, const std::string& partition, bool as_json) {
    const System sys = load_system(read_json(path));
    const SchedVerdict v = schedulability(sys);
    const std::uint32_t full = (std::uint32_t(1) << sys.n()) - 1;

    Json report;
    report["schedulable"] = v.schedulable;
    if (!v.schedulable && v.witness) {
        report["witness"] = Json{{"i", v.witness->first.is_inf() ? Json("inf")
                                                                 : Json(v.witness->first.get())},
                                 {"j", v.witness->second}};
    }
    Json rho_j = Json::object();
    bool finite = true;
    for (std::size_t w = 0; w < sys.n(); ++w) {
        const ExtRat r = rho(sys, std::uint32_t(1) << w);
        finite = finite && !r.inf;
        rho_j[sys.flows[w].id] = to_string(r);
    }
    const ExtRat shared = rho(sys, full);
    finite = finite && !shared.inf;
    report["rho"] = rho_j;
    report["rho_total"] = to_string(shared);
    if (finite) report["eta"] = to_string(eta(sys));
    if (!partition.empty() && finite)
        report["eta_partition"] = to_string(eta_partition(sys, parse_partition(sys, partition)));

    if (as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << (v.schedulable ? "schedulable" : "UNSCHEDULABLE") << "\n";
        if (!v.schedulable && v.witness) {
            std::cout << "  violating window: i="
                      << (v.witness->first.is_inf() ? std::string("inf")
                                                    : std::to_string(v.witness->first.get()))
                      << " j=" << v.witness->second << "\n";
        }
        for (std::size_t w = 0; w < sys.n(); ++w)
            std::cout << "  rho(" << sys.flows[w].id
                      << ") = " << report["rho"][sys.flows[w].id].get<std::string>() << "\n";
        std::cout << "  rho(all) = " << report["rho_total"].get<std::string>() << "\n";
        if (report.contains("eta"))
            std::cout << "  eta = " << report["eta"].get<std::string>() << "\n";
        if (report.contains("eta_partition"))
            std::cout << "  eta_partition = " << report["eta_partition"].get<std::string>() << "\n";
    }
    return v.schedulable ? 0 : 1;
}

int cmd_simulate(const std::string& path, std::string trace_path, std::string metrics_path,
                 std::optional<std::uint64_t> slots, std::optional<std::uint64_t> seed,
                 const std::string& policy) {
    ScenarioConfig cfg = load_scenario(read_json(path));
    if (slots) cfg.slots = *slots;
    if (seed) cfg.seed = *seed;
    if (!policy.empty()) cfg.policy = parse_policy(policy);
    if (trace_path.empty()) trace_path = cfg.trace_path.empty() ? "trace.csv" : cfg.trace_path;
    if (metrics_path.empty())
        metrics_path = cfg.metrics_path.empty() ? "metrics.json" : cfg.metrics_path;

    const RunResult r = run(cfg);
    write_text(trace_path, r.trace_csv);
    write_text(metrics_path, r.metrics.dump(2) + "\n");
    std::cout << "simulated " << cfg.slots << " slots; trace -> " << trace_path
              << ", metrics -> " << metrics_path << "\n";
    return 0;
}

int cmd_hull(const std::string& path, bool dual_curve, std::size_t g, const std::string& out) {
    const System sys = load_system(read_json(path));
    std::vector<ServiceState> svcs;
    for (const SystemFlow& f : sys.flows) svcs.push_back(f.service);
    const std::vector<SpectralMatrix> hull = spectral_hull(svcs, g);

    System upgraded = sys;
    for (std::size_t w = 0; w < sys.n(); ++w) {
        if (dual_curve) {
            upgraded.flows[w].service = make_dual_curve(hull_from_spectral(hull[w]), hull[w].b);
        } else {
            upgraded.flows[w].service = make_min_plus(hull[w]);
        }
    }
    const std::string text = save(upgraded).dump(2) + "\n";
    if (out.empty()) std::cout << text;
    else write_text(out, text);
    return 0;
}

int cmd_vertices(const std::string& path, std::uint64_t mu, const std::string& arrivals_spec) {
    const System sys = load_system(read_json(path));
    if (sys.n() > 8) throw resource_error("vertices: n > 8");
    std::vector<std::uint64_t> arrivals(sys.n(), 0);
    if (!arrivals_spec.empty()) {
        std::stringstream ss(arrivals_spec);
        std::string tok;
        std::size_t w = 0;
        while (std::getline(ss, tok, ',') && w < sys.n()) arrivals[w++] = std::stoull(tok);
    }
    const Baseline b = baseline(sys, arrivals);
    SetFn bm = b.to_setfn();
    try {
        bm = baseline_mu(b, mu);
    } catch (const range_error& e) {
        std::cout << "infeasible mu: valid interval [" << e.lo << ", " << e.hi << "]\n";
        return 1;
    }
    std::set<std::vector<std::uint64_t>> seen;
    for (const Perm& pi : all_perms(sys.n())) seen.insert(vertex(bm, pi));
    Json out_j = Json::array();
    for (const auto& v : seen) out_j.push_back(v);
    std::cout << out_j.dump() << "\n";
    std::cout << seen.size() << " distinct vertices\n";
    return 0;
}

int cmd_compose(const std::string& first, const std::string& second, std::size_t g,
                const std::string& out) {
    // first = upstream (server I), second = downstream (server II)
    const ServiceState si = load_service(read_json(first));
    const ServiceState sii = load_service(read_json(second));
    ServiceState composed;
    const std::uint64_t b = si.b + sii.b;
    if (si.is<DualCurve>() && sii.is<DualCurve>()) {
        composed = make_dual_curve(dc_compose(si.as<DualCurve>(), sii.as<DualCurve>(), sii.b), b);
    } else {
        auto as_matrix = [&](const ServiceState& s) -> CumulativeMatrix {
            if (s.is<CumulativeMatrix>()) return s.as<CumulativeMatrix>();
            if (s.is<DualCurve>()) return dc_to_matrix(s.as<DualCurve>(), g);
            throw domain_error(
                "compose: only min_plus and dual_curve services compose in closed form");
        };
        composed = make_min_plus(mp_compose(as_matrix(si), as_matrix(sii), sii.b), b);
    }
    const std::string text = save(composed).dump(2) + "\n";
    if (out.empty()) std::cout << text;
    else write_text(out, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"state-based scheduling toolkit"};
    app.require_subcommand(1);

    std::string path, partition, trace_path, metrics_path, policy, arrivals, out, second;
    bool as_json = false, dual_curve = false;
    std::size_t g = 16;
    std::uint64_t mu = 0;
    std::optional<std::uint64_t> slots, seed;

    auto* check = app.add_subcommand("check", "schedulability and multiplexing-gain report");
    check->add_option("system", path, "system JSON file")->required();
    check->add_option("--partition", partition, "flow classes, e.g. \"0,1|2\"");
    check->add_flag("--json", as_json, "emit a JSON report");

    auto* sim = app.add_subcommand("simulate", "trace-driven run of a scenario");
    sim->add_option("scenario", path, "scenario JSON file")->required();
    sim->add_option("--trace", trace_path, "trace CSV output path");
    sim->add_option("--metrics", metrics_path, "metrics JSON output path");
    sim->add_option("--horizon", slots, "number of slots to simulate");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--policy", policy, "max_slack | edf | fair | vertex:<perm> | gps[:<weights>]");

    auto* hull = app.add_subcommand("hull", "spectral (or dual-curve) hull of a system");
    hull->add_option("system", path, "system JSON file")->required();
    hull->add_flag("--dual-curve", dual_curve, "emit dual-curve hulls");
    hull->add_option("--g", g, "hull horizon");
    hull->add_option("--out", out, "output path (stdout if omitted)");

    auto* verts = app.add_subcommand("vertices", "vertices of the feasible permutohedron");
    verts->add_option("system", path, "system JSON file")->required();
    verts->add_option("--mu", mu, "total service")->required();
    verts->add_option("--arrivals", arrivals, "per-flow arrivals this slot, e.g. \"1,0,2\"");

    auto* comp = app.add_subcommand("compose", "tandem composition of two services");
    comp->add_option("first", path, "upstream service JSON file")->required();
    comp->add_option("second", second, "downstream service JSON file")->required();
    comp->add_option("--g", g, "matrix horizon for expansions");
    comp->add_option("--out", out, "output path (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(path, partition, as_json);
        if (sim->parsed()) return cmd_simulate(path, trace_path, metrics_path, slots, seed, policy);
        if (hull->parsed()) return cmd_hull(path, dual_curve, g, out);
        if (verts->parsed()) return cmd_vertices(path, mu, arrivals);
        if (comp->parsed()) return cmd_compose(path, second, g, out);
    } catch (const range_error& e) {
        std::cerr << "error: " << e.what() << " [" << e.lo << ", " << e.hi << "]\n";
        return 1;
    } catch (const inconsistent_state_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
