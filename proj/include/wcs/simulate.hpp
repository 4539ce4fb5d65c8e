#pragma once

#include <cstdint>
#include <deque>
#include <sstream>
#include <string>
#include <vector>

#include "wcs/random.hpp"
#include "wcs/scheduler.hpp"
#include "wcs/serialize.hpp"

namespace wcs {

// --- traffic sources ---------------------------------------------------------

struct TrafficSource {
    enum class Kind { Script, Periodic, Random } kind = Kind::Script;
    std::vector<std::uint64_t> script; // Script: arrivals per slot, 0 afterwards
    std::uint64_t period = 1;          // Periodic: burst every period slots
    std::uint64_t burst = 0;
    std::uint64_t phase = 0;
    std::uint64_t amax = 0; // Random: uniform on [0, amax]

    std::uint64_t draw(std::uint64_t slot, Rng& rng) const {
        switch (kind) {
        case Kind::Script: return slot < script.size() ? script[slot] : 0;
        case Kind::Periodic: return slot % period == phase % period ? burst : 0;
        case Kind::Random: return rng.in(0, amax);
        }
        return 0;
    }
};

inline Json save(const TrafficSource& t) {
    switch (t.kind) {
    case TrafficSource::Kind::Script: return Json{{"kind", "script"}, {"arrivals", t.script}};
    case TrafficSource::Kind::Periodic:
        return Json{{"kind", "periodic"}, {"period", t.period}, {"burst", t.burst}, {"phase", t.phase}};
    case TrafficSource::Kind::Random: return Json{{"kind", "random"}, {"max", t.amax}};
    }
    return {};
}

inline TrafficSource load_traffic(const Json& j) {
    TrafficSource t;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "script") {
        t.kind = TrafficSource::Kind::Script;
        t.script = j.at("arrivals").get<std::vector<std::uint64_t>>();
    } else if (kind == "periodic") {
        t.kind = TrafficSource::Kind::Periodic;
        t.period = j.at("period").get<std::uint64_t>();
        if (t.period == 0) throw domain_error("periodic traffic: period must be >= 1");
        t.burst = j.at("burst").get<std::uint64_t>();
        t.phase = j.value("phase", std::uint64_t(0));
    } else if (kind == "random") {
        t.kind = TrafficSource::Kind::Random;
        t.amax = j.at("max").get<std::uint64_t>();
    } else {
        throw domain_error("unknown traffic kind: " + kind);
    }
    return t;
}

// --- scenario ------------------------------------------------------------------

struct FlowSpec {
    std::string id;
    ServiceState service;
    TrafficSource traffic;
};

struct AdmissionEvent {
    std::uint64_t slot = 0;
    FlowSpec flow;
};

struct ScenarioConfig {
    std::uint64_t capacity = 1;
    std::uint64_t slots = 100;
    std::size_t system_horizon = 64;
    std::uint64_t seed = 0;
    Policy policy;
    std::vector<FlowSpec> flows;
    std::vector<AdmissionEvent> admissions;
    // whenever every buffer empties in an all-dual-curve, non-degenerate
    // system, reset each dynamic curve to its static curve (a service upgrade
    // that keeps schedulability and trims accumulated curve pieces)
    bool upgrade_on_empty = false;
    std::string trace_path; // optional defaults, CLI flags override
    std::string metrics_path;
};

inline Json save(const Policy& p) {
    Json j;
    switch (p.kind) {
    case Policy::Kind::MaxSlack: j["name"] = "max_slack"; break;
    case Policy::Kind::Edf: j["name"] = "edf"; break;
    case Policy::Kind::Vertex: j["name"] = "vertex"; j["perm"] = p.perm; break;
    case Policy::Kind::Fair: j["name"] = "fair"; break;
    case Policy::Kind::Gps: j["name"] = "gps"; j["weights"] = p.weights; break;
    case Policy::Kind::UnwieldyFirst: j["name"] = "unwieldy_first"; break;
    }
    return j;
}

inline Policy load_policy(const Json& j) {
    Policy p;
    const std::string name = j.at("name").get<std::string>();
    if (name == "max_slack") p.kind = Policy::Kind::MaxSlack;
    else if (name == "edf") p.kind = Policy::Kind::Edf;
    else if (name == "vertex") {
        p.kind = Policy::Kind::Vertex;
        p.perm = j.at("perm").get<Perm>();
    } else if (name == "fair") p.kind = Policy::Kind::Fair;
    else if (name == "gps") {
        p.kind = Policy::Kind::Gps;
        p.weights = j.value("weights", std::vector<std::uint64_t>{});
    } else if (name == "unwieldy_first") p.kind = Policy::Kind::UnwieldyFirst;
    else throw domain_error("unknown policy: " + name);
    return p;
}

inline Json save(const ScenarioConfig& c) {
    Json flows = Json::array();
    for (const FlowSpec& f : c.flows)
        flows.push_back(Json{{"id", f.id}, {"service", save(f.service)}, {"traffic", save(f.traffic)}});
    Json adm = Json::array();
    for (const AdmissionEvent& e : c.admissions)
        adm.push_back(Json{{"slot", e.slot},
                           {"id", e.flow.id},
                           {"service", save(e.flow.service)},
                           {"traffic", save(e.flow.traffic)}});
    Json j{{"capacity", c.capacity},    {"slots", c.slots},
           {"system_horizon", c.system_horizon}, {"seed", c.seed},
           {"policy", save(c.policy)},  {"flows", flows},
           {"admissions", adm},         {"upgrade_on_empty", c.upgrade_on_empty}};
    if (!c.trace_path.empty() || !c.metrics_path.empty())
        j["outputs"] = Json{{"trace", c.trace_path}, {"metrics", c.metrics_path}};
    return j;
}

inline ScenarioConfig load_scenario(const Json& j) {
    ScenarioConfig c;
    c.capacity = j.at("capacity").get<std::uint64_t>();
    c.slots = j.value("slots", std::uint64_t(100));
    c.upgrade_on_empty = j.value("upgrade_on_empty", false);
    c.system_horizon = j.value("system_horizon", std::size_t(64));
    c.seed = j.value("seed", std::uint64_t(0));
    if (j.contains("policy")) c.policy = load_policy(j.at("policy"));
    for (const Json& f : j.at("flows"))
        c.flows.push_back({f.at("id").get<std::string>(), load_service(f.at("service")),
                           load_traffic(f.at("traffic"))});
    if (j.contains("admissions"))
        for (const Json& e : j.at("admissions"))
            c.admissions.push_back({e.at("slot").get<std::uint64_t>(),
                                    {e.at("id").get<std::string>(), load_service(e.at("service")),
                                     load_traffic(e.at("traffic"))}});
    if (j.contains("outputs")) {
        c.trace_path = j.at("outputs").value("trace", std::string());
        c.metrics_path = j.at("outputs").value("metrics", std::string());
    }
    return c;
}

// --- admission -------------------------------------------------------------------

struct AdmitResult {
    bool accepted = false;
    std::optional<std::pair<ExtNat, std::uint64_t>> witness;
};

// Accept iff the system including the candidate stays schedulable; the
// system is mutated only on acceptance.
inline AdmitResult admit(System& sys, const std::string& id, const ServiceState& candidate) {
    System trial = sys;
    trial.flows.push_back({id, candidate});
    const SchedVerdict v = schedulability(trial);
    if (!v.schedulable) return {false, v.witness};
    sys = std::move(trial);
    return {true, {}};
}

// --- trace-driven run ----------------------------------------------------------------

struct RunResult {
    std::string trace_csv;
    Json metrics;
};

namespace detail {

// Online auditor state for one flow: the service frozen at admission, the
// realized traffic, and per-task static deadlines when the kind supports them.
struct FlowAudit {
    ServiceState frozen;
    std::vector<std::uint64_t> cum_a{0};
    std::vector<std::uint64_t> cum_d{0};
    std::deque<std::pair<ExtNat, std::uint64_t>> deadlines; // (absolute slot, arrival slot)
    std::uint64_t max_backlog = 0;
    std::uint64_t max_delay = 0;
    std::uint64_t misses = 0;
    bool dominance_checkable = true;
};

inline bool deadline_rigid_kind(const ServiceState& s) {
    return s.is<UniformDelay>() || s.is<CumulativeMatrix>() || s.is<DualCurve>();
}

} // namespace detail

// Runs the operating cycle: admissions, arrivals, baseline, policy schedule,
// feasibility check, state update, audit, trace emission. The auditor
// re-derives every invariant the cycle is supposed to maintain and throws on
// the first violation (which would indicate an implementation bug).
inline RunResult run(const ScenarioConfig& cfg) {
    System sys;
    sys.capacity = cfg.capacity;
    sys.horizon = cfg.system_horizon;

    // the trace layout covers every flow that may ever join
    std::vector<std::string> all_ids;
    for (const FlowSpec& f : cfg.flows) all_ids.push_back(f.id);
    for (const AdmissionEvent& e : cfg.admissions) all_ids.push_back(e.flow.id);

    std::vector<FlowSpec> active;
    std::vector<detail::FlowAudit> audit;
    std::vector<std::pair<std::uint64_t, std::string>> denied;
    auto join = [&](const FlowSpec& f, std::uint64_t slot) -> bool {
        const AdmitResult r = admit(sys, f.id, f.service);
        if (!r.accepted) {
            std::string w = "tail";
            if (r.witness && !r.witness->first.is_inf())
                w = "(" + std::to_string(r.witness->first.get()) + "," +
                    std::to_string(r.witness->second) + ")";
            denied.push_back({slot, f.id + " window " + w});
            return false;
        }
        active.push_back(f);
        detail::FlowAudit a;
        a.frozen = f.service;
        audit.push_back(std::move(a));
        return true;
    };

    for (const FlowSpec& f : cfg.flows)
        if (!join(f, 0)) throw domain_error("initial system unschedulable: flow " + f.id);

    Rng rng(cfg.seed);
    std::ostringstream trace;
    trace << "slot,mu,beta_omega,schedulable,slack";
    for (const std::string& id : all_ids)
        trace << "," << id << ".a," << id << ".d," << id << ".q," << id << ".b," << id << ".p,"
              << id << ".deadline";
    trace << "\n";

    ExtNat slack_min = ExtNat::inf();
    std::uint64_t upgrades = 0;
    bool all_rigid = true;

    for (std::uint64_t t = 0; t < cfg.slots; ++t) {
        // admissions are decided before arrivals land
        for (const AdmissionEvent& e : cfg.admissions)
            if (e.slot == t) join(e.flow, t);

        const std::size_t n = sys.n();
        for (const SystemFlow& f : sys.flows)
            all_rigid = all_rigid && detail::deadline_rigid_kind(f.service);

        // arrivals land, then a feasible schedule is selected
        std::vector<std::uint64_t> a(n);
        for (std::size_t w = 0; w < n; ++w) a[w] = active[w].traffic.draw(t, rng);

        const Baseline base = baseline(sys, a);
        const std::uint64_t mu = work_conserving_mu(sys, a);
        Policy pol = cfg.policy;
        if (pol.kind == Policy::Kind::Vertex && pol.perm.size() != n)
            pol.perm = identity_perm(n); // admissions can change the dimension
        const std::vector<std::uint64_t> d = select_schedule(sys, a, mu, pol);

        // the auditor re-checks everything the cycle promises
        std::vector<std::uint64_t> q_now(n), p_now(n);
        std::uint64_t dsum = 0;
        for (std::size_t w = 0; w < n; ++w) {
            q_now[w] = a[w] + sys.flows[w].service.b;
            p_now[w] = immediate_obligation(sys.flows[w].service, q_now[w]);
            if (d[w] > q_now[w])
                throw inconsistent_state_error("audit: causality violated at slot " +
                                               std::to_string(t));
            if (d[w] < p_now[w])
                throw inconsistent_state_error("audit: immediate obligation missed at slot " +
                                               std::to_string(t));
            dsum += d[w];
        }
        if (dsum > sys.capacity)
            throw inconsistent_state_error("audit: capacity exceeded at slot " + std::to_string(t));
        if (!is_feasible(base, d))
            throw inconsistent_state_error("audit: policy returned an infeasible schedule at slot " +
                                           std::to_string(t));

        // per-task worst-case deadlines (static in deadline-rigid systems)
        std::vector<std::string> deadline_cell(n, "-");
        for (std::size_t w = 0; w < n; ++w) {
            detail::FlowAudit& fa = audit[w];
            const CumVec p = p_vector(sys.flows[w].service, q_now[w]);
            for (std::uint64_t h = fa.deadlines.size() + 1; h <= q_now[w]; ++h) {
                const ExtNat off = tau(p, h);
                fa.deadlines.push_back({off.is_inf() ? off : ExtNat(t) + off, t});
            }
            for (std::uint64_t k = 0; k < d[w]; ++k) {
                const auto [due, arrived] = fa.deadlines.front();
                fa.deadlines.pop_front();
                if (due < ExtNat(t)) ++fa.misses; // served after its worst-case deadline
                fa.max_delay = std::max(fa.max_delay, t - arrived);
            }
            if (!fa.deadlines.empty()) {
                const ExtNat due = fa.deadlines.front().first;
                deadline_cell[w] = due.is_inf() ? "inf" : std::to_string(due.get());
            }
        }

        // services update, then dominance and schedulability are re-audited
        std::vector<std::uint64_t> b_next(n);
        sys = update_system(sys, a, d);
        for (std::size_t w = 0; w < n; ++w) {
            b_next[w] = sys.flows[w].service.b;
            detail::FlowAudit& fa = audit[w];
            fa.cum_a.push_back(fa.cum_a.back() + a[w]);
            fa.cum_d.push_back(fa.cum_d.back() + d[w]);
            fa.max_backlog = std::max(fa.max_backlog, b_next[w]);
            if (fa.dominance_checkable) {
                std::vector<ExtNat> qp{ExtNat(0)};
                for (std::size_t k = 1; k < fa.cum_a.size(); ++k)
                    qp.push_back(ExtNat(fa.cum_a[k] + fa.frozen.b));
                const CumVec qreal(std::move(qp), ExtNat(0));
                try {
                    // closed-form kinds here are causal, so indices checked in
                    // earlier slots stay settled; only the newest one is new
                    const std::size_t last = fa.cum_d.size() - 1;
                    const std::size_t from = fa.frozen.is<TableService>() ? 1 : last;
                    for (std::size_t k = from; k <= last; ++k)
                        if (ExtNat(fa.cum_d[k]) < eval_at(fa.frozen, qreal, k))
                            throw inconsistent_state_error(
                                "audit: departures fell below the frozen guarantee at slot " +
                                std::to_string(t));
                } catch (const unknown_input_error&) {
                    fa.dominance_checkable = false; // table universe exhausted
                }
            }
        }
        if (cfg.upgrade_on_empty) {
            bool eligible = n > 0;
            for (const SystemFlow& f : sys.flows)
                eligible = eligible && f.service.b == 0 && f.service.is<DualCurve>() &&
                           non_degenerate(f.service.as<DualCurve>());
            if (eligible) {
                for (SystemFlow& f : sys.flows) {
                    const CumVec& v = f.service.as<DualCurve>().v;
                    f.service = make_dual_curve(DualCurve{v, v}, 0);
                }
                ++upgrades;
            }
        }
        const SchedVerdict after = schedulability(sys);
        if (!after.schedulable)
            throw inconsistent_state_error("audit: system left the schedulable region at slot " +
                                           std::to_string(t));
        const ExtNat slack = min_slack(sys);
        slack_min = min(slack_min, slack);

        // trace record
        trace << t << "," << mu << "," << base.value[base.full_mask()] << ",1,";
        if (slack.is_inf()) trace << "inf";
        else trace << slack.get();
        for (const std::string& id : all_ids) {
            bool found = false;
            for (std::size_t w = 0; w < n; ++w) {
                if (active[w].id != id) continue;
                trace << "," << a[w] << "," << d[w] << "," << q_now[w] << "," << b_next[w] << ","
                      << p_now[w] << "," << deadline_cell[w];
                found = true;
                break;
            }
            if (!found) trace << ",0,0,0,0,0,-";
        }
        trace << "\n";
    }

    // tasks whose deadline fell inside the simulated window but never departed
    for (detail::FlowAudit& fa : audit)
        for (const auto& [due, arrived] : fa.deadlines)
            if (due < ExtNat(cfg.slots)) ++fa.misses;

    Json per_flow = Json::object();
    std::uint64_t misses = 0;
    for (std::size_t w = 0; w < active.size(); ++w) {
        per_flow[active[w].id] = Json{{"max_backlog", audit[w].max_backlog},
                                      {"max_delay", audit[w].max_delay},
                                      {"dominance_checked", audit[w].dominance_checkable}};
        misses += audit[w].misses;
    }
    Json denied_j = Json::array();
    for (const auto& [slot, what] : denied)
        denied_j.push_back(Json{{"slot", slot}, {"request", what}});
    Json metrics{{"slots", cfg.slots},
                 {"deadline_rigid", all_rigid},
                 {"deadline_misses", misses},
                 {"min_slack", slack_min.is_inf() ? Json("inf") : Json(slack_min.get())},
                 {"curve_upgrades", upgrades},
                 {"flows", per_flow},
                 {"denied", denied_j},
                 {"schedulable", true}};
    return {trace.str(), std::move(metrics)};
}

} // namespace wcs
