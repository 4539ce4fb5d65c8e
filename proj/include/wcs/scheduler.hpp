#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcs/cumvec.hpp"
#include "wcs/polymatroid.hpp"
#include "wcs/service.hpp"

namespace wcs {

struct SystemFlow {
    std::string id;
    ServiceState service;
    bool operator==(const SystemFlow&) const = default;
};

// A worst-case system: flows sharing one constant-capacity server. The
// horizon only bounds dense/witness scans; admission checks themselves are
// exact over all window offsets via prefix-plus-slope comparisons.
struct System {
    std::uint64_t capacity = 1;
    std::size_t horizon = 256;
    std::vector<SystemFlow> flows;
    bool operator==(const System&) const = default;

    std::size_t n() const { return flows.size(); }
};

// --- schedulability -----------------------------------------------------

struct SchedVerdict {
    bool schedulable = true;
    // violating window [t+i, t+j); i is inf when only the diagonal limit
    // exceeds capacity with no finite witness (unschedulable at the tail).
    std::optional<std::pair<ExtNat, std::uint64_t>> witness;
};

namespace detail {

inline CumVec row0_sum(const System& sys, std::uint32_t mask) {
    CumVec acc = CumVec::zero();
    for (std::size_t w = 0; w < sys.n(); ++w)
        if (mask & (std::uint32_t(1) << w)) acc = add(acc, lambda_row(sys.flows[w].service, 0));
    return acc;
}

inline CumVec diag_sum(const System& sys, std::uint32_t mask) {
    CumVec acc = CumVec::zero();
    for (std::size_t w = 0; w < sys.n(); ++w)
        if (mask & (std::uint32_t(1) << w)) acc = add(acc, diag_limit(sys.flows[w].service));
    return acc;
}

} // namespace detail

// Exact check of sum_w lambda_ij^w <= (j-i)^+ c for every window: row 0 is
// compared against the capacity vector directly, rows i >= 1 through the
// per-offset supremum sup_i lambda_{i,i+k}.
inline SchedVerdict schedulability(const System& sys) {
    const std::uint32_t full = (std::uint32_t(1) << sys.n()) - 1;
    const CumVec cap = CumVec::rate(sys.capacity);
    if (auto j = first_violation(detail::row0_sum(sys, full), cap))
        return {false, {{ExtNat(0), *j}}};
    const CumVec diag = detail::diag_sum(sys, full);
    if (auto k = first_violation(diag, cap)) {
        // search a concrete row witness within the horizon
        const ExtNat bound = ExtNat(*k) * ExtNat(sys.capacity);
        for (std::size_t i = 1; i <= sys.horizon; ++i) {
            CumVec acc = CumVec::zero();
            for (const SystemFlow& f : sys.flows) acc = add(acc, lambda_row(f.service, i));
            if (acc.value(i + *k) > bound) return {false, {{ExtNat(i), i + *k}}};
        }
        return {false, {{ExtNat::inf(), *k}}};
    }
    return {true, {}};
}

// --- rho / eta ------------------------------------------------------------

struct ExtRat {
    bool inf = false;
    Rat value = Rat(0);

    bool operator==(const ExtRat&) const = default;
    friend bool operator<(const ExtRat& a, const ExtRat& b) {
        if (a.inf) return false;
        if (b.inf) return true;
        return a.value < b.value;
    }
};

namespace detail {

// sup over k >= 1 of X_k / k for an eventually-affine X: sampled through the
// prefix, with the tail slope as the limit candidate.
inline ExtRat sup_ratio(const CumVec& x) {
    ExtRat best{false, Rat(0)};
    for (std::size_t k = 1; k <= x.prefix_len(); ++k) {
        const ExtNat v = x.value(k);
        if (v.is_inf()) return {true, Rat(0)};
        best = std::max(best, ExtRat{false, Rat((long long)v.get(), (long long)k)});
    }
    if (x.tail_inc().is_inf()) return {true, Rat(0)};
    return std::max(best, ExtRat{false, Rat((long long)x.tail_inc().get())});
}

} // namespace detail

// Least capacity a dedicated server for the flow subset would need.
inline ExtRat rho(const System& sys, std::uint32_t mask) {
    if (mask == 0) return {false, Rat(0)};
    return std::max(detail::sup_ratio(detail::row0_sum(sys, mask)),
                    detail::sup_ratio(detail::diag_sum(sys, mask)));
}

// Multiplexing gain: standalone capacity needs over the shared need.
inline Rat eta(const System& sys) {
    const std::uint32_t full = (std::uint32_t(1) << sys.n()) - 1;
    const ExtRat shared = rho(sys, full);
    if (shared.inf) throw domain_error("eta: rho is infinite");
    Rat total(0);
    for (std::size_t w = 0; w < sys.n(); ++w) {
        const ExtRat r = rho(sys, std::uint32_t(1) << w);
        if (r.inf) throw domain_error("eta: rho is infinite");
        total += r.value;
    }
    if (shared.value == Rat(0)) return Rat(1);
    return total / shared.value;
}

inline void validate_partition(const System& sys, const std::vector<std::uint32_t>& classes) {
    const std::uint32_t full = (std::uint32_t(1) << sys.n()) - 1;
    std::uint32_t seen = 0;
    for (std::uint32_t m : classes) {
        if (m == 0 || (m & seen)) throw domain_error("partition: classes must be disjoint and non-empty");
        seen |= m;
    }
    if (seen != full) throw domain_error("partition: classes must cover all flows");
}

// Gain retained when each class gets its own server.
inline Rat eta_partition(const System& sys, const std::vector<std::uint32_t>& classes) {
    validate_partition(sys, classes);
    Rat total(0);
    for (std::size_t w = 0; w < sys.n(); ++w) {
        const ExtRat r = rho(sys, std::uint32_t(1) << w);
        if (r.inf) throw domain_error("eta_partition: rho is infinite");
        total += r.value;
    }
    Rat denom(0);
    for (std::uint32_t m : classes) {
        const ExtRat r = rho(sys, m);
        if (r.inf) throw domain_error("eta_partition: rho is infinite");
        denom += r.value;
    }
    if (denom == Rat(0)) return Rat(1);
    return total / denom;
}

// --- baseline -------------------------------------------------------------

// Per-slot baseline function: beta(G) is the least number of tasks that must
// be served from G this slot, with its witness window offsets.
struct Baseline {
    std::size_t n = 0;
    std::uint64_t capacity = 0;
    std::vector<std::uint64_t> q;        // per-flow queue sizes
    std::vector<std::uint64_t> value;    // 2^n entries
    std::vector<std::uint64_t> jwitness; // argmax offsets, minimized on ties

    SetFn to_setfn() const { return SetFn(n, value); }
    std::uint32_t full_mask() const { return (std::uint32_t(1) << n) - 1; }
    std::uint64_t q_sum(std::uint32_t mask) const {
        std::uint64_t s = 0;
        for (std::size_t w = 0; w < n; ++w)
            if (mask & (std::uint32_t(1) << w)) s += q[w];
        return s;
    }
};

namespace detail {

inline i128 finite(const ExtNat& v, const char* what) {
    if (v.is_inf()) throw inconsistent_state_error(what);
    return i128(v.get());
}

} // namespace detail

// beta(G) = max over j of (p_{j+1}^<G> + lambdahat_{1,j+1}^<Omega> - j c),
// computed superset-first so each witness bounds its subsets' searches.
// Requires a schedulable system.
inline Baseline baseline(const System& sys, const std::vector<std::uint64_t>& arrivals) {
    using detail::i128;
    const std::size_t n = sys.n();
    if (arrivals.size() != n) throw domain_error("baseline: arrivals size mismatch");
    Baseline out;
    out.n = n;
    out.capacity = sys.capacity;
    std::vector<CumVec> pvec;
    CumVec lsum = CumVec::zero();
    for (std::size_t w = 0; w < n; ++w) {
        const std::uint64_t q = arrivals[w] + sys.flows[w].service.b;
        out.q.push_back(q);
        pvec.push_back(p_vector(sys.flows[w].service, q));
        lsum = add(lsum, cond_row(sys.flows[w].service, q, 1));
    }
    const std::uint32_t full = (std::uint32_t(1) << n) - 1;
    std::vector<CumVec> psum(full + 1, CumVec::zero());
    for (std::uint32_t m = 1; m <= full; ++m) {
        const std::uint32_t low = m & (~m + 1);
        psum[m] = add(psum[m & (m - 1)], pvec[std::countr_zero(low)]);
    }
    out.value.assign(full + 1, 0);
    out.jwitness.assign(full + 1, 0);

    auto maximand = [&](std::uint32_t m, std::size_t j) -> i128 {
        return detail::finite(psum[m].value(j + 1), "baseline: infinite p") +
               detail::finite(lsum.value(j + 1), "baseline: infinite conditional spectrum") -
               i128(j) * i128(sys.capacity);
    };

    // masks in order of decreasing population count; supersets come first
    std::vector<std::uint32_t> order;
    for (std::uint32_t m = 0; m <= full; ++m) order.push_back(m);
    std::sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa > pb : a < b;
    });

    for (std::uint32_t m : order) {
        std::size_t bound;
        if (m == full) {
            bound = std::max(psum[m].prefix_len(), lsum.prefix_len());
            const ExtNat slope = psum[m].tail_inc() + lsum.tail_inc();
            if (slope.is_inf() || slope.get() > sys.capacity)
                throw inconsistent_state_error("baseline: unbounded maximand (system unschedulable?)");
        } else {
            // any superset bounds the witness (here: add the lowest missing flow)
            const std::uint32_t parent = m | ((~m & full) & (~(~m & full) + 1));
            bound = out.jwitness[parent];
        }
        i128 best = maximand(m, 0);
        std::size_t bestj = 0;
        for (std::size_t j = 1; j <= bound; ++j) {
            const i128 v = maximand(m, j);
            if (v > best) {
                best = v;
                bestj = j;
            }
        }
        out.value[m] = best > 0 ? std::uint64_t(best) : 0;
        out.jwitness[m] = bestj;
        if (m == 0 && out.value[0] != 0)
            throw inconsistent_state_error("baseline: beta(empty) > 0 (system unschedulable)");
    }
    return out;
}

// beta_mu(G) = max{beta(G), mu - q^<complement>}; requires mu feasible:
// beta(Omega) <= mu <= min{c, q^<Omega>}.
inline SetFn baseline_mu(const Baseline& b, std::uint64_t mu) {
    const std::uint32_t full = b.full_mask();
    const std::uint64_t hi = std::min(b.capacity, b.q_sum(full));
    if (mu < b.value[full] || mu > hi)
        throw range_error("baseline_mu: infeasible total service", b.value[full], hi);
    std::vector<std::uint64_t> t(full + 1);
    for (std::uint32_t m = 1; m <= full; ++m) {
        const std::uint64_t qbar = b.q_sum(full & ~m);
        t[m] = std::max(b.value[m], mu > qbar ? mu - qbar : 0);
    }
    return SetFn(b.n, std::move(t));
}

// Sampling of beta_mu on the sigma-algebra generated by a partition.
inline SetFn baseline_class(const SetFn& beta_mu, const std::vector<std::uint32_t>& classes) {
    return SetFn::from_fn(classes.size(), [&](std::uint32_t s) {
        std::uint32_t un = 0;
        for (std::size_t k = 0; k < classes.size(); ++k)
            if (s & (std::uint32_t(1) << k)) un |= classes[k];
        return beta_mu(un);
    });
}

// --- feasibility ------------------------------------------------------------

inline bool is_valid_schedule(const Baseline& b, std::span<const std::uint64_t> d) {
    if (d.size() != b.n) throw domain_error("schedule: dimension mismatch");
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < b.n; ++w) {
        if (d[w] > b.q[w]) return false;
        total += d[w];
    }
    return total <= b.capacity;
}

// Feasibility by the baseline constraint: d^<G> >= beta(G) for every subset.
inline bool is_feasible(const Baseline& b, std::span<const std::uint64_t> d) {
    if (!is_valid_schedule(b, d)) return false;
    const std::uint32_t full = b.full_mask();
    for (std::uint32_t m = 1; m <= full; ++m) {
        std::uint64_t sum = 0;
        for (std::size_t w = 0; w < b.n; ++w)
            if (m & (std::uint32_t(1) << w)) sum += d[w];
        if (sum < b.value[m]) return false;
    }
    return true;
}

inline bool is_feasible(const System& sys, const std::vector<std::uint64_t>& arrivals,
                        const std::vector<std::uint64_t>& d) {
    return is_feasible(baseline(sys, arrivals), d);
}

// Alternative route: descend from d onto the baseline permutohedron. Returns
// a point of P(beta) dominated by d, which exists iff d is feasible.
inline std::optional<std::vector<std::uint64_t>> dominated_baseline_point(
    const Baseline& b, std::span<const std::uint64_t> d) {
    if (!is_valid_schedule(b, d)) return std::nullopt;
    const std::uint32_t full = b.full_mask();
    std::vector<std::uint64_t> x(d.begin(), d.end());
    auto subset_sum = [&](std::uint32_t m) {
        std::uint64_t s = 0;
        for (std::size_t w = 0; w < b.n; ++w)
            if (m & (std::uint32_t(1) << w)) s += x[w];
        return s;
    };
    for (std::size_t guard = 0; guard <= b.n * (std::size_t(full) + 2); ++guard) {
        std::uint32_t tight = 0;
        for (std::uint32_t m = 1; m <= full; ++m) {
            const std::uint64_t s = subset_sum(m);
            if (s < b.value[m]) return std::nullopt;
            if (s == b.value[m]) tight |= m;
        }
        if (subset_sum(full) == b.value[full]) return x;
        if (tight == full) return std::nullopt;
        const std::uint32_t wbit = (~tight & full) & (~(~tight & full) + 1);
        const std::size_t w = std::countr_zero(wbit);
        std::uint64_t slack = subset_sum(full) - b.value[full];
        for (std::uint32_t m = 1; m <= full; ++m)
            if (m & wbit) slack = std::min(slack, subset_sum(m) - b.value[m]);
        x[w] -= slack;
    }
    throw inconsistent_state_error("dominated_baseline_point: descent did not terminate");
}

// --- max-slack -------------------------------------------------------------

// Box of Def-12 schedules at total mu: p_{j_mu} <= e <= p_{j_mu+1} with
// j_mu = tau_{mu+1}(p^<Omega>), or p_inf <= e <= q when j_mu is infinite.
// Deterministic representative: start at the lower corner and hand the
// remainder out in ascending flow order.
struct MaxSlackBox {
    std::vector<std::uint64_t> lo, hi;
    ExtNat jmu;
};

namespace detail {

inline std::vector<std::uint64_t> fill_box(const std::vector<std::uint64_t>& lo,
                                           const std::vector<std::uint64_t>& hi,
                                           std::uint64_t total) {
    std::vector<std::uint64_t> e = lo;
    std::uint64_t have = 0;
    for (std::uint64_t v : lo) have += v;
    if (have > total) throw inconsistent_state_error("max-slack box: lower corner above total");
    std::uint64_t rem = total - have;
    for (std::size_t w = 0; w < e.size() && rem > 0; ++w) {
        const std::uint64_t room = hi[w] - e[w];
        const std::uint64_t give = std::min(room, rem);
        e[w] += give;
        rem -= give;
    }
    if (rem > 0) throw range_error("max-slack box: total exceeds the box", 0, total - rem);
    return e;
}

} // namespace detail

inline MaxSlackBox max_slack_box(const System& sys, const std::vector<std::uint64_t>& arrivals,
                                 std::uint64_t mu) {
    const std::size_t n = sys.n();
    if (arrivals.size() != n) throw domain_error("max_slack: arrivals size mismatch");
    std::vector<CumVec> pvec;
    std::vector<std::uint64_t> q;
    CumVec psum = CumVec::zero();
    for (std::size_t w = 0; w < n; ++w) {
        q.push_back(arrivals[w] + sys.flows[w].service.b);
        pvec.push_back(p_vector(sys.flows[w].service, q.back()));
        psum = add(psum, pvec.back());
    }
    std::uint64_t qsum = 0;
    for (std::uint64_t v : q) qsum += v;
    if (mu > qsum) throw range_error("max_slack: box empty (mu > total queue)", 0, qsum);
    MaxSlackBox box;
    box.jmu = tau(psum, mu + 1);
    for (std::size_t w = 0; w < n; ++w) {
        if (box.jmu.is_inf()) {
            box.lo.push_back(pvec[w].limit().get());
            box.hi.push_back(q[w]);
        } else {
            const std::size_t j = std::size_t(box.jmu.get());
            box.lo.push_back(pvec[w].value(j).get());
            box.hi.push_back(pvec[w].value(j + 1).get());
        }
    }
    return box;
}

inline std::vector<std::uint64_t> max_slack(const System& sys,
                                            const std::vector<std::uint64_t>& arrivals,
                                            std::uint64_t mu) {
    const MaxSlackBox box = max_slack_box(sys, arrivals, mu);
    return detail::fill_box(box.lo, box.hi, mu);
}

// Per-class boxes under a class schedule nu (one total per class).
inline std::vector<std::uint64_t> intra_class_max_slack(const System& sys,
                                                        const std::vector<std::uint64_t>& arrivals,
                                                        const std::vector<std::uint32_t>& classes,
                                                        const std::vector<std::uint64_t>& nu) {
    validate_partition(sys, classes);
    if (nu.size() != classes.size()) throw domain_error("intra_class: nu size mismatch");
    std::vector<std::uint64_t> e(sys.n(), 0);
    for (std::size_t k = 0; k < classes.size(); ++k) {
        std::vector<std::size_t> members;
        for (std::size_t w = 0; w < sys.n(); ++w)
            if (classes[k] & (std::uint32_t(1) << w)) members.push_back(w);
        std::vector<CumVec> pvec;
        std::vector<std::uint64_t> q;
        CumVec psum = CumVec::zero();
        for (std::size_t w : members) {
            q.push_back(arrivals[w] + sys.flows[w].service.b);
            pvec.push_back(p_vector(sys.flows[w].service, q.back()));
            psum = add(psum, pvec.back());
        }
        std::uint64_t qsum = 0;
        for (std::uint64_t v : q) qsum += v;
        if (nu[k] > qsum)
            throw range_error("intra_class: class total exceeds its queue", 0, qsum);
        const ExtNat jk = tau(psum, nu[k] + 1);
        std::vector<std::uint64_t> lo, hi;
        for (std::size_t idx = 0; idx < members.size(); ++idx) {
            if (jk.is_inf()) {
                lo.push_back(pvec[idx].limit().get());
                hi.push_back(q[idx]);
            } else {
                lo.push_back(pvec[idx].value(std::size_t(jk.get())).get());
                hi.push_back(pvec[idx].value(std::size_t(jk.get()) + 1).get());
            }
        }
        const std::vector<std::uint64_t> ek = detail::fill_box(lo, hi, nu[k]);
        for (std::size_t idx = 0; idx < members.size(); ++idx) e[members[idx]] = ek[idx];
    }
    return e;
}

// nu is feasible iff it lies in the class permutohedron P(beta_mu^P).
inline bool class_feasible(const System& sys, const std::vector<std::uint64_t>& arrivals,
                           const std::vector<std::uint32_t>& classes,
                           const std::vector<std::uint64_t>& nu) {
    validate_partition(sys, classes);
    std::uint64_t mu = 0;
    for (std::uint64_t v : nu) mu += v;
    const Baseline b = baseline(sys, arrivals);
    const std::uint64_t hi = std::min(b.capacity, b.q_sum(b.full_mask()));
    if (mu < b.value[b.full_mask()] || mu > hi) return false;
    const SetFn bp = baseline_class(baseline_mu(b, mu), classes);
    return membership(bp, nu);
}

// --- worst-case deadlines / EDF ----------------------------------------------

struct TaskDeadline {
    std::size_t flow = 0;
    std::uint64_t h = 0; // task position in its flow's queue (1-based)
    ExtNat offset;       // worst-case deadline is slot t + offset
};

// Every queued task of every flow, ordered by non-decreasing worst-case
// deadline, ties broken by (flow id, task index).
inline std::vector<TaskDeadline> edf_order(const System& sys,
                                           const std::vector<std::uint64_t>& arrivals) {
    std::vector<TaskDeadline> out;
    for (std::size_t w = 0; w < sys.n(); ++w) {
        const std::uint64_t q = arrivals[w] + sys.flows[w].service.b;
        const CumVec p = p_vector(sys.flows[w].service, q);
        for (std::uint64_t h = 1; h <= q; ++h) out.push_back({w, h, tau(p, h)});
    }
    std::stable_sort(out.begin(), out.end(), [](const TaskDeadline& a, const TaskDeadline& b) {
        if (a.offset != b.offset) return a.offset < b.offset;
        if (a.flow != b.flow) return a.flow < b.flow;
        return a.h < b.h;
    });
    return out;
}

// --- schedule selection ---------------------------------------------------------

struct Policy {
    // UnwieldyFirst is the vertex schedule whose priority order ranks flows by
    // the length of their dynamic curve, serving unwieldy curves first so
    // their updates shed pieces.
    enum class Kind { MaxSlack, Edf, Vertex, Fair, Gps, UnwieldyFirst } kind = Kind::MaxSlack;
    Perm perm;                          // Vertex
    std::vector<std::uint64_t> weights; // Gps; defaults to all ones
};

inline std::uint64_t work_conserving_mu(const System& sys,
                                        const std::vector<std::uint64_t>& arrivals) {
    std::uint64_t qsum = 0;
    for (std::size_t w = 0; w < sys.n(); ++w) qsum += arrivals[w] + sys.flows[w].service.b;
    return std::min(sys.capacity, qsum);
}

namespace detail {

inline std::vector<std::uint64_t> round_centroid(const SetFn& chi, const std::vector<Rat>& c) {
    std::vector<std::uint64_t> d(c.size());
    std::vector<std::pair<Rat, std::size_t>> rem;
    long long have = 0;
    for (std::size_t w = 0; w < c.size(); ++w) {
        const long long fl = c[w].numerator() / c[w].denominator(); // values are >= 0
        d[w] = std::uint64_t(fl);
        have += fl;
        rem.push_back({c[w] - Rat(fl), w});
    }
    const long long want = (long long)chi(chi.full_mask());
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; have < want && k < rem.size(); ++k, ++have) ++d[rem[k].second];
    return d;
}

inline std::vector<std::uint64_t> nearest_vertex(const SetFn& chi, const std::vector<Rat>& c) {
    std::vector<std::uint64_t> best;
    Rat bestd(0);
    for (const Perm& pi : all_perms(chi.n())) {
        const std::vector<std::uint64_t> v = vertex(chi, pi);
        Rat dist(0);
        for (std::size_t w = 0; w < v.size(); ++w) {
            const Rat diff = Rat((long long)v[w]) - c[w];
            dist += diff < Rat(0) ? -diff : diff;
        }
        if (best.empty() || dist < bestd) {
            best = v;
            bestd = dist;
        }
    }
    return best;
}

} // namespace detail

// Select a feasible schedule at total mu according to the policy. vertex and
// fair draw from the feasible permutohedron P(beta_mu); max_slack and edf
// avoid computing the baseline altogether; gps picks the max-slack point of
// the baseline permutohedron and hands out the excess capacity by weight.
inline std::vector<std::uint64_t> select_schedule(const System& sys,
                                                  const std::vector<std::uint64_t>& arrivals,
                                                  std::uint64_t mu, const Policy& policy) {
    switch (policy.kind) {
    case Policy::Kind::MaxSlack:
        return max_slack(sys, arrivals, mu);
    case Policy::Kind::Edf: {
        std::vector<std::uint64_t> d(sys.n(), 0);
        std::uint64_t left = mu;
        for (const TaskDeadline& t : edf_order(sys, arrivals)) {
            if (left == 0) break;
            ++d[t.flow];
            --left;
        }
        if (left > 0) throw range_error("edf: mu exceeds the total queue", 0, mu - left);
        return d;
    }
    case Policy::Kind::Vertex: {
        const SetFn bm = baseline_mu(baseline(sys, arrivals), mu);
        if (policy.perm.size() != sys.n()) throw domain_error("vertex policy: bad permutation");
        return vertex(bm, policy.perm);
    }
    case Policy::Kind::UnwieldyFirst: {
        const SetFn bm = baseline_mu(baseline(sys, arrivals), mu);
        Perm pi = identity_perm(sys.n());
        auto pieces = [&](std::size_t w) -> std::size_t {
            const ServiceState& s = sys.flows[w].service;
            return s.is<DualCurve>() ? s.as<DualCurve>().u.prefix_len() : 0;
        };
        // ascending rank order: the longest dynamic curve lands the top priority
        std::stable_sort(pi.begin(), pi.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return pieces(a) < pieces(b); });
        return vertex(bm, pi);
    }
    case Policy::Kind::Fair: {
        const SetFn bm = baseline_mu(baseline(sys, arrivals), mu);
        const std::vector<Rat> c = centroid(bm);
        std::vector<std::uint64_t> d = detail::round_centroid(bm, c);
        if (membership(bm, d)) return d;
        if (sys.n() <= 8) return detail::nearest_vertex(bm, c);
        return max_slack(sys, arrivals, mu);
    }
    case Policy::Kind::Gps: {
        const Baseline b = baseline(sys, arrivals);
        std::vector<std::uint64_t> d = max_slack(sys, arrivals, b.value[b.full_mask()]);
        std::vector<std::uint64_t> w = policy.weights;
        if (w.empty()) w.assign(sys.n(), 1);
        if (w.size() != sys.n()) throw domain_error("gps policy: bad weights");
        std::uint64_t total = 0;
        for (std::uint64_t v : d) total += v;
        std::uint64_t excess = std::min(sys.capacity, b.q_sum(b.full_mask())) - total;
        while (excess > 0) {
            std::uint64_t wsum = 0;
            for (std::size_t i = 0; i < sys.n(); ++i)
                if (d[i] < b.q[i]) wsum += w[i];
            if (wsum == 0) break;
            // hand out proportional shares, then leftovers by largest remainder
            std::vector<std::pair<Rat, std::size_t>> rem;
            std::uint64_t given = 0;
            for (std::size_t i = 0; i < sys.n(); ++i) {
                if (d[i] >= b.q[i]) continue;
                const Rat share((long long)(excess * w[i]), (long long)wsum);
                std::uint64_t units = std::uint64_t(share.numerator() / share.denominator());
                units = std::min(units, b.q[i] - d[i]);
                d[i] += units;
                given += units;
                rem.push_back({share - Rat((long long)units), i});
            }
            std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (const auto& [r, i] : rem) {
                if (given >= excess) break;
                if (d[i] < b.q[i]) {
                    ++d[i];
                    ++given;
                }
            }
            if (given == 0) break;
            excess -= std::min(excess, given);
        }
        return d;
    }
    }
    throw domain_error("select_schedule: unknown policy");
}

inline System update_system(const System& sys, const std::vector<std::uint64_t>& arrivals,
                            const std::vector<std::uint64_t>& d) {
    System out = sys;
    for (std::size_t w = 0; w < sys.n(); ++w)
        out.flows[w].service = update(sys.flows[w].service, arrivals[w], d[w]);
    return out;
}

// Tightest row-0 window headroom: min over j >= 1 of (jc - sum lambda_0j).
inline ExtNat min_slack(const System& sys) {
    const CumVec row = detail::row0_sum(sys, (std::uint32_t(1) << sys.n()) - 1);
    const ExtNat c(sys.capacity);
    ExtNat best = ExtNat::inf();
    for (std::size_t j = 1; j <= row.prefix_len() + 1; ++j)
        best = min(best, monus(ExtNat(std::uint64_t(j)) * c, row.value(j)));
    return best;
}

} // namespace wcs
