#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "wcs/cumvec.hpp"
#include "wcs/dualcurve.hpp"
#include "wcs/errors.hpp"
#include "wcs/matrix.hpp"
#include "wcs/minplus.hpp"

namespace wcs {

// psi(q) = (q - bbar*delta)^+: backlogs stay below bbar.
struct UniformBacklog {
    std::uint64_t bbar = 0;
    bool operator==(const UniformBacklog&) const = default;
};

// psi(q) = R^theta (q - b*delta) + r: every task delay stays below theta.
// r bounds the initial backlog's share: R^theta b*delta <= r <= b*delta.
struct UniformDelay {
    std::uint64_t theta = 0;
    CumVec r;
    bool operator==(const UniformDelay&) const = default;
};

// Explicit map from queued arrival vectors to worst-case departure vectors,
// total over the universe {q : q_1 in [b, b+A], increments <= A, constant
// past offset H}. Exists to exercise the general theory at oracle scale.
struct TableService {
    std::size_t H = 1;
    std::uint64_t A = 1;
    std::map<std::vector<std::uint64_t>, CumVec> entries; // key = (q_1 .. q_H)
    bool operator==(const TableService&) const = default;
};

struct ServiceState {
    using Kind = std::variant<UniformBacklog, UniformDelay, TableService, CumulativeMatrix, DualCurve>;
    Kind kind;
    std::uint64_t b = 0;

    bool operator==(const ServiceState&) const = default;

    template <class T> bool is() const { return std::holds_alternative<T>(kind); }
    template <class T> const T& as() const { return std::get<T>(kind); }
};

// --- table universe -------------------------------------------------------

// All (q_1..q_H) keys of the universe conditioned on backlog b.
inline std::vector<std::vector<std::uint64_t>> table_keys(std::uint64_t b, std::size_t H,
                                                          std::uint64_t A) {
    std::vector<std::vector<std::uint64_t>> out;
    std::vector<std::uint64_t> cur(H, 0);
    auto rec = [&](auto&& self, std::size_t pos) -> void {
        if (pos == H) {
            out.push_back(cur);
            return;
        }
        const std::uint64_t lo = pos == 0 ? b : cur[pos - 1];
        for (std::uint64_t v = lo; v <= lo + A; ++v) {
            cur[pos] = v;
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
    return out;
}

inline CumVec key_to_q(const std::vector<std::uint64_t>& key) {
    std::vector<ExtNat> pre{ExtNat(0)};
    for (std::uint64_t v : key) pre.push_back(ExtNat(v));
    return CumVec(std::move(pre), ExtNat(0));
}

// --- validation ------------------------------------------------------------

inline void validate_service(const ServiceState& s) {
    const CumVec bdelta = CumVec::scaled_delta(s.b);
    if (const auto* ud = std::get_if<UniformDelay>(&s.kind)) {
        if (!leq(shift_right(bdelta, ud->theta), ud->r) || !leq(ud->r, bdelta))
            throw representation_error("UniformDelay: r outside [R^theta b*delta, b*delta]");
    } else if (const auto* t = std::get_if<TableService>(&s.kind)) {
        if (t->H < 1) throw representation_error("TableService: H must be >= 1");
        auto keys = table_keys(s.b, t->H, t->A);
        if (keys.size() != t->entries.size())
            throw representation_error("TableService: entries must cover the declared universe");
        for (const auto& key : keys) {
            auto it = t->entries.find(key);
            if (it == t->entries.end())
                throw representation_error("TableService: missing universe entry");
            if (!leq(it->second, key_to_q(key)))
                throw representation_error("TableService: psi(q) <= q violated");
        }
    }
}

// Convenience factories (validated).
inline ServiceState make_uniform_backlog(std::uint64_t bbar, std::uint64_t b) {
    return ServiceState{UniformBacklog{bbar}, b};
}
inline ServiceState make_uniform_delay(std::uint64_t theta, CumVec r, std::uint64_t b) {
    ServiceState s{UniformDelay{theta, std::move(r)}, b};
    validate_service(s);
    return s;
}
inline ServiceState make_table(TableService t, std::uint64_t b) {
    ServiceState s{std::move(t), b};
    validate_service(s);
    return s;
}
inline ServiceState make_min_plus(CumulativeMatrix m, std::uint64_t b) {
    return ServiceState{std::move(m), b};
}
inline ServiceState make_min_plus(const SpectralMatrix& sm) {
    return ServiceState{CumulativeMatrix(sm.s), sm.b};
}
inline ServiceState make_dual_curve(DualCurve dc, std::uint64_t b) {
    return ServiceState{std::move(dc), b};
}

// Build a table service from a function over the universe.
template <class Fn>
ServiceState table_from_fn(std::uint64_t b, std::size_t H, std::uint64_t A, Fn&& psi) {
    TableService t{H, A, {}};
    for (auto& key : table_keys(b, H, A)) {
        CumVec q = key_to_q(key);
        t.entries.emplace(std::move(key), psi(q));
    }
    return make_table(std::move(t), b);
}

// The service that promises delay <= theta to a lone task: psi(q) =
// R^{i+theta} delta when q = R^i delta, and 0 on every other input.
inline ServiceState single_task_table(std::uint64_t theta, std::size_t H, std::uint64_t A = 1) {
    return table_from_fn(0, H, A, [&](const CumVec& q) {
        for (std::size_t i = 0; i < H; ++i)
            if (q == shift_right(CumVec::delta(), i)) return shift_right(CumVec::delta(), i + theta);
        return CumVec::zero();
    });
}

// --- evaluation -------------------------------------------------------------

inline CumVec eval(const ServiceState& s, const CumVec& q) {
    if (!leq(CumVec::scaled_delta(s.b), q))
        throw domain_error("eval: q below b*delta");
    return std::visit(
        [&](const auto& k) -> CumVec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UniformBacklog>) {
                return monus_clamped(q, CumVec::scaled_delta(k.bbar));
            } else if constexpr (std::is_same_v<T, UniformDelay>) {
                return add(shift_right(monus_clamped(q, CumVec::scaled_delta(s.b)), k.theta), k.r);
            } else if constexpr (std::is_same_v<T, TableService>) {
                std::vector<std::uint64_t> key;
                for (std::size_t j = 1; j <= k.H; ++j) {
                    ExtNat v = q.value(j);
                    if (v.is_inf()) throw unknown_input_error("table eval: q outside universe");
                    key.push_back(v.get());
                }
                auto it = k.entries.find(key);
                if (it == k.entries.end() || !(q == key_to_q(key)))
                    throw unknown_input_error("table eval: q outside universe");
                return it->second;
            } else if constexpr (std::is_same_v<T, CumulativeMatrix>) {
                return mat_eval(k.m, q);
            } else {
                return dc_eval(k, q);
            }
        },
        s.kind);
}

// Single-index evaluation psi_j(q), cheaper than materializing the vector.
inline ExtNat eval_at(const ServiceState& s, const CumVec& q, std::size_t j) {
    return std::visit(
        [&](const auto& k) -> ExtNat {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UniformBacklog>) {
                return j == 0 ? ExtNat(0) : monus(q.value(j), ExtNat(k.bbar));
            } else if constexpr (std::is_same_v<T, UniformDelay>) {
                const ExtNat shifted =
                    j > k.theta ? monus(q.value(j - k.theta), ExtNat(s.b)) : ExtNat(0);
                return shifted + k.r.value(j);
            } else if constexpr (std::is_same_v<T, TableService>) {
                return eval(s, q).value(j);
            } else if constexpr (std::is_same_v<T, CumulativeMatrix>) {
                const std::size_t jj = std::min(j, k.g()); // finite: constant past g
                ExtNat best = ExtNat::inf();
                for (std::size_t i = 0; i <= jj; ++i)
                    best = min(best, q.value(i) + k.m.at(i, jj));
                return best;
            } else {
                ExtNat best = k.u.value(j);
                for (std::size_t i = 1; i <= j; ++i)
                    best = min(best, q.value(i) + k.v.value(j - i));
                return best;
            }
        },
        s.kind);
}

// --- spectra -----------------------------------------------------------------

namespace detail {

inline CumVec table_lambda_row(const TableService& t, std::uint64_t /*b*/, std::size_t i) {
    CumVec row = CumVec::zero();
    for (const auto& [key, psi] : t.entries) {
        const ExtNat qi = key_to_q(key).value(i);
        row = max_of(row, monus_clamped(psi, CumVec::scaled_delta(qi)));
    }
    return row;
}

inline CumVec table_cond_row(const TableService& t, std::uint64_t q, std::size_t i) {
    CumVec row = CumVec::zero();
    bool any = false;
    for (const auto& [key, psi] : t.entries) {
        if (key[0] != q) continue;
        any = true;
        const ExtNat qi = key_to_q(key).value(i);
        row = max_of(row, monus_clamped(psi, CumVec::scaled_delta(qi)));
    }
    if (!any) throw unknown_input_error("table: current queue size outside universe");
    return row;
}

inline CumVec ud_lambda_row0(const UniformDelay& ud) {
    std::vector<ExtNat> pre{ExtNat(0)};
    for (std::size_t j = 1; j <= ud.theta; ++j) pre.push_back(ud.r.value(j));
    return CumVec(std::move(pre), ExtNat::inf());
}

} // namespace detail

// Row i of the spectrum: lambda_ij as a cumulative vector over all j.
inline CumVec lambda_row(const ServiceState& s, std::size_t i) {
    return std::visit(
        [&](const auto& k) -> CumVec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UniformBacklog>) {
                return shift_right(CumVec::epsilon(), i);
            } else if constexpr (std::is_same_v<T, UniformDelay>) {
                if (i == 0) return detail::ud_lambda_row0(k);
                return shift_right(CumVec::epsilon(), i + k.theta);
            } else if constexpr (std::is_same_v<T, TableService>) {
                return detail::table_lambda_row(k, s.b, i);
            } else if constexpr (std::is_same_v<T, CumulativeMatrix>) {
                return to_spectral(k, s.b).s.row(i);
            } else {
                return dc_lambda_row(k, s.b, i);
            }
        },
        s.kind);
}

// sup over i >= 1 of lambda_{i, i+k}, as a cumulative vector in the window
// length k. Together with row 0 this captures the whole spectrum exactly.
inline CumVec diag_limit(const ServiceState& s) {
    return std::visit(
        [&](const auto& k) -> CumVec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UniformBacklog>) {
                return CumVec::epsilon();
            } else if constexpr (std::is_same_v<T, UniformDelay>) {
                return shift_right(CumVec::epsilon(), k.theta);
            } else if constexpr (std::is_same_v<T, TableService>) {
                CumVec d = CumVec::zero();
                for (std::size_t i = 1; i <= k.H; ++i)
                    d = max_of(d, shift_left(detail::table_lambda_row(k, s.b, i), i));
                return d;
            } else if constexpr (std::is_same_v<T, CumulativeMatrix>) {
                const SpectralMatrix sm = to_spectral(k, s.b);
                std::vector<ExtNat> pre;
                for (std::size_t kk = 0; kk <= sm.g() + 1; ++kk) {
                    ExtNat best(0);
                    for (std::size_t i = 1; i <= sm.g(); ++i)
                        best = max(best, sm.s.at(i, i + kk));
                    pre.push_back(best);
                }
                return CumVec(std::move(pre), ExtNat(0));
            } else {
                return dc_diag_limit(k, s.b);
            }
        },
        s.kind);
}

// Row i of the conditional spectrum given the current queue size q.
inline CumVec cond_row(const ServiceState& s, std::uint64_t q, std::size_t i) {
    if (q < s.b) throw domain_error("cond_row: q below b");
    return std::visit(
        [&](const auto& k) -> CumVec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UniformBacklog>) {
                if (i == 0)
                    return CumVec({ExtNat(0), monus(ExtNat(q), ExtNat(k.bbar))}, ExtNat::inf());
                return shift_right(CumVec::epsilon(), i);
            } else if constexpr (std::is_same_v<T, UniformDelay>) {
                if (i == 0) {
                    std::vector<ExtNat> pre{ExtNat(0)};
                    for (std::size_t j = 1; j <= k.theta; ++j) pre.push_back(k.r.value(j));
                    pre.push_back(ExtNat(q - s.b) + k.r.value(k.theta + 1));
                    return CumVec(std::move(pre), ExtNat::inf());
                }
                return shift_right(CumVec::epsilon(), i + k.theta);
            } else if constexpr (std::is_same_v<T, TableService>) {
                return detail::table_cond_row(k, q, i);
            } else if constexpr (std::is_same_v<T, CumulativeMatrix>) {
                const SpectralMatrix sm = to_spectral(k, s.b);
                const ExtMatrix ch = cond_spectral(sm, q);
                return ch.row(i);
            } else {
                return dc_cond_row(k, q, i);
            }
        },
        s.kind);
}

// p-vector: p_j = min{lambdahat_0j, q}; p_1 is the slot's immediate obligation.
inline CumVec p_vector(const ServiceState& s, std::uint64_t q) {
    return min_of(cond_row(s, q, 0), CumVec::scaled_delta(q));
}

inline std::uint64_t immediate_obligation(const ServiceState& s, std::uint64_t q) {
    return min(cond_row(s, q, 0).value(1), ExtNat(q)).get();
}

// Dense spectrum / conditional spectrum over [0,g]^2 (for tests and hulls).
inline Spectrum spectrum_matrix(const ServiceState& s, std::size_t g) {
    ExtMatrix out(g);
    for (std::size_t i = 0; i <= g; ++i) {
        const CumVec row = lambda_row(s, i);
        for (std::size_t j = 0; j <= g; ++j) out(i, j) = row.value(j);
    }
    return out;
}

inline Spectrum cond_spectrum_matrix(const ServiceState& s, std::uint64_t q, std::size_t g) {
    ExtMatrix out(g);
    for (std::size_t i = 0; i <= g; ++i) {
        const CumVec row = cond_row(s, q, i);
        for (std::size_t j = 0; j <= g; ++j) out(i, j) = row.value(j);
    }
    return out;
}

// --- update -------------------------------------------------------------------

// State update: psidot(qdot) = R^{-1}(psi(q) - d*delta)^+ under the
// bijection q = R(qdot - bdot*delta) + q*delta, realized per kind in closed
// form (the table kind re-indexes and loses one slot of horizon).
inline ServiceState update(const ServiceState& s, std::uint64_t a, std::uint64_t d) {
    const std::uint64_t q = a + s.b;
    if (d > q) throw causality_error("update: d > q");
    const std::uint64_t p = immediate_obligation(s, q);
    if (d < p) throw guarantee_error("update: d below the immediate obligation");
    const std::uint64_t bdot = q - d;
    return std::visit(
        [&](const auto& k) -> ServiceState {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UniformBacklog>) {
                return ServiceState{k, bdot};
            } else if constexpr (std::is_same_v<T, UniformDelay>) {
                const CumVec target =
                    add(shift_right(CumVec::scaled_delta(q - s.b), k.theta), k.r);
                CumVec rdot = shift_left(monus_clamped(target, CumVec::scaled_delta(d)));
                return ServiceState{UniformDelay{k.theta, std::move(rdot)}, bdot};
            } else if constexpr (std::is_same_v<T, TableService>) {
                if (a > k.A) throw unknown_input_error("table update: a exceeds the universe bound");
                if (k.H < 2) throw domain_error("table update: horizon exhausted");
                TableService out{k.H - 1, k.A, {}};
                for (auto& key : table_keys(bdot, k.H - 1, k.A)) {
                    std::vector<std::uint64_t> old_key;
                    old_key.reserve(k.H);
                    old_key.push_back(q); // q_1 = q; q_{k+1} = qdot_k + d
                    for (std::size_t j = 0; j + 1 < k.H; ++j) old_key.push_back(key[j] + d);
                    auto it = k.entries.find(old_key);
                    if (it == k.entries.end())
                        throw inconsistent_state_error("table update: universe mismatch");
                    out.entries.emplace(
                        std::move(key),
                        shift_left(monus_clamped(it->second, CumVec::scaled_delta(d))));
                }
                return ServiceState{std::move(out), bdot};
            } else if constexpr (std::is_same_v<T, CumulativeMatrix>) {
                auto [m, nb] = mp_update(k, s.b, a, d);
                return ServiceState{std::move(m), nb};
            } else {
                return ServiceState{DualCurve{dc_update_u(k, q, d), k.v}, bdot};
            }
        },
        s.kind);
}

// --- performance bounds ----------------------------------------------------------

// (max backlog, max task delay) against the realized queued arrivals q, which
// must be finite-valued.
inline std::pair<ExtNat, ExtNat> perf_bounds(const ServiceState& s, const CumVec& q) {
    if (q.tail_inc().is_inf() || q.prefix().back().is_inf())
        throw domain_error("perf_bounds: q must be finite-valued");
    const CumVec psi = eval(s, q);
    const ExtNat backlog = monus_clamped(q, psi).limit();

    ExtNat delay(0);
    const ExtNat tq = q.tail_inc();
    const ExtNat tpsi = psi.tail_inc();
    std::uint64_t hmax;
    if (tq == ExtNat(0)) {
        hmax = q.limit().get();
    } else if (tpsi < tq) {
        return {backlog, ExtNat::inf()};
    } else { // equal positive slopes: delays become periodic in h with period tq
        const std::size_t lm = std::max(q.prefix_len(), psi.prefix_len());
        hmax = max(q.value(lm), psi.value(lm)).get() + tq.get();
    }
    for (std::uint64_t h = 1; h <= hmax; ++h) {
        const ExtNat td = tau(psi, h);
        if (td.is_inf()) return {backlog, ExtNat::inf()};
        delay = max(delay, monus(td, tau(q, h)));
    }
    return {backlog, delay};
}

// --- hulls ------------------------------------------------------------------------

// Per-flow maximum services sharing the given services' spectra, as finite
// spectral matrices. Exact when every spectrum row has stabilized by g.
inline std::vector<SpectralMatrix> spectral_hull(const std::vector<ServiceState>& flows,
                                                 std::size_t g) {
    std::vector<SpectralMatrix> out;
    out.reserve(flows.size());
    for (const ServiceState& s : flows) {
        ExtMatrix e(g);
        for (std::size_t i = 0; i <= g; ++i) {
            const CumVec row = lambda_row(s, i);
            if (row.tail_inc() != ExtNat(0) || row.prefix_len() > g + 1)
                throw representation_error("spectral_hull: spectrum not finite at this horizon");
            for (std::size_t j = 0; j <= g; ++j) e(i, j) = row.value(j);
        }
        out.emplace_back(std::move(e), s.b);
    }
    return out;
}

} // namespace wcs
