#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "wcs/cumvec.hpp"
#include "wcs/matrix.hpp"
#include "wcs/service.hpp"

namespace wcs {

// Bounded enumeration universe: queued arrival vectors whose prefix has H free
// entries with per-slot increments at most A, constant afterwards.
struct EnumBounds {
    std::size_t H = 4;
    std::uint64_t A = 2;
};

inline std::vector<CumVec> enum_universe(std::uint64_t b, EnumBounds bounds) {
    std::vector<CumVec> out;
    for (const auto& key : table_keys(b, bounds.H, bounds.A)) out.push_back(key_to_q(key));
    return out;
}

inline std::vector<CumVec> enum_cond_universe(std::uint64_t q, EnumBounds bounds) {
    std::vector<CumVec> out;
    if (bounds.H == 1) {
        out.push_back(key_to_q({q}));
        return out;
    }
    for (const auto& rest : table_keys(q, bounds.H - 1, bounds.A)) {
        std::vector<std::uint64_t> key{q};
        key.insert(key.end(), rest.begin(), rest.end());
        out.push_back(key_to_q(key));
    }
    return out;
}

namespace detail {

// R^i epsilon + x*delta: x tasks queued now, an infinite burst i slots later.
inline CumVec burst(std::uint64_t x, std::size_t i) {
    std::vector<ExtNat> pre{ExtNat(0)};
    pre.insert(pre.end(), i, ExtNat(x));
    return CumVec(std::move(pre), ExtNat::inf());
}

} // namespace detail

struct OracleSpectrum {
    Spectrum lambda;
    // True when the maximizing q provably lies inside the enumerated set:
    // table services are total over it, and for min-plus and dual-curve kinds
    // the burst inputs R^i epsilon + b delta attain every spectral value.
    // Closed-form uniform-backlog/delay services have infinite spectral
    // values the bounded universe cannot reach.
    bool exact;
};

// Def-level spectrum: lambda_ij = max over enumerated q of (psi_j(q) - q_i)^+.
inline OracleSpectrum spectrum_oracle(const ServiceState& s, EnumBounds bounds, std::size_t g) {
    const bool table = s.is<TableService>();
    std::vector<CumVec> qs;
    if (table) {
        const auto& t = s.as<TableService>();
        qs = enum_universe(s.b, EnumBounds{t.H, t.A});
    } else {
        qs = enum_universe(s.b, bounds);
        for (std::size_t i = 0; i <= g + 1; ++i) qs.push_back(detail::burst(s.b, i));
    }
    ExtMatrix lam(g);
    for (const CumVec& q : qs) {
        const CumVec psi = eval(s, q);
        for (std::size_t i = 0; i <= g; ++i)
            for (std::size_t j = i + 1; j <= g; ++j)
                lam(i, j) = max(lam(i, j), monus(psi.value(j), q.value(i)));
    }
    const bool exact = table || s.is<CumulativeMatrix>() || s.is<DualCurve>();
    return {std::move(lam), exact};
}

// Conditional variant: q ranges over U|q (current queue size pinned).
inline OracleSpectrum cond_spectrum_oracle(const ServiceState& s, std::uint64_t q,
                                           EnumBounds bounds, std::size_t g) {
    const bool table = s.is<TableService>();
    std::vector<CumVec> qs;
    if (table) {
        const auto& t = s.as<TableService>();
        for (const auto& [key, psi] : t.entries)
            if (key[0] == q) qs.push_back(key_to_q(key));
        if (qs.empty()) throw unknown_input_error("cond_spectrum_oracle: q outside universe");
    } else {
        qs = enum_cond_universe(q, bounds);
        for (std::size_t i = 1; i <= g + 1; ++i) qs.push_back(detail::burst(q, i));
    }
    ExtMatrix lam(g);
    for (const CumVec& qq : qs) {
        const CumVec psi = eval(s, qq);
        for (std::size_t i = 0; i <= g; ++i)
            for (std::size_t j = i + 1; j <= g; ++j)
                lam(i, j) = max(lam(i, j), monus(psi.value(j), qq.value(i)));
    }
    const bool exact = table || s.is<CumulativeMatrix>() || s.is<DualCurve>();
    return {std::move(lam), exact};
}

// Least causal service dominating a table service:
//   psiC_j(q) = max over 0 < i <= j and q' agreeing with q up to i of psi_i(q').
inline ServiceState causal_closure(const ServiceState& s) {
    const auto& t = s.as<TableService>();
    TableService out{t.H, t.A, {}};
    for (const auto& [key, psi] : t.entries) {
        std::vector<ExtNat> c{ExtNat(0)};
        for (std::size_t j = 1; j <= t.H; ++j) {
            ExtNat best = c.back();
            for (const auto& [key2, psi2] : t.entries) {
                if (!std::equal(key.begin(), key.begin() + j, key2.begin())) continue;
                best = max(best, psi2.value(j));
            }
            c.push_back(best);
        }
        out.entries.emplace(key, max_of(CumVec(std::move(c), ExtNat(0)), psi));
    }
    return make_table(std::move(out), s.b);
}

// psi_j(q) depends on q_1..q_j alone, checked over the enumerated universe.
inline bool is_causal_oracle(const ServiceState& s, EnumBounds bounds) {
    std::vector<CumVec> qs;
    if (s.is<TableService>()) {
        const auto& t = s.as<TableService>();
        bounds = EnumBounds{t.H, t.A};
        qs = enum_universe(s.b, bounds);
    } else {
        qs = enum_universe(s.b, bounds);
    }
    for (const CumVec& q1 : qs)
        for (const CumVec& q2 : qs) {
            const CumVec p1 = eval(s, q1);
            const CumVec p2 = eval(s, q2);
            for (std::size_t j = 1; j <= bounds.H; ++j) {
                bool agree = true;
                for (std::size_t k = 1; k <= j; ++k)
                    if (q1.value(k) != q2.value(k)) { agree = false; break; }
                if (!agree) break;
                if (p1.value(j) != p2.value(j)) return false;
            }
        }
    return true;
}

// min{psi(q), h} agrees whenever min{q, h} agrees (static worst-case deadlines).
inline bool is_deadline_rigid_oracle(const ServiceState& s, EnumBounds bounds) {
    std::vector<CumVec> qs;
    if (s.is<TableService>()) {
        const auto& t = s.as<TableService>();
        bounds = EnumBounds{t.H, t.A};
    }
    qs = enum_universe(s.b, bounds);
    std::uint64_t hmax = s.b + bounds.H * bounds.A + 1;
    for (const CumVec& q1 : qs)
        for (const CumVec& q2 : qs) {
            const CumVec p1 = eval(s, q1);
            const CumVec p2 = eval(s, q2);
            for (std::uint64_t h = 1; h <= hmax; ++h) {
                const CumVec hd = CumVec::scaled_delta(h);
                if (!(min_of(q1, hd) == min_of(q2, hd))) continue;
                if (!(min_of(p1, hd) == min_of(p2, hd))) return false;
            }
        }
    return true;
}

// q >= q' implies psi(q) >= psi(q'), over the enumerated universe.
inline bool is_monotone_oracle(const ServiceState& s, EnumBounds bounds) {
    std::vector<CumVec> qs;
    if (s.is<TableService>()) {
        const auto& t = s.as<TableService>();
        bounds = EnumBounds{t.H, t.A};
    }
    qs = enum_universe(s.b, bounds);
    for (const CumVec& q1 : qs)
        for (const CumVec& q2 : qs) {
            if (!leq(q2, q1)) continue;
            if (!leq(eval(s, q2), eval(s, q1))) return false;
        }
    return true;
}

// Table of the tandem composition psiII * psiI over the bounded universe:
//   psi(q) = psiII(psiI(q - bII delta) + bII delta), with b = bI + bII.
inline ServiceState compose_tandem_oracle(const ServiceState& sii, const ServiceState& si,
                                          EnumBounds bounds) {
    if (!is_monotone_oracle(si, bounds) || !is_monotone_oracle(sii, bounds))
        throw domain_error("compose_tandem_oracle: inputs must be monotone");
    const std::uint64_t b = si.b + sii.b;
    const CumVec biid = CumVec::scaled_delta(sii.b);
    return table_from_fn(b, bounds.H, bounds.A, [&](const CumVec& q) {
        return eval(sii, add(eval(si, monus_clamped(q, biid)), biid));
    });
}

} // namespace wcs
