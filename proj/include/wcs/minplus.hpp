#pragma once

#include <cstdint>
#include <utility>

#include "wcs/cumvec.hpp"
#include "wcs/errors.hpp"
#include "wcs/matrix.hpp"

namespace wcs {

// psi_j = min over i <= j of (q_i + m_ij); constant past column g.
inline CumVec mat_eval(const ExtMatrix& m, const CumVec& q) {
    std::vector<ExtNat> pre;
    pre.reserve(m.g() + 1);
    for (std::size_t j = 0; j <= m.g(); ++j) {
        ExtNat best = ExtNat::inf();
        for (std::size_t i = 0; i <= j; ++i) best = min(best, q.value(i) + m.at(i, j));
        pre.push_back(best);
    }
    return CumVec(std::move(pre), ExtNat(0));
}

inline CumVec mp_eval(const CumulativeMatrix& m, const CumVec& q) { return mat_eval(m.m, q); }
inline CumVec mp_eval(const SpectralMatrix& s, const CumVec& q) { return mat_eval(s.s, q); }

// s_ij = min{(m_0j - b*delta_i)^+, min_{k<=i} m_kj}; identifies the same
// service and satisfies the spectral-matrix invariants.
inline SpectralMatrix to_spectral(const CumulativeMatrix& m, std::uint64_t b) {
    const std::size_t g = m.g();
    ExtMatrix s(g);
    for (std::size_t j = 0; j <= g; ++j) {
        ExtNat colmin = ExtNat::inf();
        for (std::size_t i = 0; i <= g; ++i) {
            colmin = min(colmin, m.m(i, j));
            const ExtNat cap = monus(m.m(0, j), i >= 1 ? ExtNat(b) : ExtNat(0));
            s(i, j) = min(cap, colmin);
        }
    }
    return SpectralMatrix(std::move(s), b);
}

// Conditional spectrum given the current queue size q:
//   shat_0j = min{s_0j, q + s_1j},  shat_ij = min{(s_0j - q)^+, s_ij} (i > 0).
inline ExtMatrix cond_spectral(const SpectralMatrix& sm, std::uint64_t q) {
    const std::size_t g = sm.g();
    ExtMatrix out(g);
    for (std::size_t j = 0; j <= g; ++j) {
        out(0, j) = min(sm.s(0, j), ExtNat(q) + sm.s.at(1, j));
        for (std::size_t i = 1; i <= g; ++i)
            out(i, j) = min(monus(sm.s(0, j), ExtNat(q)), sm.s(i, j));
    }
    return out;
}

// State update under a arrivals and d departures (q = a + b):
//   mdot_0j = (min{m_{0,j+1}, q + m_{1,j+1}} - d)^+,  mdot_ij = m_{i+1,j+1}.
// Requires q >= d >= p with p = min{m_01, q}.
inline std::pair<CumulativeMatrix, std::uint64_t> mp_update(const CumulativeMatrix& m,
                                                            std::uint64_t b, std::uint64_t a,
                                                            std::uint64_t d) {
    const std::uint64_t q = a + b;
    if (d > q) throw causality_error("mp_update: d > q");
    const ExtNat p = min(m.m.at(0, 1), ExtNat(q));
    if (ExtNat(d) < p) throw guarantee_error("mp_update: d below the immediate obligation");
    const std::size_t g = m.g();
    ExtMatrix out(g);
    for (std::size_t j = 0; j <= g; ++j) {
        out(0, j) = monus(min(m.m.at(0, j + 1), ExtNat(q) + m.m.at(1, j + 1)), ExtNat(d));
        for (std::size_t i = 1; i <= g; ++i) out(i, j) = m.m.at(i + 1, j + 1);
    }
    return {CumulativeMatrix(std::move(out)), q - d};
}

// Spectral-form update, stated directly on s; the cumulative path followed by
// to_spectral must produce the same matrix.
inline SpectralMatrix sp_update(const SpectralMatrix& sm, std::uint64_t a, std::uint64_t d) {
    const std::uint64_t q = a + sm.b;
    if (d > q) throw causality_error("sp_update: d > q");
    const ExtNat p = min(sm.s.at(0, 1), ExtNat(q));
    if (ExtNat(d) < p) throw guarantee_error("sp_update: d below the immediate obligation");
    const std::size_t g = sm.g();
    ExtMatrix out(g);
    for (std::size_t j = 0; j <= g; ++j) {
        out(0, j) = monus(min(sm.s.at(0, j + 1), ExtNat(q) + sm.s.at(1, j + 1)), ExtNat(d));
        for (std::size_t i = 1; i <= g; ++i)
            out(i, j) = min(monus(sm.s.at(0, j + 1), ExtNat(q)), sm.s.at(i + 1, j + 1));
    }
    return SpectralMatrix(std::move(out), q - d);
}

// Tandem composition M = (M_I + b_II * Delta) (x) M_II, where Delta has ones
// in row 0 above the diagonal. Result is cumulative but not spectral in
// general; convert on demand.
inline CumulativeMatrix mp_compose(const CumulativeMatrix& mi, const CumulativeMatrix& mii,
                                   std::uint64_t bii) {
    if (mi.g() != mii.g())
        throw domain_error("mp_compose: matrices must share the same horizon");
    const std::size_t g = mi.g();
    ExtMatrix out(g);
    for (std::size_t i = 0; i <= g; ++i)
        for (std::size_t j = 0; j <= g; ++j) {
            ExtNat best = ExtNat::inf();
            for (std::size_t k = 0; k <= g; ++k) {
                ExtNat left = mi.m(i, k);
                if (i == 0 && k > 0) left = left + ExtNat(bii);
                best = min(best, left + mii.m(k, j));
            }
            out(i, j) = best;
        }
    return CumulativeMatrix(std::move(out));
}

} // namespace wcs
