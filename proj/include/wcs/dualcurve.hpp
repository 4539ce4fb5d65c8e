#pragma once

#include <cstdint>

#include "wcs/cumvec.hpp"
#include "wcs/errors.hpp"
#include "wcs/matrix.hpp"
#include "wcs/minplus.hpp"

namespace wcs {

// Min-plus service compressed to a pair of curves: u is row 0 of the matrix
// (dynamic, updated each slot), v fills every lower row by offset (static).
struct DualCurve {
    CumVec u;
    CumVec v;

    bool operator==(const DualCurve&) const = default;
};

// u_inf and v_inf both infinite; preserved by updates.
inline bool non_degenerate(const DualCurve& dc) {
    return dc.u.limit().is_inf() && dc.v.limit().is_inf();
}

// psi_j = min{u_j, min over 0 < i <= j of (q_i + v_{j-i})}.
inline CumVec dc_eval(const DualCurve& dc, const CumVec& q) {
    const CumVec& u = dc.u;
    const CumVec& v = dc.v;
    const std::size_t lv = v.prefix_len();
    const std::size_t lqb = std::max<std::size_t>(q.prefix_len() - 1, 1);
    std::vector<detail::Ray> rays;
    rays.reserve(1 + lqb + lv);
    rays.push_back(detail::tail_ray(u));
    for (std::size_t i = 1; i <= lqb; ++i) {
        const std::size_t start = i + lv - 1;
        rays.push_back({start, q.value(i) + v.value(start - i), v.tail_inc()});
    }
    for (std::size_t k = 0; k < lv; ++k) {
        const std::size_t start = lqb + k;
        rays.push_back({start, q.value(start - k) + v.value(k), q.tail_inc()});
    }
    auto eval = [&](std::size_t j) {
        ExtNat best = u.value(j);
        for (std::size_t i = 1; i <= std::min(j, lqb); ++i)
            best = min(best, q.value(i) + v.value(j - i));
        if (j >= 1)
            for (std::size_t k = 0; k <= std::min(lv - 1, j - 1); ++k)
                best = min(best, q.value(j - k) + v.value(k));
        return best;
    };
    return detail::envelope_min(rays, eval);
}

// udot = R^{-1}(min{u, q*delta + R v} - d*delta)^+; v is static. Requires
// q >= d >= p with p = min{u_1, q}.
inline CumVec dc_update_u(const DualCurve& dc, std::uint64_t q, std::uint64_t d) {
    if (d > q) throw causality_error("dc_update_u: d > q");
    const ExtNat p = min(dc.u.value(1), ExtNat(q));
    if (ExtNat(d) < p) throw guarantee_error("dc_update_u: d below the immediate obligation");
    const CumVec capped = min_of(dc.u, add(CumVec::scaled_delta(q), shift_right(dc.v)));
    return shift_left(monus_clamped(capped, CumVec::scaled_delta(d)));
}

// Tandem composition of two dual-curve services:
//   u_j = min{min over 0 < i <= j of (uI_i + bII + vII_{j-i}), uII_j}
//   v   = vI (x) vII  (min-plus convolution)
inline DualCurve dc_compose(const DualCurve& dci, const DualCurve& dcii, std::uint64_t bii) {
    // The u-formula is dc_eval of (uII, vII) at the queued vector uI + bII*delta.
    const CumVec x = add(dci.u, CumVec::scaled_delta(bii));
    return DualCurve{dc_eval(dcii, x), minplus_conv(dci.v, dcii.v)};
}

// Matrix expansion: m_0j = u_j, m_ij = v_{(j-i)^+} for i > 0. Exact on
// columns 0..g; the expansion is a finite service even though the pair is not.
inline CumulativeMatrix dc_to_matrix(const DualCurve& dc, std::size_t g) {
    ExtMatrix m(g);
    for (std::size_t j = 1; j <= g; ++j) {
        m(0, j) = dc.u.value(j);
        for (std::size_t i = 1; i < j; ++i) m(i, j) = dc.v.value(j - i);
    }
    return CumulativeMatrix(std::move(m));
}

// Dual-curve hull of a spectral matrix: u_j = s_0j, v_j = max over i > 0 of
// s_{i,i+j}. Dominates the min-plus service identified by s.
inline DualCurve hull_from_spectral(const SpectralMatrix& sm) {
    const std::size_t g = sm.g();
    std::vector<ExtNat> u, v;
    u.reserve(g + 1);
    v.reserve(g + 1);
    for (std::size_t j = 0; j <= g; ++j) u.push_back(sm.s(0, j));
    for (std::size_t k = 0; k <= g; ++k) {
        ExtNat best(0);
        for (std::size_t i = 1; i <= g; ++i) best = max(best, sm.s.at(i, i + k));
        v.push_back(best);
    }
    return DualCurve{CumVec(std::move(u), ExtNat(0)), CumVec(std::move(v), ExtNat(0))};
}

// Spectrum rows (lambda_0j = u_j; lambda_ij = min{(u_j - b)^+, v_{(j-i)^+}}).
inline CumVec dc_lambda_row(const DualCurve& dc, std::uint64_t b, std::size_t i) {
    if (i == 0) return dc.u;
    return min_of(monus_clamped(dc.u, CumVec::scaled_delta(b)), shift_right(dc.v, i));
}

// sup over i >= 1 of lambda_{i,i+k} = min{(u_inf - b)^+, v_k}.
inline CumVec dc_diag_limit(const DualCurve& dc, std::uint64_t b) {
    return min_of(dc.v, CumVec::scaled_delta(monus(dc.u.limit(), ExtNat(b))));
}

// Conditional spectrum rows given the current queue size q.
inline CumVec dc_cond_row(const DualCurve& dc, std::uint64_t q, std::size_t i) {
    if (i == 0) return min_of(dc.u, add(CumVec::scaled_delta(q), shift_right(dc.v)));
    return min_of(monus_clamped(dc.u, CumVec::scaled_delta(q)), shift_right(dc.v, i));
}

} // namespace wcs
