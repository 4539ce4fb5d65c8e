#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "wcs/errors.hpp"
#include "wcs/extnat.hpp"

namespace wcs {

// Eventually-affine cumulative vector: a finite prefix [x_0 .. x_{L-1}] plus a
// constant per-slot tail increment, so that x_j = x_{L-1} + (j-L+1)*tail for
// j >= L. Invariants: x_0 = 0 and x_j <= x_{j+1}. The representation is kept
// canonical (maximally compressed, and an infinite last prefix entry forces an
// infinite tail), so equality of values is equality of representations.
//
// The class is closed under every operation used here: shifts, pointwise
// min/max/add, clamped monus, and min-plus convolution. Each operation
// computes the exact stabilization index of its result, so suprema over all
// slot offsets reduce to a prefix scan plus a slope comparison.
class CumVec {
public:
    CumVec() : prefix_{ExtNat(0)}, tail_(0) {}

    CumVec(std::vector<ExtNat> prefix, ExtNat tail_inc)
        : prefix_(std::move(prefix)), tail_(tail_inc) {
        if (prefix_.empty()) throw representation_error("CumVec: empty prefix");
        if (prefix_.front() != ExtNat(0)) throw representation_error("CumVec: x_0 must be 0");
        for (std::size_t j = 1; j < prefix_.size(); ++j)
            if (prefix_[j] < prefix_[j - 1])
                throw representation_error("CumVec: prefix must be non-decreasing");
        canonicalize();
    }

    static CumVec zero() { return CumVec(); }
    // delta = [0,1,1,...]
    static CumVec delta() { return CumVec({ExtNat(0), ExtNat(1)}, ExtNat(0)); }
    // epsilon = [0,inf,inf,...], an infinite burst at slot offset 0
    static CumVec epsilon() { return CumVec({ExtNat(0)}, ExtNat::inf()); }
    // [0, r, 2r, ...]
    static CumVec rate(ExtNat r) { return CumVec({ExtNat(0)}, r); }
    // k*delta = [0,k,k,...]
    static CumVec scaled_delta(ExtNat k) { return CumVec({ExtNat(0), k}, ExtNat(0)); }

    ExtNat value(std::size_t j) const {
        if (j < prefix_.size()) return prefix_[j];
        return prefix_.back() + ExtNat(std::uint64_t(j - prefix_.size() + 1)) * tail_;
    }

    // sup_j x_j; infinite iff the vector is unbounded.
    ExtNat limit() const { return tail_ == ExtNat(0) ? prefix_.back() : ExtNat::inf(); }

    std::size_t prefix_len() const { return prefix_.size(); }
    const std::vector<ExtNat>& prefix() const { return prefix_; }
    ExtNat tail_inc() const { return tail_; }

    bool operator==(const CumVec&) const = default;

    std::vector<ExtNat> values(std::size_t upto) const {
        std::vector<ExtNat> out;
        out.reserve(upto + 1);
        for (std::size_t j = 0; j <= upto; ++j) out.push_back(value(j));
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const CumVec& x) {
        os << "[";
        for (std::size_t j = 0; j < x.prefix_.size(); ++j) {
            if (j) os << ",";
            os << x.prefix_[j];
        }
        return os << "|+" << x.tail_ << "]";
    }

private:
    void canonicalize() {
        if (prefix_.back().is_inf()) tail_ = ExtNat::inf();
        while (prefix_.size() >= 2 &&
               prefix_[prefix_.size() - 1] == prefix_[prefix_.size() - 2] + tail_)
            prefix_.pop_back();
    }

    std::vector<ExtNat> prefix_;
    ExtNat tail_;
};

namespace detail {

using i128 = __int128;

inline i128 ceil_div_pos(i128 a, i128 b) { // b > 0; result >= 0
    if (a <= 0) return 0;
    return (a + b - 1) / b;
}

constexpr std::size_t kMaxPrefix = std::size_t(1) << 20;

inline void check_prefix_budget(std::size_t len) {
    if (len > kMaxPrefix)
        throw representation_error("CumVec: result prefix exceeds the size guard");
}

// An affine lower-bound candidate: value base + (j-start)*slope for j >= start.
struct Ray {
    std::size_t start;
    ExtNat base;
    ExtNat slope;
};

// Builds the CumVec whose value at j is eval(j), given that beyond every ray
// start the function equals the pointwise minimum of the rays. Determines the
// exact index past which the result is affine.
template <class Eval>
CumVec envelope_min(const std::vector<Ray>& rays, Eval&& eval) {
    std::size_t max_start = 0;
    for (const Ray& r : rays) max_start = std::max(max_start, r.start);

    ExtNat tstar = ExtNat::inf();
    for (const Ray& r : rays)
        if (r.base.is_finite() && r.slope.is_finite()) tstar = min(tstar, r.slope);

    std::size_t stab = max_start;
    if (tstar.is_finite()) {
        const std::size_t j0 = max_start;
        auto val_at_j0 = [&](const Ray& r) -> i128 {
            return i128(r.base.get()) + i128(j0 - r.start) * i128(r.slope.get());
        };
        bool have_winner = false;
        i128 wv = 0;
        for (const Ray& r : rays) {
            if (r.base.is_inf() || r.slope != tstar) continue;
            i128 v = val_at_j0(r);
            if (!have_winner || v < wv) {
                wv = v;
                have_winner = true;
            }
        }
        for (const Ray& r : rays) {
            if (r.base.is_inf() || r.slope.is_inf() || r.slope == tstar) continue;
            i128 mv = val_at_j0(r);
            if (mv < wv) {
                i128 k = ceil_div_pos(wv - mv, i128(r.slope.get()) - i128(tstar.get()));
                stab = std::max<std::size_t>(stab, j0 + std::size_t(k));
            }
        }
    }

    check_prefix_budget(stab + 2);
    std::vector<ExtNat> pre;
    pre.reserve(stab + 2);
    for (std::size_t j = 0; j <= stab + 1; ++j) pre.push_back(eval(j));
    return CumVec(std::move(pre), tstar);
}

inline Ray tail_ray(const CumVec& x) {
    return Ray{x.prefix_len() - 1, x.prefix().back(), x.tail_inc()};
}

} // namespace detail

// --- shifts ------------------------------------------------------------

// [R x]_{j+1} = x_j, [R x]_0 = 0.
inline CumVec shift_right(const CumVec& x, std::size_t n = 1) {
    if (n == 0) return x;
    detail::check_prefix_budget(x.prefix_len() + n);
    std::vector<ExtNat> pre(n, ExtNat(0));
    pre.insert(pre.end(), x.prefix().begin(), x.prefix().end());
    return CumVec(std::move(pre), x.tail_inc());
}

// [R^{-1} x]_j = x_{j+1}; requires x_1 = 0 (domain U|0) at every step.
inline CumVec shift_left(const CumVec& x, std::size_t n = 1) {
    CumVec cur = x;
    for (std::size_t s = 0; s < n; ++s) {
        if (cur.value(1) != ExtNat(0))
            throw domain_error("shift_left: x_1 > 0, vector not in U|0");
        if (cur.prefix_len() == 1) continue; // [0] with tail 0: fixed point
        std::vector<ExtNat> pre(cur.prefix().begin() + 1, cur.prefix().end());
        cur = CumVec(std::move(pre), cur.tail_inc());
    }
    return cur;
}

// --- tau ---------------------------------------------------------------

// Largest j with x_j < h (inf if x stays below h forever). Requires h >= 1.
inline ExtNat tau(const CumVec& x, std::uint64_t h) {
    if (h == 0) throw domain_error("tau: h must be >= 1");
    const ExtNat hh(h);
    for (std::size_t j = 0; j < x.prefix_len(); ++j)
        if (!(x.value(j) < hh)) return ExtNat(std::uint64_t(j - 1)); // j >= 1 since x_0 = 0 < h
    // whole prefix below h
    const ExtNat t = x.tail_inc();
    const std::size_t last = x.prefix_len() - 1;
    if (t == ExtNat(0)) return ExtNat::inf();
    if (t.is_inf()) return ExtNat(std::uint64_t(last));
    const std::uint64_t back = x.prefix().back().get();
    const std::uint64_t k = (h - back + t.get() - 1) / t.get(); // smallest k with back + k*t >= h
    return ExtNat(std::uint64_t(last + k - 1));
}

// --- pointwise combinations ---------------------------------------------

inline CumVec add(const CumVec& x, const CumVec& y) {
    const std::size_t L = std::max(x.prefix_len(), y.prefix_len());
    std::vector<ExtNat> pre;
    pre.reserve(L + 1);
    for (std::size_t j = 0; j <= L; ++j) pre.push_back(x.value(j) + y.value(j));
    return CumVec(std::move(pre), x.tail_inc() + y.tail_inc());
}

inline CumVec min_of(const CumVec& x, const CumVec& y) {
    return detail::envelope_min(
        {detail::tail_ray(x), detail::tail_ray(y)},
        [&](std::size_t j) { return min(x.value(j), y.value(j)); });
}

inline CumVec max_of(const CumVec& x, const CumVec& y) {
    using detail::i128;
    const std::size_t j0 = std::max(x.prefix_len(), y.prefix_len()) - 1;
    const ExtNat vx = x.value(j0), vy = y.value(j0);
    const ExtNat tx = x.tail_inc(), ty = y.tail_inc();
    std::size_t stab;
    ExtNat tail;
    if (vx.is_inf() || vy.is_inf() || tx.is_inf() || ty.is_inf()) {
        stab = j0 + 1;
        tail = ExtNat::inf();
    } else if (tx == ty) {
        stab = j0;
        tail = tx;
    } else {
        const bool xw = tx > ty;
        const i128 wv = xw ? i128(vx.get()) : i128(vy.get());
        const i128 lv = xw ? i128(vy.get()) : i128(vx.get());
        const i128 dt = xw ? i128(tx.get()) - i128(ty.get()) : i128(ty.get()) - i128(tx.get());
        stab = j0 + std::size_t(detail::ceil_div_pos(lv - wv, dt));
        tail = xw ? tx : ty;
    }
    detail::check_prefix_budget(stab + 2);
    std::vector<ExtNat> pre;
    pre.reserve(stab + 2);
    for (std::size_t j = 0; j <= stab + 1; ++j) pre.push_back(max(x.value(j), y.value(j)));
    return CumVec(std::move(pre), tail);
}

// Pointwise (x_j - y_j)^+ followed by a running max, which re-imposes
// monotonicity when x does not dominate y. Errors when both vectors reach
// literal infinity (inf - inf has no eventually-affine meaning).
inline CumVec monus_clamped(const CumVec& x, const CumVec& y) {
    using detail::i128;
    const std::size_t L = std::max(x.prefix_len(), y.prefix_len());
    const bool x_inf = x.tail_inc().is_inf();
    const bool y_inf = y.tail_inc().is_inf();
    std::size_t stab;
    ExtNat tail;
    if (x_inf && y_inf) {
        throw representation_error("monus_clamped: mismatched infinite tails");
    } else if (x_inf) {
        stab = L;
        tail = ExtNat::inf();
    } else if (y_inf) {
        stab = L;
        tail = ExtNat(0);
    } else {
        const ExtNat tx = x.tail_inc(), ty = y.tail_inc();
        if (tx <= ty) {
            stab = L;
            tail = ExtNat(0);
        } else {
            const std::size_t j0 = L - 1;
            i128 m = 0;
            for (std::size_t j = 0; j <= j0; ++j) {
                i128 d = i128(x.value(j).get()) - i128(y.value(j).get());
                m = std::max(m, d);
            }
            const i128 d0 = i128(x.value(j0).get()) - i128(y.value(j0).get());
            const i128 dt = i128(tx.get()) - i128(ty.get());
            stab = j0 + std::size_t(detail::ceil_div_pos(m - d0, dt));
            tail = ExtNat(tx.get() - ty.get());
        }
    }
    detail::check_prefix_budget(stab + 2);
    std::vector<ExtNat> pre;
    pre.reserve(stab + 2);
    ExtNat run(0);
    for (std::size_t j = 0; j <= stab + 1; ++j) {
        run = max(run, monus(x.value(j), y.value(j)));
        pre.push_back(run);
    }
    return CumVec(std::move(pre), tail);
}

// --- min-plus convolution ------------------------------------------------

// z_j = min over 0 <= i <= j of x_i + y_{j-i}.
inline CumVec minplus_conv(const CumVec& x, const CumVec& y) {
    const std::size_t lx = x.prefix_len(), ly = y.prefix_len();
    std::vector<detail::Ray> rays;
    rays.reserve(lx + ly);
    for (std::size_t i = 0; i < lx; ++i) {
        const std::size_t start = i + ly - 1;
        rays.push_back({start, x.value(i) + y.value(start - i), y.tail_inc()});
    }
    for (std::size_t k = 0; k < ly; ++k) {
        const std::size_t start = lx - 1 + k;
        rays.push_back({start, x.value(start - k) + y.value(k), x.tail_inc()});
    }
    auto eval = [&](std::size_t j) {
        ExtNat best = ExtNat::inf();
        for (std::size_t i = 0; i <= std::min(j, lx - 1); ++i)
            best = min(best, x.value(i) + y.value(j - i));
        for (std::size_t k = 0; k <= std::min(j, ly - 1); ++k)
            best = min(best, x.value(j - k) + y.value(k));
        return best;
    };
    return detail::envelope_min(rays, eval);
}

// --- order ---------------------------------------------------------------

// Smallest j with x_j > y_j, if any.
inline std::optional<std::size_t> first_violation(const CumVec& x, const CumVec& y) {
    using detail::i128;
    const std::size_t L = std::max(x.prefix_len(), y.prefix_len());
    for (std::size_t j = 0; j <= L; ++j)
        if (x.value(j) > y.value(j)) return j;
    const ExtNat tx = x.tail_inc(), ty = y.tail_inc();
    if (tx <= ty) return std::nullopt;
    // tx > ty implies ty finite; canonical form then keeps both L-values finite.
    if (tx.is_inf()) return L + 1;
    const i128 gap = i128(y.value(L).get()) - i128(x.value(L).get());
    const i128 k = gap / (i128(tx.get()) - i128(ty.get())) + 1;
    return L + std::size_t(k);
}

// x_j <= y_j for all j.
inline bool leq(const CumVec& x, const CumVec& y) { return !first_violation(x, y).has_value(); }

inline CumVec sum_of(const std::vector<CumVec>& xs) {
    CumVec acc = CumVec::zero();
    for (const CumVec& x : xs) acc = add(acc, x);
    return acc;
}

inline std::string to_string(const CumVec& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

} // namespace wcs
