#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

#include "wcs/errors.hpp"

namespace wcs {

namespace detail {
inline std::atomic<bool> extnat_overflow_flag{false};
} // namespace detail

// Natural number extended with infinity. Arithmetic saturates: finite
// overflow lands on infinity and raises a process-wide diagnostic flag
// instead of wrapping. Infinity is absorbing for + and *, top for the order.
// Monus is truncated subtraction with inf - x = inf and x - inf = 0 for
// finite x; inf - inf is defined as 0.
class ExtNat {
public:
    constexpr ExtNat() = default;
    constexpr ExtNat(std::uint64_t v) : v_(v) {} // NOLINT: wants implicit promotion

    static constexpr ExtNat inf() { return ExtNat(kInf); }

    constexpr bool is_inf() const { return v_ == kInf; }
    constexpr bool is_finite() const { return v_ != kInf; }

    // Finite value; throws on infinity.
    constexpr std::uint64_t get() const {
        if (is_inf()) throw representation_error("ExtNat: finite value requested from inf");
        return v_;
    }
    constexpr std::uint64_t raw() const { return v_; }

    friend constexpr bool operator==(ExtNat a, ExtNat b) { return a.v_ == b.v_; }
    friend constexpr auto operator<=>(ExtNat a, ExtNat b) { return a.v_ <=> b.v_; }

    friend constexpr ExtNat operator+(ExtNat a, ExtNat b) {
        if (a.is_inf() || b.is_inf()) return inf();
        if (a.v_ > kInf - 1 - b.v_) {
            detail::extnat_overflow_flag.store(true, std::memory_order_relaxed);
            return inf();
        }
        return ExtNat(a.v_ + b.v_);
    }

    friend constexpr ExtNat operator*(ExtNat a, ExtNat b) {
        if (a.v_ == 0 || b.v_ == 0) return ExtNat(0);
        if (a.is_inf() || b.is_inf()) return inf();
        if (a.v_ > (kInf - 1) / b.v_) {
            detail::extnat_overflow_flag.store(true, std::memory_order_relaxed);
            return inf();
        }
        return ExtNat(a.v_ * b.v_);
    }

    // Truncated subtraction (a - b)^+.
    friend constexpr ExtNat monus(ExtNat a, ExtNat b) {
        if (b.is_inf()) return ExtNat(0);
        if (a.is_inf()) return inf();
        return ExtNat(a.v_ > b.v_ ? a.v_ - b.v_ : 0);
    }

    friend constexpr ExtNat min(ExtNat a, ExtNat b) { return a < b ? a : b; }
    friend constexpr ExtNat max(ExtNat a, ExtNat b) { return a < b ? b : a; }

    friend std::ostream& operator<<(std::ostream& os, ExtNat x) {
        if (x.is_inf()) return os << "inf";
        return os << x.v_;
    }

private:
    static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t v_ = 0;
};

inline bool extnat_overflow_flagged() {
    return detail::extnat_overflow_flag.load(std::memory_order_relaxed);
}
inline void clear_extnat_overflow_flag() {
    detail::extnat_overflow_flag.store(false, std::memory_order_relaxed);
}

} // namespace wcs
