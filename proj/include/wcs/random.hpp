#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wcs/polymatroid.hpp"
#include "wcs/scheduler.hpp"
#include "wcs/service.hpp"

namespace wcs {

struct Rng {
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    std::uint64_t in(std::uint64_t lo, std::uint64_t hi) { // inclusive
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(eng);
    }
    std::uint64_t below(std::uint64_t n) { return in(0, n - 1); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(eng); }
    std::mt19937_64 eng;
};

inline CumVec random_cumvec(Rng& rng, std::size_t max_len, std::uint64_t max_inc,
                            bool allow_inf_tail = false) {
    const std::size_t len = 1 + rng.below(max_len);
    std::vector<ExtNat> pre{ExtNat(0)};
    for (std::size_t j = 1; j < len; ++j) pre.push_back(pre.back() + ExtNat(rng.in(0, max_inc)));
    ExtNat tail(rng.in(0, max_inc));
    if (allow_inf_tail && rng.coin(0.15)) tail = ExtNat::inf();
    return CumVec(std::move(pre), tail);
}

inline CumulativeMatrix random_cumulative_matrix(Rng& rng, std::size_t g,
                                                 std::uint64_t max_step = 3) {
    ExtMatrix m(g);
    for (std::size_t i = 0; i <= g; ++i) {
        ExtNat run(0);
        for (std::size_t j = i + 1; j <= g; ++j) {
            run = run + ExtNat(rng.in(0, max_step));
            m(i, j) = run;
        }
    }
    return CumulativeMatrix(std::move(m));
}

inline SpectralMatrix random_spectral_matrix(Rng& rng, std::size_t g, std::uint64_t b,
                                             std::uint64_t max_step = 3) {
    return to_spectral(random_cumulative_matrix(rng, g, max_step), b);
}

inline ServiceState random_table_service(Rng& rng, std::uint64_t b, std::size_t H,
                                         std::uint64_t A) {
    return table_from_fn(b, H, A, [&](const CumVec& q) {
        std::vector<ExtNat> pre{ExtNat(0)};
        for (std::size_t j = 1; j <= H; ++j) {
            const ExtNat v = pre.back() + ExtNat(rng.in(0, 2));
            pre.push_back(min(max(v, pre.back()), q.value(j)));
        }
        return CumVec(std::move(pre), ExtNat(0));
    });
}

// Random supermodular set function: chi(G) = max over a few modular functions
// of (w_k^<G> - slack_k)^+, rejecting non-supermodular draws. A single
// clamped modular function is supermodular outright and serves as the
// fallback when rejection runs long.
inline SetFn random_supermodular(Rng& rng, std::size_t n, std::uint64_t max_w = 4,
                                 std::uint64_t max_slack = 3) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        const std::size_t k = attempt < 48 && rng.coin() ? 2 : 1;
        std::vector<std::vector<std::uint64_t>> w(k, std::vector<std::uint64_t>(n));
        std::vector<std::uint64_t> slack(k);
        for (std::size_t t = 0; t < k; ++t) {
            for (std::size_t i = 0; i < n; ++i) w[t][i] = rng.in(0, max_w);
            slack[t] = t == 0 ? 0 : rng.in(0, max_slack);
        }
        SetFn chi = SetFn::from_fn(n, [&](std::uint32_t m) {
            std::uint64_t best = 0;
            for (std::size_t t = 0; t < k; ++t) {
                std::uint64_t sum = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (m & (std::uint32_t(1) << i)) sum += w[t][i];
                best = std::max(best, sum > slack[t] ? sum - slack[t] : 0);
            }
            return best;
        });
        if (is_supermodular(chi)) return chi;
    }
    throw inconsistent_state_error("random_supermodular: rejection sampling failed");
}

// Latency-then-rate curve: zero for latency slots, then the given slope.
inline CumVec rate_latency(std::uint64_t rate, std::size_t latency) {
    return shift_right(CumVec::rate(rate), latency);
}

// Schedulable-by-construction dual-curve system: per-flow static curves whose
// rates split the capacity, with u at or below v and small random backlogs.
inline System random_schedulable_system(Rng& rng, std::size_t n, std::uint64_t max_c = 4,
                                        std::size_t max_latency = 3) {
    System sys;
    sys.capacity = rng.in(std::uint64_t(n), max_c < n ? n : max_c);
    sys.horizon = 64;
    std::vector<std::uint64_t> rates(n, 1);
    std::uint64_t left = sys.capacity - n;
    for (std::size_t w = 0; w < n && left > 0; ++w) {
        const std::uint64_t extra = rng.in(0, left);
        rates[w] += extra;
        left -= extra;
    }
    for (std::size_t w = 0; w < n; ++w) {
        const CumVec v = rate_latency(rates[w], rng.below(max_latency + 1));
        CumVec u = v;
        if (rng.coin(0.3)) u = min_of(u, rate_latency(rates[w], rng.below(max_latency + 2)));
        const std::uint64_t b = rng.below(3);
        sys.flows.push_back({"f" + std::to_string(w), make_dual_curve(DualCurve{u, v}, b)});
    }
    return sys;
}

inline std::vector<std::uint64_t> random_arrivals(Rng& rng, std::size_t n, std::uint64_t amax) {
    std::vector<std::uint64_t> a(n);
    for (auto& v : a) v = rng.in(0, amax);
    return a;
}

} // namespace wcs
