#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "wcs/errors.hpp"

namespace wcs {

using Rat = boost::rational<long long>;

// Set function over flows {0..n-1}, subsets encoded as bitmasks. The values
// of interest here (baseline functions) are finite naturals.
class SetFn {
public:
    SetFn(std::size_t n, std::vector<std::uint64_t> table) : n_(n), v_(std::move(table)) {
        if (n_ > 16) throw resource_error("SetFn: n > 16");
        if (v_.size() != (std::size_t(1) << n_)) throw domain_error("SetFn: table size != 2^n");
        if (v_[0] != 0) throw domain_error("SetFn: chi(empty) != 0");
    }

    template <class Fn>
    static SetFn from_fn(std::size_t n, Fn&& f) {
        std::vector<std::uint64_t> t(std::size_t(1) << n);
        for (std::uint32_t m = 1; m < t.size(); ++m) t[m] = f(m);
        return SetFn(n, std::move(t));
    }

    std::size_t n() const { return n_; }
    std::uint32_t full_mask() const { return (std::uint32_t(1) << n_) - 1; }
    std::uint64_t operator()(std::uint32_t mask) const { return v_[mask]; }

    bool operator==(const SetFn&) const = default;

private:
    std::size_t n_;
    std::vector<std::uint64_t> v_;
};

// chi(G) + chi(G') <= chi(G+G') + chi(GG') for all pairs.
inline bool is_supermodular(const SetFn& chi) {
    const std::uint32_t full = chi.full_mask();
    for (std::uint32_t a = 0; a <= full; ++a)
        for (std::uint32_t b = a + 1; b <= full; ++b)
            if (chi(a) + chi(b) > chi(a | b) + chi(a & b)) return false;
    return true;
}

// Permutation as the ordered list of flows (omega_pi^1, ..., omega_pi^n):
// perm[i] is the flow with rank i+1, i.e. position i+1 in the chain.
using Perm = std::vector<std::uint32_t>;

inline Perm identity_perm(std::size_t n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

inline std::vector<Perm> all_perms(std::size_t n) {
    if (n > 8) throw resource_error("all_perms: n > 8");
    Perm p = identity_perm(n);
    std::vector<Perm> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// v^{omega_pi^i} = chi(Gamma_pi^i) - chi(Gamma_pi^{i-1}); always a member of
// the permutohedron when chi is supermodular.
inline std::vector<std::uint64_t> vertex(const SetFn& chi, const Perm& pi) {
    std::vector<std::uint64_t> v(chi.n(), 0);
    std::uint32_t mask = 0;
    std::uint64_t prev = 0;
    for (std::uint32_t w : pi) {
        mask |= (std::uint32_t(1) << w);
        const std::uint64_t cur = chi(mask);
        v[w] = cur - prev;
        prev = cur;
    }
    return v;
}

// d in P(chi): total pinned to chi(full) and every subset sum at or above chi.
inline bool membership(const SetFn& chi, std::span<const std::uint64_t> d) {
    if (d.size() != chi.n()) throw domain_error("membership: dimension mismatch");
    const std::uint32_t full = chi.full_mask();
    for (std::uint32_t m = 1; m <= full; ++m) {
        std::uint64_t sum = 0;
        for (std::size_t w = 0; w < chi.n(); ++w)
            if (m & (std::uint32_t(1) << w)) sum += d[w];
        if (m == full ? sum != chi(full) : sum < chi(m)) return false;
    }
    return true;
}

// Vertex centroid, computed exactly through the marginal-contribution form
//   v^w = sum over G not containing w of |G|!(n-|G|-1)!/n! (chi(G+w) - chi(G)).
inline std::vector<Rat> centroid(const SetFn& chi) {
    const std::size_t n = chi.n();
    if (n > 12) throw resource_error("centroid: n > 12");
    std::vector<long long> fact(n + 1, 1);
    for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * (long long)k;
    std::vector<Rat> out(n, Rat(0));
    const std::uint32_t full = chi.full_mask();
    for (std::size_t w = 0; w < n; ++w) {
        const std::uint32_t bit = std::uint32_t(1) << w;
        Rat acc(0);
        for (std::uint32_t m = 0; m <= full; ++m) {
            if (m & bit) continue;
            const int k = std::popcount(m);
            const Rat weight(fact[k] * fact[n - k - 1], fact[n]);
            acc += weight * Rat((long long)(chi(m | bit) - chi(m)));
        }
        out[w] = acc;
    }
    return out;
}

// Chain: nested subsets from empty to full, as strictly increasing masks.
inline void validate_chain(const SetFn& chi, const std::vector<std::uint32_t>& chain) {
    if (chain.empty() || chain.front() != 0 || chain.back() != chi.full_mask())
        throw domain_error("chain must run from the empty set to the full set");
    for (std::size_t k = 1; k < chain.size(); ++k) {
        if ((chain[k - 1] & chain[k]) != chain[k - 1] || chain[k - 1] == chain[k])
            throw domain_error("chain must be strictly nested");
    }
}

// Vertices of the face P_C(chi): all v_pi whose prefix chain refines C.
// Degenerate permutohedra may repeat vertices; duplicates are kept.
inline std::vector<std::vector<std::uint64_t>> face(const SetFn& chi,
                                                    const std::vector<std::uint32_t>& chain) {
    validate_chain(chi, chain);
    std::vector<std::vector<std::uint64_t>> out;
    for (const Perm& pi : all_perms(chi.n())) {
        bool ok = true;
        for (std::uint32_t want : chain) {
            if (want == 0) continue;
            // want must be a prefix set of pi
            const int sz = std::popcount(want);
            std::uint32_t prefix = 0;
            for (int k = 0; k < sz; ++k) prefix |= (std::uint32_t(1) << pi[k]);
            if (prefix != want) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(vertex(chi, pi));
    }
    return out;
}

} // namespace wcs
