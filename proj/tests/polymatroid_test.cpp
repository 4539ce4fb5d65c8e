#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "wcs/polymatroid.hpp"
#include "wcs/random.hpp"

using namespace wcs;

namespace {

// chi({1}) = 1, chi({2}) = 0, chi({1,2}) = 3
const SetFn kExample(2, {0, 1, 0, 3});

// Exact barycentric solver: is d a convex combination of the given points?
// Enumerates candidate supports of size <= n+1 and solves each system by
// rational Gaussian elimination.
bool in_convex_hull(const std::vector<std::vector<std::uint64_t>>& pts,
                    const std::vector<std::uint64_t>& d) {
    const std::size_t n = d.size();
    std::vector<std::vector<std::uint64_t>> uniq;
    for (const auto& p : pts)
        if (std::find(uniq.begin(), uniq.end(), p) == uniq.end()) uniq.push_back(p);

    std::vector<std::size_t> idx;
    auto solve = [&]() -> bool {
        const std::size_t m = idx.size();
        // rows: one per coordinate plus the normalization row
        std::vector<std::vector<Rat>> a(n + 1, std::vector<Rat>(m + 1, Rat(0)));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < m; ++c) a[r][c] = Rat((long long)uniq[idx[c]][r]);
            a[r][m] = Rat((long long)d[r]);
        }
        for (std::size_t c = 0; c < m; ++c) a[n][c] = Rat(1);
        a[n][m] = Rat(1);

        std::vector<std::size_t> pivot_col;
        std::size_t row = 0;
        for (std::size_t col = 0; col < m && row <= n; ++col) {
            std::size_t pr = row;
            while (pr <= n && a[pr][col] == Rat(0)) ++pr;
            if (pr > n) continue;
            std::swap(a[row], a[pr]);
            const Rat piv = a[row][col];
            for (auto& v : a[row]) v /= piv;
            for (std::size_t r = 0; r <= n; ++r) {
                if (r == row || a[r][col] == Rat(0)) continue;
                const Rat f = a[r][col];
                for (std::size_t c = 0; c <= m; ++c) a[r][c] -= f * a[row][c];
            }
            pivot_col.push_back(col);
            ++row;
        }
        for (std::size_t r = row; r <= n; ++r)
            if (a[r][m] != Rat(0)) return false; // inconsistent
        std::vector<Rat> lambda(m, Rat(0));
        for (std::size_t r = 0; r < pivot_col.size(); ++r) lambda[pivot_col[r]] = a[r][m];
        for (const Rat& l : lambda)
            if (l < Rat(0)) return false;
        return true;
    };

    auto rec = [&](auto&& self, std::size_t start) -> bool {
        if (!idx.empty() && solve()) return true;
        if (idx.size() == n + 1) return false;
        for (std::size_t k = start; k < uniq.size(); ++k) {
            idx.push_back(k);
            if (self(self, k + 1)) {
                idx.pop_back();
                return true;
            }
            idx.pop_back();
        }
        return false;
    };
    return rec(rec, 0);
}

} // namespace

TEST_CASE("supermodularity check") {
    CHECK(is_supermodular(SetFn(2, {0, 0, 0, 0})));
    CHECK(is_supermodular(kExample));            // 1 + 0 <= 3 + 0
    CHECK_FALSE(is_supermodular(SetFn(2, {0, 1, 1, 1}))); // 2 > 1
}

TEST_CASE("vertices") {
    CHECK(vertex(kExample, {0, 1}) == std::vector<std::uint64_t>{1, 2});
    CHECK(vertex(kExample, {1, 0}) == std::vector<std::uint64_t>{3, 0});

    // modular functions have a single point: every permutation telescopes to w
    Rng rng(61);
    for (int it = 0; it < 20; ++it) {
        const std::size_t n = 1 + rng.below(4);
        std::vector<std::uint64_t> w(n);
        for (auto& v : w) v = rng.in(0, 5);
        SetFn chi = SetFn::from_fn(n, [&](std::uint32_t m) {
            std::uint64_t s = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (m & (std::uint32_t(1) << i)) s += w[i];
            return s;
        });
        for (const Perm& pi : all_perms(n)) CHECK(vertex(chi, pi) == w);
    }
}

TEST_CASE("membership") {
    CHECK(membership(kExample, vertex(kExample, {0, 1})));
    CHECK(membership(kExample, vertex(kExample, {1, 0})));
    CHECK_FALSE(membership(kExample, std::vector<std::uint64_t>{0, 3})); // d^<{1}> < 1
    CHECK(membership(kExample, std::vector<std::uint64_t>{2, 1}));      // the centroid
}

TEST_CASE("centroid is the exact vertex average") {
    auto c = centroid(kExample);
    CHECK(c == std::vector<Rat>{Rat(2), Rat(1)});

    Rng rng(62);
    for (int it = 0; it < 30; ++it) {
        const std::size_t n = 2 + rng.below(4); // up to 5
        SetFn chi = random_supermodular(rng, n);
        std::vector<Rat> avg(n, Rat(0));
        const auto perms = all_perms(n);
        for (const Perm& pi : perms) {
            const auto v = vertex(chi, pi);
            for (std::size_t w = 0; w < n; ++w) avg[w] += Rat((long long)v[w]);
        }
        for (auto& v : avg) v /= Rat((long long)perms.size());
        CHECK(centroid(chi) == avg);
    }
}

TEST_CASE("every vertex lies in the permutohedron") {
    Rng rng(63);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 2 + rng.below(5); // up to 6
        SetFn chi = random_supermodular(rng, n);
        for (const Perm& pi : all_perms(n)) {
            const auto v = vertex(chi, pi);
            std::uint32_t full = chi.full_mask();
            for (std::uint32_t m = 1; m <= full; ++m) {
                std::uint64_t sum = 0;
                for (std::size_t w = 0; w < n; ++w)
                    if (m & (std::uint32_t(1) << w)) sum += v[w];
                CHECK(sum >= chi(m));
                if (m == full) CHECK(sum == chi(full));
            }
        }
    }
}

TEST_CASE("neighboring permutations differ in exactly the transposed coordinates") {
    Rng rng(64);
    for (int it = 0; it < 40; ++it) {
        const std::size_t n = 2 + rng.below(4); // up to 5
        SetFn chi = random_supermodular(rng, n);
        for (const Perm& pi : all_perms(n)) {
            for (std::size_t k = 0; k + 1 < n; ++k) {
                Perm pj = pi;
                std::swap(pj[k], pj[k + 1]);
                const auto v1 = vertex(chi, pi);
                const auto v2 = vertex(chi, pj);
                for (std::size_t w = 0; w < n; ++w) {
                    if (w == pi[k] || w == pi[k + 1]) continue;
                    CHECK(v1[w] == v2[w]);
                }
            }
        }
    }
}

TEST_CASE("faces") {
    // a complete chain pins a single vertex
    auto f1 = face(kExample, {0u, 0b01u, 0b11u});
    REQUIRE(f1.size() == 1);
    CHECK(f1[0] == vertex(kExample, {0, 1}));
    // the trivial chain keeps all n! vertices (duplicates included)
    auto f2 = face(kExample, {0u, 0b11u});
    CHECK(f2.size() == 2);

    // hexagon: the chain through {1} keeps the two vertices pinning d^1
    Rng rng(65);
    for (int it = 0; it < 20; ++it) {
        SetFn chi = random_supermodular(rng, 3);
        auto f = face(chi, {0u, 0b001u, 0b111u});
        REQUIRE(f.size() == 2);
        for (const auto& v : f) CHECK(v[0] == chi(0b001u));
    }
    CHECK_THROWS_AS(face(kExample, {0b01u, 0b11u}), wcs::domain_error);
}

TEST_CASE("integral points of the permutohedron match the vertex hull") {
    Rng rng(66);
    for (int it = 0; it < 12; ++it) {
        const std::size_t n = 2 + rng.below(3); // up to 4
        SetFn chi = random_supermodular(rng, n, 3, 2);
        std::vector<std::vector<std::uint64_t>> verts;
        for (const Perm& pi : all_perms(n)) verts.push_back(vertex(chi, pi));
        const std::uint64_t total = chi(chi.full_mask());

        // enumerate all integral d with the right total
        std::vector<std::uint64_t> d(n, 0);
        auto rec = [&](auto&& self, std::size_t pos, std::uint64_t left) -> void {
            if (pos + 1 == n) {
                d[pos] = left;
                const bool member = membership(chi, d);
                const bool hull = in_convex_hull(verts, d);
                CHECK(member == hull);
                return;
            }
            for (std::uint64_t v = 0; v <= left; ++v) {
                d[pos] = v;
                self(self, pos + 1, left - v);
            }
        };
        rec(rec, 0, total);
    }
}
