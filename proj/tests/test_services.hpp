#pragma once

#include <cstdint>
#include <vector>

#include "test_util.hpp"
#include "wcs/matrix.hpp"
#include "wcs/service.hpp"

namespace wcstest {

using namespace wcs;

// Step spectral matrix: s_ij = 1 when j - i > theta, the spectral hull of a
// single-task service with delay bound theta.
inline SpectralMatrix step_hull_matrix(std::uint64_t theta, std::size_t g, std::uint64_t b = 0) {
    ExtMatrix s(g);
    for (std::size_t i = 0; i <= g; ++i)
        for (std::size_t j = i + 1; j <= g; ++j)
            if (j - i > theta) s(i, j) = ExtNat(1);
    return SpectralMatrix(std::move(s), b);
}

inline CumulativeMatrix rand_cumulative_matrix(Rng& rng, std::size_t g, std::uint64_t max_step = 3) {
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

// Two servers in tandem, each serving exactly its immediate obligation every
// slot; returns the cumulative departures from the second server.
inline std::vector<std::uint64_t> tandem_departures(ServiceState si, ServiceState sii,
                                                    const CumVec& q, std::size_t slots) {
    const std::uint64_t b = si.b + sii.b;
    std::vector<std::uint64_t> cum{0};
    std::uint64_t prev = b;
    for (std::size_t t = 1; t <= slots; ++t) {
        const std::uint64_t a = q.value(t).get() - prev;
        prev = q.value(t).get();
        const std::uint64_t qi = a + si.b;
        const std::uint64_t di = immediate_obligation(si, qi);
        si = update(si, a, di);
        const std::uint64_t qii = di + sii.b;
        const std::uint64_t dii = immediate_obligation(sii, qii);
        sii = update(sii, di, dii);
        cum.push_back(cum.back() + dii);
    }
    return cum;
}

} // namespace wcstest
