#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wcs/cumvec.hpp"
#include "wcs/errors.hpp"
#include "wcs/extnat.hpp"

namespace wcs {

// Dense (g+1) x (g+1) matrix of extended naturals. Services backed by such a
// matrix are finite: entries are read as a_{ij} = a_{i,g} for j > g and
// a_{ij} = 0 for i >= j, so the stored block is the whole object.
class ExtMatrix {
public:
    ExtMatrix() : g_(0), a_(1, ExtNat(0)) {}
    explicit ExtMatrix(std::size_t g) : g_(g), a_((g + 1) * (g + 1), ExtNat(0)) {}

    std::size_t g() const { return g_; }
    std::size_t dim() const { return g_ + 1; }

    ExtNat& operator()(std::size_t i, std::size_t j) { return a_[i * (g_ + 1) + j]; }
    const ExtNat& operator()(std::size_t i, std::size_t j) const { return a_[i * (g_ + 1) + j]; }

    // Entry under the finiteness convention, for any i, j in N.
    ExtNat at(std::size_t i, std::size_t j) const {
        if (i >= j) return ExtNat(0);
        if (i > g_) return ExtNat(0);
        return (*this)(i, std::min(j, g_));
    }

    // Row i as a cumulative vector over all of N (constant past column g).
    CumVec row(std::size_t i) const {
        std::vector<ExtNat> pre;
        pre.reserve(g_ + 2);
        for (std::size_t j = 0; j <= g_ + 1; ++j) pre.push_back(at(i, j));
        return CumVec(std::move(pre), ExtNat(0));
    }

    bool operator==(const ExtMatrix&) const = default;

private:
    std::size_t g_;
    std::vector<ExtNat> a_;
};

using Spectrum = ExtMatrix;

inline bool is_cumulative_matrix(const ExtMatrix& m) {
    for (std::size_t i = 0; i <= m.g(); ++i)
        for (std::size_t j = 0; j <= m.g(); ++j) {
            if (i >= j && m(i, j) != ExtNat(0)) return false;
            if (j < m.g() && m(i, j) > m(i, j + 1)) return false;
        }
    return true;
}

inline bool is_spectral_matrix(const ExtMatrix& s, std::uint64_t b) {
    if (!is_cumulative_matrix(s)) return false;
    for (std::size_t i = 0; i <= s.g(); ++i)
        for (std::size_t j = 0; j <= s.g(); ++j) {
            if (i + 1 <= s.g() && s(i, j) < s(i + 1, j)) return false;
            const ExtNat cap = monus(s(0, j), i >= 1 ? ExtNat(b) : ExtNat(0));
            if (s(i, j) > cap) return false;
        }
    return true;
}

struct CumulativeMatrix {
    ExtMatrix m;

    explicit CumulativeMatrix(ExtMatrix mm) : m(std::move(mm)) {
        if (!is_cumulative_matrix(m))
            throw representation_error("CumulativeMatrix: invariant violation");
    }
    std::size_t g() const { return m.g(); }
    bool operator==(const CumulativeMatrix&) const = default;
};

struct SpectralMatrix {
    ExtMatrix s;
    std::uint64_t b = 0;

    SpectralMatrix(ExtMatrix ss, std::uint64_t bb) : s(std::move(ss)), b(bb) {
        if (!is_spectral_matrix(s, b))
            throw representation_error("SpectralMatrix: invariant violation");
    }
    std::size_t g() const { return s.g(); }
    bool operator==(const SpectralMatrix&) const = default;
};

} // namespace wcs
