#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wcs {

// Input outside the mathematical domain of an operation (e.g. left-shift of a
// vector with x_1 > 0, or evaluating a service below its conditioning backlog).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A table-backed service was evaluated at a point outside its stored universe.
struct unknown_input_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Result (or request) not expressible in the eventually-affine representation.
struct representation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// d > q: more departures than queued tasks.
struct causality_error : std::logic_error {
    using std::logic_error::logic_error;
};

// d < p: the slot's immediate obligation was not met.
struct guarantee_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Internal consistency failure (e.g. unbounded maximand on a system that was
// claimed schedulable).
struct inconsistent_state_error : std::logic_error {
    using std::logic_error::logic_error;
};

// A scalar argument fell outside its valid interval; carries the interval.
struct range_error : std::out_of_range {
    range_error(const std::string& what, std::uint64_t lo, std::uint64_t hi)
        : std::out_of_range(what), lo(lo), hi(hi) {}
    std::uint64_t lo;
    std::uint64_t hi;
};

// Request exceeds a hard size guard (n too large for exhaustive work).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace wcs
