#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pwa {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnboundedRegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyRegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// non-finite objective value at a sample point
struct EvaluationError : std::runtime_error {
    std::vector<double> point;
    EvaluationError(const std::string& msg, std::vector<double> p)
        : std::runtime_error(msg), point(std::move(p)) {}
};

// c1 undefined or zero: the theorem route certifies nothing tighter than the
// region itself, the fallback radius is the region diameter
struct DegenerateBoundError : std::runtime_error {
    double fallback_radius;
    DegenerateBoundError(const std::string& msg, double radius)
        : std::runtime_error(msg), fallback_radius(radius) {}
};

}  // namespace pwa
