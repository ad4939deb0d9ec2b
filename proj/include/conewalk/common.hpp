// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

inline constexpr const char* kToolName = "conewalk";
inline constexpr const char* kVersion = "0.1.0";

// A point in R^d (or Z^d stored as doubles); dimension is carried by context.
using Vec = std::vector<double>;

// Invalid user input: bad cone/step strings, dimension mismatches, start point
// on or outside the boundary, unreachable bridge endpoints, malformed files.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A computation could not complete: acceptance-rate underflow, DP window
// overflow, fixed-point non-convergence, splitting-level extinction.
class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline double sqnorm(Vec const& x)
{
    double s = 0;
    for (double v : x)
        s += v * v;
    return s;
}

inline double norm(Vec const& x)
{
    return std::sqrt(sqnorm(x));
}

}  // namespace conewalk
