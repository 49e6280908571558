#pragma once

#include <utility>
#include <vector>

namespace rulopt::harness {

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares through the points; exact on collinear input.
// Throws std::invalid_argument on fewer than two points or when all x
// values coincide.
LinFit linear_regression(const std::vector<std::pair<double, double>>& points);

} // namespace rulopt::harness
