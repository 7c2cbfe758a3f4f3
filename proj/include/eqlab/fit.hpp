#pragma once

#include <vector>

namespace eqlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_ci95 = 0.0;  // half-width
    int points = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Fit of log y against log x; pairs with a nonpositive entry are skipped.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

}  // namespace eqlab
