#include "eqlab/fit.hpp"

#include "eqlab/common.hpp"

#include <algorithm>
#include <cmath>

namespace eqlab {

namespace {

double t975(int df)
{
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                   2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086};
    if (df < 1) return 0.0;
    if (df <= 20) return table[df - 1];
    return 1.96 + 2.4 / df;
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw DomainError("line fit needs at least two points");
    const auto n = static_cast<Eigen::Index>(x.size());
    const Eigen::Map<const Eigen::VectorXd> X(x.data(), n), Y(y.data(), n);
    const double mx = X.mean(), my = Y.mean();
    const Eigen::VectorXd dx = X.array() - mx, dy = Y.array() - my;
    const double sxx = dx.squaredNorm(), syy = dy.squaredNorm(), sxy = dx.dot(dy);
    if (sxx == 0.0) throw DegenerateError("line fit with constant abscissa");
    LineFit f;
    f.points = static_cast<int>(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double sse = (dy - f.slope * dx).squaredNorm();
    f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    if (n > 2) f.slope_ci95 = t975(static_cast<int>(n) - 2) * std::sqrt(sse / static_cast<double>(n - 2) / sxx);
    return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0 && y[i] > 0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    return fit_line(lx, ly);
}

double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace eqlab
