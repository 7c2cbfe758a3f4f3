#include "eqlab/spline.hpp"

#include <cmath>

namespace eqlab {

Eigen::VectorXd solve_cyclic_141(const Eigen::VectorXd& rhs)
{
    // Sherman-Morrison on the cyclic system A x = rhs, A = tridiag(1,4,1) + corners.
    const Eigen::Index n = rhs.size();
    if (n < 3) throw DomainError("cyclic system needs at least 3 unknowns");
    const double gamma = -4.0;
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 4.0);
    diag(0) -= gamma;
    diag(n - 1) -= 1.0 / gamma;

    auto thomas = [&](Eigen::VectorXd d) {
        Eigen::VectorXd c(n), x(n);
        double m = diag(0);
        c(0) = 1.0 / m;
        d(0) /= m;
        for (Eigen::Index i = 1; i < n; ++i) {
            m = diag(i) - c(i - 1);
            c(i) = 1.0 / m;
            d(i) = (d(i) - d(i - 1)) / m;
        }
        x(n - 1) = d(n - 1);
        for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
        return x;
    };

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    u(0) = gamma;
    u(n - 1) = 1.0;
    const Eigen::VectorXd y = thomas(rhs);
    const Eigen::VectorXd z = thomas(u);
    const double fact = (y(0) + y(n - 1) / gamma) / (1.0 + z(0) + z(n - 1) / gamma);
    return y - fact * z;
}

PeriodicSpline::PeriodicSpline(const Eigen::Matrix2Xd& points) : points_(points)
{
    const Eigen::Index m = points.cols();
    if (m < 4) throw DomainError("periodic spline needs at least 4 samples");
    h_ = kTwoPi / static_cast<double>(m);
    second_.resize(2, m);
    for (int d = 0; d < 2; ++d) {
        Eigen::VectorXd rhs(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double prev = points(d, (i + m - 1) % m);
            const double next = points(d, (i + 1) % m);
            rhs(i) = 6.0 * (next - 2.0 * points(d, i) + prev) / (h_ * h_);
        }
        second_.row(d) = solve_cyclic_141(rhs).transpose();
    }
}

Vec2 PeriodicSpline::eval(double tau, int order) const
{
    const Eigen::Index m = points_.cols();
    double s = std::fmod(tau, kTwoPi);
    if (s < 0) s += kTwoPi;
    auto i = static_cast<Eigen::Index>(std::floor(s / h_));
    if (i >= m) i = m - 1;
    const Eigen::Index j = (i + 1) % m;
    const double a = (static_cast<double>(i + 1) * h_ - s) / h_;  // weight of knot i
    const double b = 1.0 - a;
    const Vec2 pi = points_.col(i), pj = points_.col(j);
    const Vec2 mi = second_.col(i), mj = second_.col(j);
    const double h2 = h_ * h_;
    switch (order) {
    case 0:
        return a * pi + b * pj + ((a * a * a - a) * mi + (b * b * b - b) * mj) * (h2 / 6.0);
    case 1:
        return (pj - pi) / h_ + ((1.0 - 3.0 * a * a) * mi + (3.0 * b * b - 1.0) * mj) * (h_ / 6.0);
    case 2:
        return a * mi + b * mj;
    case 3:
        return (mj - mi) / h_;
    default:
        return Vec2::Zero();
    }
}

}  // namespace eqlab
