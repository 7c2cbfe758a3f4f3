#pragma once

#include "eqlab/common.hpp"

namespace eqlab {

// Periodic cubic interpolating spline through m points at uniform knots on [0, 2pi).
class PeriodicSpline {
public:
    PeriodicSpline() = default;
    explicit PeriodicSpline(const Eigen::Matrix2Xd& points);

    Vec2 eval(double tau, int order = 0) const;
    Eigen::Index size() const { return points_.cols(); }
    const Eigen::Matrix2Xd& points() const { return points_; }

private:
    Eigen::Matrix2Xd points_;
    Eigen::Matrix2Xd second_;  // second derivatives at the knots
    double h_ = 1.0;
};

// Solves the cyclic tridiagonal system with constant (1, 4, 1) stencil scaled by h^2/6.
Eigen::VectorXd solve_cyclic_141(const Eigen::VectorXd& rhs);

}  // namespace eqlab
