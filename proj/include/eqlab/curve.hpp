#pragma once

#include "eqlab/common.hpp"
#include "eqlab/spline.hpp"

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace eqlab {

struct Ellipse {
    double a = 1.0;
    double b = 1.0;
};

// rho(phi) = c0 + sum_k cos[k-1] cos(k phi) + sin[k-1] sin(k phi)
struct PolarFourier {
    double c0 = 1.0;
    std::vector<double> cos;
    std::vector<double> sin;

    double radius(double phi, int order = 0) const;
};

// Open graph y = sum_j c[j] x^j over |x| <= half_width, traversed with x = -tau
// so the interior (below the graph) stays on the left.
struct GraphCurve {
    std::array<double, 5> c{};
    double half_width = 1.0;

    double f(double x, int order = 0) const;
};

// Closed convex plane curve. Orientation is counterclockwise; signed curvature
// is negative everywhere.
class SmoothCurve {
public:
    using Kind = std::variant<Ellipse, PolarFourier, PeriodicSpline, GraphCurve>;

    static SmoothCurve ellipse(double a, double b);
    static SmoothCurve polar_fourier(PolarFourier pf);
    static SmoothCurve spline(const Eigen::Matrix2Xd& samples);
    static SmoothCurve graph(const std::array<double, 5>& c, double half_width);
    // y = rho0 - x^2/(2 rho0) + A x^3 + B x^4: the origin sits on the evolute.
    static SmoothCurve jet(double rho0, double A, double B, double half_width);
    // y = rho + (kappa/2) x^2 with kappa the signed curvature at the apex.
    static SmoothCurve parabola(double rho, double kappa, double half_width);

    Vec2 eval(double tau, int order = 0) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double period() const { return hi_ - lo_; }
    bool closed() const { return closed_; }
    int max_order() const { return max_order_; }
    double scale() const { return scale_; }
    // Parameter length corresponding to one radian of a unit-scale curve.
    double param_unit() const { return (hi_ - lo_) / kTwoPi; }
    const Kind& kind() const { return kind_; }
    std::string kind_name() const;

    // Maps tau into [lo, hi) for closed curves; checks the window for open ones.
    double wrap(double tau) const;

private:
    SmoothCurve(Kind k, double lo, double hi, bool closed, int max_order);
    void finish();

    Kind kind_;
    double lo_ = 0.0;
    double hi_ = kTwoPi;
    bool closed_ = true;
    int max_order_ = 6;
    double scale_ = 1.0;
};

enum class Stability { Stable, Unstable, Degenerate };

struct SmoothEquilibrium {
    double tau = 0.0;
    Vec2 position = Vec2::Zero();
    Stability stability = Stability::Stable;
    double rho = 0.0;
    double kappa = 0.0;
    int k = 2;
};

struct EquilibriumOptions {
    int samples = 4096;
    bool detect_degenerate = true;
    double lo = 0.0;  // window; lo == hi means the whole domain
    double hi = 0.0;
};

Vec2 eval(const SmoothCurve& curve, double tau, int order = 0);
double signed_curvature(const SmoothCurve& curve, double tau);
double curvature_derivative(const SmoothCurve& curve, double tau);

// Derivatives D^(m), m = 0..5, of D(tau) = |r(tau) - o|^2. Entries beyond the
// curve's smoothness are filled by Richardson-extrapolated central differences.
std::array<double, 6> squared_distance_jet(const SmoothCurve& curve, const Vec2& o, double tau);

// Order of the first nonzero derivative of |r - o| at an equilibrium, 0 if none up to 5.
int distance_order(const SmoothCurve& curve, const Vec2& o, double tau);

std::vector<SmoothEquilibrium> global_equilibria(const SmoothCurve& curve, const Vec2& o,
                                                 const EquilibriumOptions& opt = {});

// Number of nondegenerate equilibria.
int count_equilibria(const SmoothCurve& curve, const Vec2& o);

Vec2 evolute(const SmoothCurve& curve, double tau);

enum class EvolutePoint { General, Cusp, Multiple };
EvolutePoint classify_evolute_point(const SmoothCurve& curve, double tau);

}  // namespace eqlab
