#include "eqlab/curve.hpp"

#include <algorithm>
#include <cmath>

namespace eqlab {

namespace {

Vec2 quarter_turns(double phi, int k)
{
    // k-th derivative of (cos phi, sin phi)
    const double s = phi + k * (kPi / 2.0);
    return {std::cos(s), std::sin(s)};
}

double binom(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct EvalVisitor {
    double tau;
    int order;

    Vec2 operator()(const Ellipse& e) const
    {
        const Vec2 u = quarter_turns(tau, order);
        return {e.a * u.x(), e.b * u.y()};
    }
    Vec2 operator()(const PolarFourier& pf) const
    {
        Vec2 r = Vec2::Zero();
        for (int j = 0; j <= order; ++j)
            r += binom(order, j) * pf.radius(tau, j) * quarter_turns(tau, order - j);
        return r;
    }
    Vec2 operator()(const PeriodicSpline& s) const { return s.eval(tau, order); }
    Vec2 operator()(const GraphCurve& g) const
    {
        const double x = -tau;
        const double sign = (order % 2 == 0) ? 1.0 : -1.0;
        const double dx = order == 0 ? x : (order == 1 ? -1.0 : 0.0);
        return {dx, sign * g.f(x, order)};
    }
};

}  // namespace

double PolarFourier::radius(double phi, int order) const
{
    double r = order == 0 ? c0 : 0.0;
    const std::size_t m = std::max(cos.size(), sin.size());
    for (std::size_t i = 0; i < m; ++i) {
        const double k = static_cast<double>(i + 1);
        const double arg = k * phi + order * (kPi / 2.0);
        const double w = std::pow(k, order);
        if (i < cos.size()) r += w * cos[i] * std::cos(arg);
        if (i < sin.size()) r += w * sin[i] * std::sin(arg);
    }
    return r;
}

double GraphCurve::f(double x, int order) const
{
    double y = 0.0;
    for (int j = order; j < 5; ++j) {
        double fall = 1.0;
        for (int i = 0; i < order; ++i) fall *= (j - i);
        y += c[j] * fall * std::pow(x, j - order);
    }
    return y;
}

SmoothCurve::SmoothCurve(Kind k, double lo, double hi, bool closed, int max_order)
    : kind_(std::move(k)), lo_(lo), hi_(hi), closed_(closed), max_order_(max_order)
{
}

void SmoothCurve::finish()
{
    constexpr int m = 1024;
    Eigen::Matrix2Xd pts(2, m + 1);
    for (int i = 0; i <= m; ++i) pts.col(i) = eval(lo_ + (hi_ - lo_) * i / m, 0);
    const Vec2 span = pts.rowwise().maxCoeff() - pts.rowwise().minCoeff();
    scale_ = span.norm();
    if (!(scale_ > 0)) throw DegenerateError("curve has zero extent");

    double kmin = 1e300, kmax = -1e300;
    for (int i = 0; i <= m; ++i) {
        if (closed_ && i == m) break;
        const double t = lo_ + (hi_ - lo_) * i / m;
        const Vec2 d1 = eval(t, 1), d2 = eval(t, 2);
        const double k = -cross2(d1, d2) / std::pow(d1.norm(), 3);
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    if (kmax >= 0.0) throw DomainError("curve is not strictly convex (curvature changes sign)");
}

SmoothCurve SmoothCurve::ellipse(double a, double b)
{
    if (!(a > 0 && b > 0)) throw DomainError("ellipse semi-axes must be positive");
    SmoothCurve c(Ellipse{a, b}, 0.0, kTwoPi, true, 8);
    c.finish();
    return c;
}

SmoothCurve SmoothCurve::polar_fourier(PolarFourier pf)
{
    for (int i = 0; i < 4096; ++i)
        if (pf.radius(kTwoPi * i / 4096.0) <= 0.0)
            throw DomainError("polar Fourier radius is not positive everywhere");
    SmoothCurve c(std::move(pf), 0.0, kTwoPi, true, 8);
    c.finish();
    return c;
}

SmoothCurve SmoothCurve::spline(const Eigen::Matrix2Xd& samples)
{
    const Eigen::Index m = samples.cols();
    double area2 = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) area2 += cross2(samples.col(i), samples.col((i + 1) % m));
    Eigen::Matrix2Xd pts = samples;
    if (area2 < 0) pts = samples.rowwise().reverse().eval();
    SmoothCurve c(PeriodicSpline(pts), 0.0, kTwoPi, true, 3);
    c.finish();
    return c;
}

SmoothCurve SmoothCurve::graph(const std::array<double, 5>& coeffs, double half_width)
{
    if (!(half_width > 0)) throw DomainError("graph window must be positive");
    GraphCurve g{coeffs, half_width};
    if (!(g.f(0.0) > 0)) throw DomainError("graph must lie above the origin");
    SmoothCurve c(g, -half_width, half_width, false, 1 << 20);
    c.finish();
    return c;
}

SmoothCurve SmoothCurve::jet(double rho0, double A, double B, double half_width)
{
    return graph({rho0, 0.0, -1.0 / (2.0 * rho0), A, B}, half_width);
}

SmoothCurve SmoothCurve::parabola(double rho, double kappa, double half_width)
{
    return graph({rho, 0.0, kappa / 2.0, 0.0, 0.0}, half_width);
}

std::string SmoothCurve::kind_name() const
{
    switch (kind_.index()) {
    case 0: return "ellipse";
    case 1: return "polar_fourier";
    case 2: return "spline";
    default: return "graph";
    }
}

double SmoothCurve::wrap(double tau) const
{
    if (closed_) {
        double s = std::fmod(tau - lo_, hi_ - lo_);
        if (s < 0) s += hi_ - lo_;
        return lo_ + s;
    }
    const double slack = 1e-12 * (hi_ - lo_);
    if (tau < lo_ - slack || tau > hi_ + slack) throw DomainError("parameter outside curve domain");
    return std::clamp(tau, lo_, hi_);
}

Vec2 SmoothCurve::eval(double tau, int order) const
{
    if (order < 0 || order > max_order_)
        throw UnsupportedError("derivative order " + std::to_string(order) + " exceeds smoothness of " +
                               kind_name());
    return std::visit(EvalVisitor{wrap(tau), order}, kind_);
}

Vec2 eval(const SmoothCurve& curve, double tau, int order) { return curve.eval(tau, order); }

double signed_curvature(const SmoothCurve& curve, double tau)
{
    const Vec2 d1 = curve.eval(tau, 1), d2 = curve.eval(tau, 2);
    const double speed = d1.norm();
    if (speed < 1e-14 * curve.scale() / curve.param_unit())
        throw DegenerateError("zero tangent vector");
    return -cross2(d1, d2) / (speed * speed * speed);
}

double curvature_derivative(const SmoothCurve& curve, double tau)
{
    const Vec2 d1 = curve.eval(tau, 1), d2 = curve.eval(tau, 2), d3 = curve.eval(tau, 3);
    const double s2 = d1.squaredNorm();
    const double s = std::sqrt(s2);
    return -(cross2(d1, d3) / (s2 * s) - 3.0 * cross2(d1, d2) * d1.dot(d2) / (s2 * s2 * s));
}

std::array<double, 6> squared_distance_jet(const SmoothCurve& curve, const Vec2& o, double tau)
{
    const int avail = std::min(curve.max_order(), 5);
    std::array<Vec2, 6> u;
    u[0] = curve.eval(tau, 0) - o;
    for (int j = 1; j <= avail; ++j) u[j] = curve.eval(tau, j);

    std::array<double, 6> D{};
    auto exact = [&](int m) {
        double s = 0.0;
        for (int j = 0; j <= m; ++j) s += binom(m, j) * u[j].dot(u[m - j]);
        return s;
    };
    for (int m = 0; m <= avail; ++m) D[m] = exact(m);

    if (avail < 5) {
        // Differentiate the highest exact derivative numerically.
        const int top = avail;
        auto Dtop = [&](double t) {
            std::array<Vec2, 6> w;
            w[0] = curve.eval(t, 0) - o;
            for (int j = 1; j <= top; ++j) w[j] = curve.eval(t, j);
            double s = 0.0;
            for (int j = 0; j <= top; ++j) s += binom(top, j) * w[j].dot(w[top - j]);
            return s;
        };
        auto central = [&](int extra, double h) {
            // central differences of order `extra` (1 or 2)
            if (extra == 1) return (Dtop(tau + h) - Dtop(tau - h)) / (2 * h);
            return (Dtop(tau + h) - 2 * Dtop(tau) + Dtop(tau - h)) / (h * h);
        };
        const double h = 1e-3 * curve.param_unit();
        for (int extra = 1; top + extra <= 5 && extra <= 2; ++extra)
            D[top + extra] = (4.0 * central(extra, h / 2) - central(extra, h)) / 3.0;
    }
    return D;
}

int distance_order(const SmoothCurve& curve, const Vec2& o, double tau)
{
    const auto D = squared_distance_jet(curve, o, tau);
    // With D' = 0 the first nonzero derivative of |r-o| matches that of D = |r-o|^2.
    const double s2 = curve.scale() * curve.scale();
    for (int m = 2; m <= 5; ++m) {
        const double thresh = 1e-7 * s2 / std::pow(curve.param_unit(), m);
        if (std::abs(D[m]) > thresh) return m;
    }
    return 0;
}

namespace {

SmoothEquilibrium make_equilibrium(const SmoothCurve& curve, const Vec2& o, double tau, bool degenerate)
{
    SmoothEquilibrium e;
    e.tau = tau;
    e.position = curve.eval(tau);
    e.rho = (e.position - o).norm();
    e.kappa = signed_curvature(curve, tau);
    const double lam = 1.0 + e.kappa * e.rho;
    e.k = degenerate ? distance_order(curve, o, tau) : 2;
    if (!degenerate) {
        e.stability = lam > 0 ? Stability::Stable : Stability::Unstable;
    } else if (e.k == 0 || e.k % 2 == 1) {
        e.stability = Stability::Degenerate;
    } else {
        const auto D = squared_distance_jet(curve, o, tau);
        e.stability = D[e.k] > 0 ? Stability::Stable : Stability::Unstable;
    }
    return e;
}

}  // namespace

std::vector<SmoothEquilibrium> global_equilibria(const SmoothCurve& curve, const Vec2& o,
                                                 const EquilibriumOptions& opt)
{
    double lo = curve.lo(), hi = curve.hi();
    const bool window = opt.hi > opt.lo;
    if (window) {
        lo = opt.lo;
        hi = opt.hi;
        if (!curve.closed()) {
            lo = std::max(lo, curve.lo());
            hi = std::min(hi, curve.hi());
        }
    }
    const bool cyclic = curve.closed() && !window;
    const int n = opt.samples;
    const double step = (hi - lo) / n;

    auto g = [&](double t) { return (curve.eval(t) - o).dot(curve.eval(t, 1)); };
    auto dg = [&](double t) {
        const Vec2 d1 = curve.eval(t, 1);
        return d1.squaredNorm() + (curve.eval(t) - o).dot(curve.eval(t, 2));
    };

    const int count = cyclic ? n : n + 1;
    std::vector<double> ts(count), gs(count);
    for (int i = 0; i < count; ++i) {
        ts[i] = lo + step * i;
        gs[i] = g(ts[i]);
    }
    const double gtol = 1e-9 * curve.scale() * curve.scale() / curve.param_unit();
    if (std::all_of(gs.begin(), gs.end(), [&](double v) { return std::abs(v) < gtol; }))
        throw DegenerateError("distance from o is constant along the curve");

    const double ptol = 1e-12 * (curve.hi() - curve.lo());
    auto bisect = [&](auto&& fn, double a, double b, double fa) {
        while (b - a > ptol) {
            const double m = 0.5 * (a + b);
            const double fm = fn(m);
            if (fm == 0.0) return m;
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };

    std::vector<SmoothEquilibrium> out;
    const int segs = cyclic ? n : n;
    for (int i = 0; i < segs; ++i) {
        const int j = cyclic ? (i + 1) % n : i + 1;
        const double a = ts[i];
        const double b = a + step;
        const double ga = gs[i], gb = gs[j];
        if (ga == 0.0) {
            out.push_back(make_equilibrium(curve, o, curve.wrap(a), false));
            continue;
        }
        if ((ga < 0) != (gb < 0) && gb != 0.0) {
            const double t = bisect(g, a, b, ga);
            out.push_back(make_equilibrium(curve, o, curve.wrap(t), false));
        }
    }

    if (opt.detect_degenerate) {
        // Touching zeros: g has a local extremum of |g| near zero without changing sign.
        for (int i = 0; i < segs; ++i) {
            const int im = cyclic ? (i + n - 1) % n : i - 1;
            const int ip = cyclic ? (i + 1) % n : i + 1;
            if (im < 0 || ip >= count) continue;
            const double gm = gs[im], g0 = gs[i], gp = gs[ip];
            if ((gm < 0) != (g0 < 0) || (g0 < 0) != (gp < 0)) continue;
            if (!(std::abs(g0) <= std::abs(gm) && std::abs(g0) <= std::abs(gp))) continue;
            const double a = ts[i] - step, b = ts[i] + step;
            const double da = dg(a), db = dg(b);
            if ((da < 0) == (db < 0)) continue;
            const double t = bisect(dg, a, b, da);
            if (std::abs(g(t)) < gtol) {
                bool dup = false;
                for (const auto& e : out) {
                    double d = std::abs(e.tau - curve.wrap(t));
                    if (curve.closed()) d = std::min(d, curve.period() - d);
                    if (d < 2 * step) dup = true;
                }
                if (!dup) out.push_back(make_equilibrium(curve, o, curve.wrap(t), true));
            }
        }
        // Simple roots that are numerically near-degenerate get their order estimated.
        for (auto& e : out) {
            if (e.k != 2) continue;
            if (std::abs(1.0 + e.kappa * e.rho) < 1e-7) {
                e = make_equilibrium(curve, o, e.tau, true);
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.tau < y.tau; });
    return out;
}

int count_equilibria(const SmoothCurve& curve, const Vec2& o)
{
    EquilibriumOptions opt;
    opt.detect_degenerate = false;
    return static_cast<int>(global_equilibria(curve, o, opt).size());
}

Vec2 evolute(const SmoothCurve& curve, double tau)
{
    const double k = signed_curvature(curve, tau);
    if (std::abs(k) * curve.scale() < 1e-12) throw DegenerateError("curvature vanishes");
    const Vec2 t = curve.eval(tau, 1).normalized();
    return curve.eval(tau) + perp(t) / std::abs(k);
}

EvolutePoint classify_evolute_point(const SmoothCurve& curve, double tau)
{
    // |dE/dtau| = |kappa'| / kappa^2 ; compare against the curve scale.
    auto speed = [&](double t) {
        const double k = signed_curvature(curve, t);
        return std::abs(curvature_derivative(curve, t)) / (k * k) * curve.param_unit();
    };
    const double tol = 1e-7 * curve.scale();
    bool constant = true;
    for (int i = 0; i < 64 && constant; ++i) {
        const double t = curve.lo() + curve.period() * (i + 0.37) / 64.0;
        if (speed(t) > tol) constant = false;
    }
    if (constant) throw UnsupportedError("constant curvature: evolute collapses to a point");
    if (speed(tau) <= tol) return EvolutePoint::Cusp;

    const Vec2 E = evolute(curve, tau);
    const int m = 2048;
    const double guard = 0.02 * curve.period();
    for (int i = 0; i < m; ++i) {
        const double t = curve.lo() + curve.period() * i / m;
        double d = std::abs(t - tau);
        if (curve.closed()) d = std::min(d, curve.period() - d);
        if (d < guard) continue;
        if ((evolute(curve, t) - E).norm() < 1e-9 * curve.scale()) return EvolutePoint::Multiple;
    }
    return EvolutePoint::General;
}

}  // namespace eqlab
