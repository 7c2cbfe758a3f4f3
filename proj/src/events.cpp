#include "eqlab/events.hpp"

#include "eqlab/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace eqlab {

std::vector<double> cusp_parameters(const SmoothCurve& curve, int samples)
{
    std::vector<double> out;
    const double step = curve.period() / samples;
    const int segs = curve.closed() ? samples : samples - 1;
    auto kp = [&](double t) { return curvature_derivative(curve, t); };
    double a = curve.lo(), fa = kp(a);
    for (int i = 0; i < segs; ++i) {
        const double b = curve.lo() + step * (i + 1);
        const double fb = kp(b);
        if (fa == 0.0) {
            out.push_back(curve.wrap(a));
        } else if ((fa < 0) != (fb < 0) && fb != 0.0) {
            double x = a, y = b, fx = fa;
            while (y - x > 1e-13 * curve.period()) {
                const double m = 0.5 * (x + y);
                const double fm = kp(m);
                if ((fm < 0) == (fx < 0)) {
                    x = m;
                    fx = fm;
                } else {
                    y = m;
                }
            }
            out.push_back(curve.wrap(0.5 * (x + y)));
        }
        a = b;
        fa = fb;
    }
    std::sort(out.begin(), out.end());
    return out;
}

EvoluteCurve build_evolute(const SmoothCurve& curve, int samples)
{
    EvoluteCurve E;
    E.curve = std::make_shared<const SmoothCurve>(curve);
    E.points.resize(2, samples);
    E.tau.resize(samples);
    for (int i = 0; i < samples; ++i) {
        E.tau[i] = curve.lo() + curve.period() * i / samples;
        E.points.col(i) = evolute(curve, E.tau[i]);
    }
    E.cusps = cusp_parameters(curve, samples);
    return E;
}

bool locally_convex(const EvoluteCurve& E, std::size_t i)
{
    const auto n = static_cast<Eigen::Index>(E.tau.size());
    int sign = 0;
    for (int w = -1; w <= 1; ++w) {
        const Eigen::Index c = (static_cast<Eigen::Index>(i) + w + n) % n;
        const Vec2 a = E.points.col((c + n - 1) % n), b = E.points.col(c), d = E.points.col((c + 1) % n);
        const double turn = cross2(b - a, d - b);
        const int s = turn > 0 ? 1 : (turn < 0 ? -1 : 0);
        if (s == 0) return false;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
    }
    return true;
}

Side side_of_evolute(const SmoothCurve& curve, double tau0, const Vec2& q)
{
    // E' = R' n, E'' = R'' n - R' kappa_s |r'| t, with n the inward normal,
    // R = 1/|kappa|, kappa_s = -kappa > 0.
    const double kappa = signed_curvature(curve, tau0);
    const double kp = curvature_derivative(curve, tau0);
    const double Rp = kp / (kappa * kappa);
    const Vec2 d1 = curve.eval(tau0, 1);
    const double speed = d1.norm();
    const Vec2 t = d1 / speed;
    const Vec2 n = perp(t);
    if (std::abs(Rp) <= 1e-7 * curve.scale() / curve.param_unit())
        throw DegenerateError("evolute point is a cusp");

    const Vec2 E = evolute(curve, tau0);
    const Vec2 T = (Rp > 0 ? 1.0 : -1.0) * n;
    const Vec2 B = (Rp > 0 ? -1.0 : 1.0) * t;
    const double kE = (-kappa) * speed / std::abs(Rp);
    const Vec2 d = q - E;
    const double s = d.dot(T), h = d.dot(B);
    const double gap = h - 0.5 * kE * s * s;
    const double tol = 1e-10 * curve.scale();
    if (std::abs(gap) <= tol) return Side::OnCurve;
    return gap > 0 ? Side::Convex : Side::Concave;
}

Side side_of_evolute(const EvoluteCurve& E, double tau0, const Vec2& q)
{
    for (double c : E.cusps) {
        double d = std::abs(c - E.curve->wrap(tau0));
        d = std::min(d, E.curve->period() - d);
        if (d < 1e-9 * E.curve->period()) throw DegenerateError("evolute point is a cusp");
    }
    return side_of_evolute(*E.curve, tau0, q);
}

Vec2 PolylinePath::operator()(double s) const
{
    if (t.empty()) throw DomainError("empty path");
    if (s <= t.front()) return p.front();
    if (s >= t.back()) return p.back();
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t j = static_cast<std::size_t>(it - t.begin());
    const double w = (s - t[j - 1]) / (t[j] - t[j - 1]);
    return (1.0 - w) * p[j - 1] + w * p[j];
}

namespace {

int n_at(const CurveFamily& family, const ReferencePath& o, double t)
{
    return count_equilibria(family(t), o(t));
}

struct Pair {
    double tau = 0.0;
    double gap = 0.0;
};

Pair pair_parameter(const SmoothCurve& curve, const Vec2& o)
{
    // The colliding pair is the closest adjacent pair of equilibria.
    EquilibriumOptions opt;
    opt.detect_degenerate = false;
    const auto eq = global_equilibria(curve, o, opt);
    if (eq.size() < 2) throw ConsistencyError("no equilibrium pair near the crossing");
    double best = 1e300, tau = eq.front().tau;
    const std::size_t m = eq.size();
    for (std::size_t i = 0; i < m; ++i) {
        const bool last = i + 1 == m;
        if (last && !curve.closed()) break;
        double a = eq[i].tau, b = last ? eq[0].tau + curve.period() : eq[i + 1].tau;
        if (b - a < best) {
            best = b - a;
            tau = curve.wrap(0.5 * (a + b));
        }
    }
    return {tau, best};
}

}  // namespace

std::vector<CrossingEvent> detect_crossings(const CurveFamily& family, const ReferencePath& o,
                                            const std::vector<double>& t_grid, const CrossingOptions& opt)
{
    std::vector<CrossingEvent> out;
    if (t_grid.size() < 2) return out;
    const double span = t_grid.back() - t_grid.front();
    const double tol = opt.time_tol * span;

    std::vector<int> Ns(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) Ns[i] = n_at(family, o, t_grid[i]);

    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
        double lo = t_grid[i];
        int nlo = Ns[i];
        while (nlo != Ns[i + 1]) {
            double hi = t_grid[i + 1];
            int nhi = Ns[i + 1];
            // Shrink towards the first change after lo.
            while (hi - lo > tol) {
                const double m = 0.5 * (lo + hi);
                const int nm = n_at(family, o, m);
                if (nm == nlo) {
                    lo = m;
                } else {
                    hi = m;
                    nhi = nm;
                }
            }
            const int jump = nhi - nlo;
            if (std::abs(jump) != 2)
                throw ConsistencyError("nontransverse or degenerate crossing near t=" + fmt17(hi) + " (jump " +
                                       std::to_string(jump) + ")");

            CrossingEvent ev;
            ev.t = 0.5 * (lo + hi);
            ev.n_before = nlo;
            ev.n_after = nhi;
            const SmoothCurve curve = family(ev.t);
            const double richer = jump > 0 ? hi : lo;
            const Pair pair = pair_parameter(family(richer), o(richer));
            ev.tau = pair.tau;
            ev.kind = jump > 0 ? EventKind::Creation : EventKind::Annihilation;

            bool near_cusp = false;
            for (double c : cusp_parameters(curve)) {
                double d = std::abs(c - ev.tau);
                if (curve.closed()) d = std::min(d, curve.period() - d);
                // At a cusp the pair sits within a few of its own gaps of the cusp.
                if (d < std::max(opt.cusp_guard, 4.0 * pair.gap)) near_cusp = true;
            }
            if (near_cusp) {
                ev.kind = EventKind::Degenerate;
            } else {
                const double eta = std::min({1e-6 * span, lo - t_grid[i] + 0.5 * tol, t_grid[i + 1] - hi + 0.5 * tol});
                try {
                    ev.side_before = side_of_evolute(curve, ev.tau, o(lo - eta));
                    ev.side_after = side_of_evolute(curve, ev.tau, o(hi + eta));
                } catch (const DegenerateError&) {
                    ev.kind = EventKind::Degenerate;
                }
                const bool c_ok = ev.side_before == Side::Convex && ev.side_after == Side::Concave;
                const bool a_ok = ev.side_before == Side::Concave && ev.side_after == Side::Convex;
                ev.sides_agree = (ev.kind == EventKind::Creation && c_ok) || (ev.kind == EventKind::Annihilation && a_ok);
            }
            out.push_back(ev);
            lo = hi;
            nlo = nhi;
        }
    }
    return out;
}

int StepFunction::at(double s) const
{
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    return N[static_cast<std::size_t>(it - t.begin())];
}

StepFunction reconstruct_N(int N0, const std::vector<CrossingEvent>& events)
{
    StepFunction f;
    f.N.push_back(N0);
    double prev = -1e300;
    for (const auto& e : events) {
        if (e.t < prev) throw ConsistencyError("event log is not sorted by time");
        prev = e.t;
        if (e.kind == EventKind::Degenerate) continue;
        const int next = f.N.back() + (e.kind == EventKind::Creation ? 2 : -2);
        if (next < 2) throw ConsistencyError("event log drives N below 2 at t=" + fmt17(e.t));
        f.t.push_back(e.t);
        f.N.push_back(next);
    }
    return f;
}

std::vector<NormalLine> polygon_evolute(const Polygonization& poly)
{
    const Eigen::Index n = poly.size();
    const auto& V = poly.vertices;
    double area2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) area2 += cross2(V.col(i), V.col((i + 1) % n));
    const double orient = area2 >= 0 ? 1.0 : -1.0;

    std::vector<NormalLine> out;
    out.reserve(2 * static_cast<std::size_t>(poly.edge_count()));
    for (Eigen::Index j = 0; j < poly.edge_count(); ++j) {
        const Vec2 p = V.col(j), q = V.col((j + 1) % n);
        const Vec2 d = (q - p).normalized();
        const Vec2 outward = -orient * perp(d);
        out.push_back({p, outward, j, true});
        out.push_back({q, -outward, j, false});
    }
    return out;
}

int crossing_delta(const std::vector<NormalLine>& lines, const Vec2& q0, const Vec2& q1)
{
    int delta = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& L = lines[i];
        const double s0 = cross2(L.dir, q0 - L.point);
        const double s1 = cross2(L.dir, q1 - L.point);
        if (s0 == 0.0 || s1 == 0.0) throw NongenericError("normal line", static_cast<std::ptrdiff_t>(i));
        if (s0 < 0 && s1 > 0) delta += 2;
        else if (s0 > 0 && s1 < 0) delta -= 2;
    }
    return delta;
}

void write_event_log(std::ostream& os, const std::vector<CrossingEvent>& events)
{
    for (const auto& e : events) {
        const char* kind = e.kind == EventKind::Creation ? "C" : (e.kind == EventKind::Annihilation ? "A" : "degenerate");
        os << "{\"t\":" << fmt17(e.t) << ",\"tau\":" << fmt17(e.tau) << ",\"kind\":\"" << kind << "\"}\n";
    }
}

}  // namespace eqlab
