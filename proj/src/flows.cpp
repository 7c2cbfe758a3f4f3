#include "eqlab/flows.hpp"

#include "eqlab/discretize.hpp"
#include "eqlab/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace eqlab {

double polygon_area(const Eigen::Matrix2Xd& p)
{
    const Eigen::Index n = p.cols();
    double a = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) a += cross2(p.col(i), p.col((i + 1) % n));
    return 0.5 * a;
}

double polygon_perimeter(const Eigen::Matrix2Xd& p)
{
    const Eigen::Index n = p.cols();
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += (p.col((i + 1) % n) - p.col(i)).norm();
    return s;
}

Vec2 lamina_centroid(const Eigen::Matrix2Xd& p)
{
    // Shoelace centroid relative to the first vertex for conditioning.
    const Eigen::Index n = p.cols();
    const Vec2 base = p.col(0);
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec2 u = p.col(i) - base, v = p.col((i + 1) % n) - base;
        const double w = cross2(u, v);
        a += w;
        c += w * (u + v);
    }
    if (std::abs(a) == 0.0) throw DegenerateError("polygon has zero area");
    return base + c / (3.0 * a);
}

double isoperimetric_ratio(const Eigen::Matrix2Xd& p)
{
    const double P = polygon_perimeter(p);
    return P * P / (4.0 * kPi * std::abs(polygon_area(p)));
}

Eigen::Matrix2Xd resample_arclength(const Eigen::Matrix2Xd& p, int n)
{
    const Eigen::Index m = p.cols();
    std::vector<double> cum(m + 1, 0.0);
    for (Eigen::Index i = 0; i < m; ++i) cum[i + 1] = cum[i] + (p.col((i + 1) % m) - p.col(i)).norm();
    const double total = cum[m];
    Eigen::Matrix2Xd out(2, n);
    Eigen::Index k = 0;
    for (int j = 0; j < n; ++j) {
        const double s = total * j / n;
        while (k + 1 < m && cum[k + 1] <= s) ++k;
        const double len = cum[k + 1] - cum[k];
        const double w = len > 0 ? (s - cum[k]) / len : 0.0;
        out.col(j) = (1.0 - w) * p.col(k) + w * p.col((k + 1) % m);
    }
    return out;
}

Eigen::VectorXd tangent_angles(const Eigen::Matrix2Xd& p)
{
    const Eigen::Index n = p.cols();
    Eigen::VectorXd a(n);
    Vec2 prev = p.col(1 % n) - p.col(0);
    a(0) = std::atan2(prev.y(), prev.x());
    for (Eigen::Index i = 1; i < n; ++i) {
        const Vec2 e = p.col((i + 1) % n) - p.col(i);
        a(i) = a(i - 1) + std::atan2(cross2(prev, e), prev.dot(e));
        prev = e;
    }
    return a;
}

namespace {

Eigen::Matrix2Xd normalize_about_centroid(const Eigen::Matrix2Xd& p, double& factor)
{
    const Vec2 c = lamina_centroid(p);
    factor = 1.0 / polygon_perimeter(p);
    return ((p.colwise() - c) * factor).colwise() + c;
}

}  // namespace

FlowState make_flow_state(const Eigen::Matrix2Xd& polygon, int n, double c)
{
    if (n < 8) throw DomainError("flow resolution too coarse");
    if (!(c > 0)) throw DomainError("flow coefficient must be positive");
    Eigen::Matrix2Xd p = polygon;
    if (polygon_area(p) < 0) p = p.rowwise().reverse().eval();
    FlowState s;
    double f = 1.0;
    const Eigen::Matrix2Xd q = resample_arclength(p, n);
    const Vec2 cen = lamina_centroid(q);
    s.vertices = normalize_about_centroid(q.colwise() - cen, f);
    s.scale = 1.0 / f;
    s.alpha = tangent_angles(s.vertices);
    s.c = c;
    return s;
}

FlowState make_flow_state(const SmoothCurve& curve, int n, double c)
{
    if (!curve.closed()) throw DomainError("flows need a closed curve");
    const int m = 32 * n;
    Eigen::Matrix2Xd dense(2, m);
    for (int i = 0; i < m; ++i) dense.col(i) = curve.eval(curve.lo() + curve.period() * i / m);
    return make_flow_state(dense, n, c);
}

double stable_dt(const FlowState& s)
{
    const double ds = polygon_perimeter(s.vertices) / static_cast<double>(s.vertices.cols());
    return ds * ds / (2.0 * s.c);
}

FlowState csf_step(const FlowState& s, double dt)
{
    const Eigen::Index n = s.vertices.cols();
    const double bound = stable_dt(s);
    if (dt > bound * (1.0 + 1e-12))
        throw StabilityError("dt " + fmt17(dt) + " exceeds the explicit stability bound", 0.5 * bound);
    const double ds = polygon_perimeter(s.vertices) / static_cast<double>(n);
    const double nu = s.c * dt / (ds * ds);

    const Eigen::VectorXd& a = s.alpha;
    Eigen::VectorXd an(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double prev = i == 0 ? a(n - 1) - kTwoPi : a(i - 1);
        const double next = i == n - 1 ? a(0) + kTwoPi : a(i + 1);
        an(i) = a(i) + nu * (next - 2.0 * a(i) + prev);
    }

    // Perimeter loses c dt sum(kappa^2 ds); kappa_i = (a_i - a_(i-1)) / ds at vertex i.
    const auto& P = s.vertices;
    double k2 = 0.0;
    Vec2 shift = Vec2::Zero();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double prev = i == 0 ? a(n - 1) - kTwoPi : a(i - 1);
        const double turn = a(i) - prev, mid = 0.5 * (a(i) + prev);
        k2 += turn * turn / ds;
        shift += s.c * dt * (turn / ds) * perp(Vec2(std::cos(mid), std::sin(mid)));
    }
    const double ds_new = ds - s.c * dt * k2 / static_cast<double>(n);
    if (!(ds_new > 0)) throw StabilityError("step removes the whole perimeter", 0.5 * dt);

    // Integrate e(alpha), spread the closure defect, and place the vertex mean at the
    // old mean plus the mean curvature displacement.
    Eigen::Matrix2Xd e(2, n);
    for (Eigen::Index i = 0; i < n; ++i) e.col(i) = ds_new * Vec2(std::cos(an(i)), std::sin(an(i)));
    const Vec2 defect = e.rowwise().sum() / static_cast<double>(n);
    e.colwise() -= defect;
    Eigen::Matrix2Xd q(2, n);
    q.col(0) = Vec2::Zero();
    for (Eigen::Index i = 1; i < n; ++i) q.col(i) = q.col(i - 1) + e.col(i - 1);
    const Vec2 target = P.rowwise().mean() + shift / static_cast<double>(n);
    q.colwise() += target - Vec2(q.rowwise().mean());

    FlowState out;
    double f = 1.0;
    out.vertices = normalize_about_centroid(resample_arclength(q, static_cast<int>(n)), f);
    out.alpha = tangent_angles(out.vertices);
    out.c = s.c;
    out.t = s.t + dt;
    out.t_unscaled = s.t_unscaled + dt * s.scale * s.scale;
    out.scale = s.scale / f;
    return out;
}

Eigen::Matrix2Xd erode(const Eigen::Matrix2Xd& polygon, double d)
{
    Eigen::Matrix2Xd P = polygon;
    if (polygon_area(P) < 0) P = P.rowwise().reverse().eval();
    const Eigen::Index m = P.cols();
    const double scale = (P.rowwise().maxCoeff() - P.rowwise().minCoeff()).norm();

    std::vector<Vec2> nrm;
    std::vector<double> h;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Vec2 e = P.col((i + 1) % m) - P.col(i);
        if (e.norm() <= 1e-14 * scale) continue;
        const Vec2 out = -perp(e.normalized());
        nrm.push_back(out);
        h.push_back(out.dot(P.col(i)) - d);
    }

    std::vector<int> alive(nrm.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = static_cast<int>(i);

    auto meet = [&](int a, int b) -> Vec2 {
        Eigen::Matrix2d A;
        A << nrm[a].x(), nrm[a].y(), nrm[b].x(), nrm[b].y();
        return A.inverse() * Vec2(h[a], h[b]);
    };

    std::vector<Vec2> X;
    while (true) {
        const std::size_t k = alive.size();
        if (k < 3) throw DomainError("erosion depth reaches the inradius: shape vanishes");
        for (std::size_t i = 0; i < k; ++i)
            if (cross2(nrm[alive[i]], nrm[alive[(i + 1) % k]]) <= 0.0)
                throw DomainError("erosion depth reaches the inradius: shape vanishes");
        X.assign(k, Vec2::Zero());
        for (std::size_t i = 0; i < k; ++i) X[i] = meet(alive[i], alive[(i + 1) % k]);
        // Edge of line alive[i] runs from X[i-1] to X[i].
        double worst = 0.0;
        std::size_t at = k;
        for (std::size_t i = 0; i < k; ++i) {
            const Vec2 t = perp(nrm[alive[i]]);
            const double len = t.dot(X[i] - X[(i + k - 1) % k]);
            if (len <= 1e-12 * scale && len - 1e-12 * scale < worst) {
                worst = len - 1e-12 * scale;
                at = i;
            }
        }
        if (at == k) break;
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(at));
    }

    Eigen::Matrix2Xd out(2, X.size());
    for (std::size_t i = 0; i < X.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = X[i];
    if (polygon_area(out) <= 0) throw DomainError("erosion depth reaches the inradius: shape vanishes");
    return out;
}

EikonalStep eikonal_step(const Eigen::Matrix2Xd& polygon, double dt)
{
    if (!(dt > 0)) throw DomainError("dt must be positive");
    EikonalStep r;
    const Eigen::Matrix2Xd q = erode(polygon, dt);
    r.elapsed = dt;
    r.polygon = normalize_about_centroid(q, r.factor);
    return r;
}

Eigen::VectorXd eikonal_polar_rate(const Eigen::VectorXd& r)
{
    const Eigen::Index n = r.size();
    const double h = kTwoPi / static_cast<double>(n);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rp = (r((i + 1) % n) - r((i + n - 1) % n)) / (2.0 * h);
        out(i) = -std::sqrt(r(i) * r(i) + rp * rp) / r(i);
    }
    return out;
}

std::pair<int, int> vertex_distance_extrema(const Eigen::Matrix2Xd& p, const Vec2& o)
{
    std::vector<double> d(static_cast<std::size_t>(p.cols()));
    for (Eigen::Index i = 0; i < p.cols(); ++i) d[static_cast<std::size_t>(i)] = (p.col(i) - o).norm();
    return grid_recover_1d(d, true);
}

namespace {

SeriesRow measure(const Eigen::Matrix2Xd& verts, const FlowParams& p)
{
    SeriesRow row;
    Vec2 o = lamina_centroid(verts);
    const double scale = (verts.rowwise().maxCoeff() - verts.rowwise().minCoeff()).norm();

    for (int attempt = 0;; ++attempt) {
        try {
            const auto [mins, maxs] = vertex_distance_extrema(verts, o);
            row.S = mins;
            row.U = maxs;
            row.N = mins + maxs;
            LocalEquilibriumSet eq;
            if (p.kind == FlowKind::CSF && p.mesh_n > 0) {
                const SmoothCurve c = SmoothCurve::spline(verts);
                eq = count_local(partition(c, p.mesh_n, std::fmod(p.mesh_offset + 1e-6 * attempt, 1.0)), o);
            } else {
                eq = count_local(polygon(verts), o);
            }
            row.S_delta = static_cast<long>(eq.S());
            row.U_delta = static_cast<long>(eq.U());
            row.N_delta = static_cast<long>(eq.N());
            return row;
        } catch (const NongenericError&) {
            if (attempt >= 8) throw;
            o += Vec2(1e-9, 0.7e-9) * scale;
        }
    }
}

}  // namespace

CoEvolutionSeries run_flow(const SmoothCurve& initial, const FlowParams& p)
{
    CoEvolutionSeries series;
    FlowState s = make_flow_state(initial, p.n, p.c);
    const double ds = 1.0 / p.n;
    double dt = p.dt;
    if (dt <= 0) dt = p.kind == FlowKind::CSF ? 0.25 * ds * ds / p.c : 0.002;

    Eigen::Matrix2Xd verts = s.vertices;
    double t = 0.0, tu = 0.0, scale = s.scale;

    auto record = [&]() {
        SeriesRow row = measure(verts, p);
        row.t = t;
        row.t_unscaled = tu;
        if (!series.rows.empty()) {
            const int jump = row.N - series.rows.back().N;
            if (jump < 0) {
                row.event = 'A';
                row.event_count = -jump / 2;
                series.annihilations += row.event_count;
            } else if (jump > 0) {
                row.event = 'C';
                row.event_count = jump / 2;
                series.creations += row.event_count;
            }
        }
        series.rows.push_back(row);
        return row.N;
    };

    if (record() <= p.stop_N) {
        series.reached_stop = true;
        return series;
    }
    for (int step = 0; step < p.steps; ++step) {
        if (p.kind == FlowKind::CSF) {
            s = csf_step(s, dt);
            const Eigen::VectorXd& a = s.alpha;
            for (Eigen::Index i = 0; i + 1 < a.size(); ++i)
                if (!(a(i + 1) > a(i))) throw DegenerateError("curve-shortening state lost convexity");
            verts = s.vertices;
            t = s.t;
            tu = s.t_unscaled;
        } else {
            const EikonalStep e = eikonal_step(verts, dt);
            verts = e.polygon;
            t += dt;
            tu += dt * scale;
            scale /= e.factor;
        }
        if (record() <= p.stop_N) {
            series.reached_stop = true;
            break;
        }
    }
    return series;
}

namespace {

double median_of(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<SpikeReport> annihilation_spikes(const CoEvolutionSeries& s, double window, double trail)
{
    std::vector<SpikeReport> out;
    if (s.rows.empty()) return out;
    const double T = s.rows.back().t - s.rows.front().t;
    for (const auto& ev : s.rows) {
        if (ev.event != 'A') continue;
        SpikeReport r;
        r.t_event = ev.t;
        std::vector<double> trailing;
        for (const auto& row : s.rows) {
            if (row.t > ev.t) break;
            if (row.t >= ev.t - window * T) r.peak = std::max(r.peak, static_cast<double>(row.N_delta));
            if (row.t >= ev.t - trail * T) trailing.push_back(static_cast<double>(row.N_delta));
        }
        r.median = median_of(trailing);
        r.ratio = r.median > 0 ? r.peak / r.median : 0.0;
        for (int k = 0; k < ev.event_count; ++k) out.push_back(r);
    }
    return out;
}

double max_spike_ratio(const CoEvolutionSeries& s, double trail)
{
    if (s.rows.empty()) return 0.0;
    const double T = s.rows.back().t - s.rows.front().t;
    double best = 0.0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        while (s.rows[start].t < s.rows[i].t - trail * T) ++start;
        std::vector<double> w;
        for (std::size_t j = start; j <= i; ++j) w.push_back(static_cast<double>(s.rows[j].N_delta));
        const double med = median_of(w);
        if (med > 0) best = std::max(best, static_cast<double>(s.rows[i].N_delta) / med);
    }
    return best;
}

void write_series_csv(std::ostream& os, const CoEvolutionSeries& s)
{
    os << "t,N,S_global,U_global,N_delta,S_delta,U_delta,event,t_unscaled\n";
    for (const auto& r : s.rows)
        os << fmt17(r.t) << ',' << r.N << ',' << r.S << ',' << r.U << ',' << r.N_delta << ',' << r.S_delta << ','
           << r.U_delta << ',' << r.event << ',' << fmt17(r.t_unscaled) << '\n';
}

}  // namespace eqlab
