#include "eqlab/discretize.hpp"

#include "eqlab/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace eqlab {

double Polygonization::scale() const
{
    if (source) return source->scale();
    if (size() == 0) return 0.0;
    return (vertices.rowwise().maxCoeff() - vertices.rowwise().minCoeff()).norm();
}

Polygonization partition(const SmoothCurve& curve, int n, double offset)
{
    if (!curve.closed()) throw DomainError("partition needs a closed curve; use partition_window");
    if (n < 3) throw DomainError("partition too coarse: n must be at least 3");
    if (!(offset >= 0.0 && offset < 1.0)) throw DomainError("offset must lie in [0,1)");
    Polygonization p;
    p.delta = curve.period() / n;
    p.offset = offset;
    p.closed = true;
    p.source = std::make_shared<const SmoothCurve>(curve);
    p.vertices.resize(2, n);
    p.params.resize(n);
    p.indices.resize(n);
    for (int i = 0; i < n; ++i) {
        p.indices(i) = i + offset;
        p.params(i) = curve.lo() + p.indices(i) * p.delta;
        p.vertices.col(i) = curve.eval(p.params(i));
    }
    return p;
}

Polygonization partition_window(const SmoothCurve& curve, double delta, double offset, double lo, double hi)
{
    if (!(delta > 0)) throw DomainError("delta must be positive");
    if (!(hi > lo)) throw DomainError("empty parameter window");
    if (!curve.closed() && (lo < curve.lo() || hi > curve.hi()))
        throw DomainError("window exceeds the curve domain");
    const auto first = static_cast<long long>(std::ceil(lo / delta - offset));
    const auto last = static_cast<long long>(std::floor(hi / delta - offset));
    if (last - first < 2) throw DomainError("window holds fewer than 3 vertices");
    const Eigen::Index n = last - first + 1;
    Polygonization p;
    p.delta = delta;
    p.offset = offset;
    p.closed = false;
    p.source = std::make_shared<const SmoothCurve>(curve);
    p.vertices.resize(2, n);
    p.params.resize(n);
    p.indices.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p.indices(i) = static_cast<double>(first + i) + offset;
        p.params(i) = p.indices(i) * delta;
        p.vertices.col(i) = curve.eval(p.params(i));
    }
    return p;
}

Polygonization polygon(const Eigen::Matrix2Xd& points, bool closed)
{
    if (points.cols() < (closed ? 3 : 2)) throw DomainError("too few polygon vertices");
    Polygonization p;
    p.vertices = points;
    p.closed = closed;
    p.params = Eigen::VectorXd::LinSpaced(points.cols(), 0.0, static_cast<double>(points.cols() - 1));
    p.indices = p.params;
    p.delta = 1.0;
    return p;
}

namespace {

// Band for inner products (x - o).(y - x): relative to |x - o| times the segment length.
double local_tie(const Vec2& o, std::initializer_list<Vec2> pts)
{
    double s = 0.0, len = 0.0;
    const Vec2 first = *pts.begin();
    for (const auto& p : pts) {
        s = std::max(s, (p - o).norm());
        len = std::max(len, (p - first).norm());
    }
    return 1e-12 * s * len;
}

}  // namespace

EdgeEquilibrium edge_equilibrium(const Vec2& o, const Vec2& p, const Vec2& q, double tie)
{
    if ((q - p).squaredNorm() == 0.0) throw DomainError("edge endpoints coincide");
    if (tie < 0) tie = local_tie(o, {p, q});
    EdgeEquilibrium r;
    r.verdict = edge_test(o, p, q, tie);
    if (r.verdict == Verdict::Yes) r.foot = perpendicular_foot(o, p, q);
    return r;
}

Verdict vertex_equilibrium(const Vec2& o, const Vec2& prev, const Vec2& v, const Vec2& next, double tie)
{
    if (tie < 0) tie = local_tie(o, {prev, v, next});
    return vertex_test(o, prev, v, next, tie);
}

LocalEquilibriumSet count_local(const Polygonization& poly, const Vec2& o)
{
    const Eigen::Index n = poly.size();
    const double s = poly.scale();
    const auto& V = poly.vertices;
    LocalEquilibriumSet out;
    for (Eigen::Index e = 0; e < poly.edge_count(); ++e) {
        const Eigen::Index f = (e + 1) % n;
        const double tie = 1e-12 * s * (V.col(f) - V.col(e)).norm();
        const Verdict v = edge_test(o, V.col(e), V.col(f), tie);
        if (v == Verdict::Nongeneric) throw NongenericError("edge", e);
        if (v == Verdict::Yes) {
            out.stable_edges.push_back(e);
            out.feet.push_back(perpendicular_foot(o, V.col(e), V.col(f)));
        }
    }
    const Eigen::Index lo = poly.closed ? 0 : 1;
    const Eigen::Index hi = poly.closed ? n : n - 1;
    for (Eigen::Index i = lo; i < hi; ++i) {
        const Vec2 prev = V.col((i + n - 1) % n), next = V.col((i + 1) % n);
        const double tie = 1e-12 * s * std::max((prev - V.col(i)).norm(), (next - V.col(i)).norm());
        const Verdict v = vertex_test(o, prev, V.col(i), next, tie);
        if (v == Verdict::Nongeneric) throw NongenericError("vertex", i);
        if (v == Verdict::Yes) out.unstable_vertices.push_back(i);
    }
    return out;
}

std::vector<Flock> flocks(const LocalEquilibriumSet& eq, const Polygonization& poly)
{
    const Eigen::Index n = poly.size();
    const Eigen::Index total = poly.closed ? 2 * n : 2 * n - 1;
    const Eigen::Index gap = std::max<Eigen::Index>(3, n / 64);

    std::vector<Eigen::Index> marked;
    for (auto e : eq.stable_edges) marked.push_back(2 * e + 1);
    for (auto v : eq.unstable_vertices) marked.push_back(2 * v);
    std::sort(marked.begin(), marked.end());
    if (marked.empty()) return {};

    std::vector<std::vector<Eigen::Index>> runs{{marked.front()}};
    for (std::size_t i = 1; i < marked.size(); ++i) {
        if (marked[i] - marked[i - 1] - 1 > gap) runs.emplace_back();
        runs.back().push_back(marked[i]);
    }
    if (poly.closed && runs.size() > 1) {
        const Eigen::Index wrap_gap = runs.front().front() + total - runs.back().back() - 1;
        if (wrap_gap <= gap) {
            runs.back().insert(runs.back().end(), runs.front().begin(), runs.front().end());
            runs.erase(runs.begin());
        }
    }

    std::vector<Flock> out;
    for (const auto& run : runs) {
        Flock f;
        f.first = run.front();
        f.last = run.back();
        for (auto pos : run) {
            if (pos % 2 == 1) f.edges.push_back(pos / 2);
            else f.vertices.push_back(pos / 2);
        }
        out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end(), [](const Flock& a, const Flock& b) { return a.first < b.first; });
    return out;
}

ImaginaryIndex2D imaginary_index(double kappa, double rho)
{
    if (!(kappa < 0) || !(rho > 0)) throw DomainError("imaginary index needs kappa < 0 < rho");
    ImaginaryIndex2D r;
    r.kappa_rho = kappa * rho;
    r.lambda = std::abs(1.0 + r.kappa_rho);
    if (r.lambda < 1e-12) throw DegenerateError("reference point on the evolute (1 + kappa rho = 0)");
    r.S0 = 1.0 / r.lambda;
    r.U0 = std::abs(r.kappa_rho) / r.lambda;
    return r;
}

double random_mesh_expectation(double lambda, int n, MeshExponent e)
{
    if (!(lambda > 0)) throw DomainError("lambda must be positive");
    if (n < 2) throw DomainError("n must be at least 2");
    const double p = e == MeshExponent::NMinusOne ? n - 1 : n;
    return (1.0 - std::pow(1.0 + lambda, -p)) / lambda;
}

std::pair<int, int> grid_recover_1d(const std::vector<double>& x, bool periodic)
{
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    for (std::ptrdiff_t j = 0; j + 1 < n; ++j)
        if (x[j] == x[j + 1]) throw NongenericError("sample", j);
    if (periodic && n > 1 && x[n - 1] == x[0]) throw NongenericError("sample", n - 1);
    int mins = 0, maxs = 0;
    const std::ptrdiff_t lo = periodic ? 0 : 1, hi = periodic ? n : n - 1;
    for (std::ptrdiff_t j = lo; j < hi; ++j) {
        const double a = x[(j + n - 1) % n], b = x[j], c = x[(j + 1) % n];
        if (b < a && b < c) ++mins;
        if (b > a && b > c) ++maxs;
    }
    return {mins, maxs};
}

void write_local_csv(std::ostream& os, const LocalEquilibriumSet& eq, const Polygonization& poly)
{
    struct Row {
        Eigen::Index pos;
        bool edge;
        Eigen::Index index;
        Vec2 at;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < eq.stable_edges.size(); ++i)
        rows.push_back({2 * eq.stable_edges[i] + 1, true, eq.stable_edges[i], eq.feet[i]});
    for (auto v : eq.unstable_vertices) rows.push_back({2 * v, false, v, poly.vertices.col(v)});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.pos < b.pos; });
    os << "feature_type,index,x,y,stability\n";
    for (const auto& r : rows)
        os << (r.edge ? "edge" : "vertex") << ',' << r.index << ',' << fmt17(r.at.x()) << ',' << fmt17(r.at.y())
           << ',' << (r.edge ? 'S' : 'U') << '\n';
}

}  // namespace eqlab
