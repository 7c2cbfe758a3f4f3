#include "eqlab/events.hpp"
#include "eqlab/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace eqlab;

namespace {

std::vector<double> grid(int n)
{
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    return t;
}

// Generic evolute parameter of Ellipse(2, 1.5) away from the cusps.
double random_general_tau(std::mt19937_64& g)
{
    const double quarter = kPi / 2;
    return quarter * std::floor(4 * uniform01(g)) + quarter * (0.15 + 0.7 * uniform01(g));
}

}  // namespace

TEST_CASE("side_of_evolute: curve point, on-curve point, cusp")
{
    const auto e = SmoothCurve::ellipse(2, 1.5);
    auto g = substream(31, 0);
    for (int i = 0; i < 20; ++i) {
        const double t = random_general_tau(g);
        CHECK(side_of_evolute(e, t, e.eval(t)) == Side::Concave);
        CHECK(side_of_evolute(e, t, evolute(e, t)) == Side::OnCurve);
    }
    CHECK_THROWS_AS(side_of_evolute(e, 0.0, Vec2(0.5, 0.1)), DegenerateError);
}

TEST_CASE("evolute sides: N on the concave side is N on the convex side plus 2")
{
    const auto e = SmoothCurve::ellipse(2, 1.5);
    const auto E = build_evolute(e);
    auto g = substream(32, 0);
    int failures = 0;
    for (int i = 0; i < 50; ++i) {
        const double t = random_general_tau(g);
        const Vec2 P = evolute(e, t);
        const Vec2 n = e.eval(t, 1).normalized();  // curve tangent, along the evolute's normal
        Vec2 q = P + 1e-3 * n, qq = P - 1e-3 * n;
        if (side_of_evolute(E, t, q) == Side::Concave) std::swap(q, qq);
        REQUIRE(side_of_evolute(E, t, q) == Side::Convex);
        REQUIRE(side_of_evolute(E, t, qq) == Side::Concave);
        const int nq = oracle::normals_through(e, q), nqq = oracle::normals_through(e, qq);
        if (nqq != nq + 2) ++failures;
        CHECK(count_equilibria(e, q) == nq);
        CHECK(count_equilibria(e, qq) == nqq);
    }
    CHECK(failures == 0);
}

TEST_CASE("detect_crossings: leaving and entering the astroid, and no crossing")
{
    const auto e = SmoothCurve::ellipse(2, 1.5);
    auto family = [&](double) { return e; };
    const auto out = detect_crossings(family, [](double t) { return Vec2(1.2 * t, 0.01); }, grid(241));
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == EventKind::Annihilation);
    CHECK(out[0].n_before == 4);
    CHECK(out[0].n_after == 2);
    CHECK(out[0].sides_agree);

    const auto in = detect_crossings(family, [](double t) { return Vec2(1.2 * (1 - t), 0.01); }, grid(241));
    REQUIRE(in.size() == 1);
    CHECK(in[0].kind == EventKind::Creation);
    CHECK(std::abs(in[0].t - (1 - out[0].t)) < 1e-6);

    // Brute-force N on a fine grid brackets the same time.
    const double t_star = out[0].t;
    CHECK(oracle::normals_through(e, Vec2(1.2 * (t_star - 1e-4), 0.01)) == 4);
    CHECK(oracle::normals_through(e, Vec2(1.2 * (t_star + 1e-4), 0.01)) == 2);

    const auto none = detect_crossings(family, [](double t) { return Vec2(0.1 * t, 0.05); }, grid(50));
    CHECK(none.empty());
}

TEST_CASE("detect_crossings: exact axis through the cusp is degenerate")
{
    const auto e = SmoothCurve::ellipse(2, 1.5);
    const auto ev = detect_crossings([&](double) { return e; }, [](double t) { return Vec2(1.2 * t + 1e-7, 0.0); },
                                     grid(241));
    REQUIRE(!ev.empty());
    for (const auto& x : ev) CHECK(x.kind == EventKind::Degenerate);
}

TEST_CASE("detect_crossings + reconstruct_N reproduce brute-force N(t)")
{
    const auto e = SmoothCurve::ellipse(2, 1.5);
    PolylinePath path;
    path.t = {0.0, 0.5, 1.0};
    path.p = {Vec2(-1.0, 0.3), Vec2(0.2, -0.2), Vec2(1.1, 0.25)};
    const auto ev = detect_crossings([&](double) { return e; }, path, grid(401));
    const int n0 = oracle::normals_through(e, path(0.0));
    const auto N = reconstruct_N(n0, ev);
    for (const auto& x : ev) {
        CHECK(x.sides_agree);
        const int jump = x.n_after - x.n_before;
        CHECK(jump == (x.kind == EventKind::Creation ? 2 : -2));
    }
    for (int i = 0; i <= 200; ++i) {
        const double t = (i + 0.5) / 201.0;
        bool near = false;
        for (const auto& x : ev) near = near || std::abs(x.t - t) < 1e-6;
        if (near) continue;
        CHECK(N.at(t) == oracle::normals_through(e, path(t)));
    }
}

TEST_CASE("reconstruct_N examples and errors")
{
    CHECK(reconstruct_N(4, {}).at(0.7) == 4);
    std::vector<CrossingEvent> five;
    for (int i = 0; i < 5; ++i) {
        CrossingEvent c;
        c.t = i;
        c.kind = EventKind::Annihilation;
        five.push_back(c);
    }
    CHECK(reconstruct_N(14, five).N.back() == 4);
    CrossingEvent up, down;
    up.t = 1;
    up.kind = EventKind::Creation;
    down.t = 2;
    down.kind = EventKind::Annihilation;
    const auto f = reconstruct_N(2, {up, down});
    CHECK(f.at(0.5) == 2);
    CHECK(f.at(1.5) == 4);
    CHECK(f.at(2.5) == 2);
    CHECK_THROWS_AS(reconstruct_N(2, {down}), ConsistencyError);
    CHECK_THROWS_AS(reconstruct_N(6, {down, up}), ConsistencyError);
}

TEST_CASE("polygon evolute: regular polygon center and crossing consistency")
{
    const int n = 9;
    const auto poly = partition(SmoothCurve::ellipse(1, 1), n, 0.2);
    CHECK(count_local(poly, Vec2(1e-9, -2e-9)).N() == 2 * n);

    const auto e = SmoothCurve::ellipse(2, 1.5);
    const auto P = partition(e, 60, 0.37);
    const auto lines = polygon_evolute(P);
    CHECK(lines.size() == 120);
    auto g = substream(33, 0);
    for (int i = 0; i < 100; ++i) {
        const Vec2 q0(1.2 * (2 * uniform01(g) - 1), 0.8 * (2 * uniform01(g) - 1));
        const Vec2 q1(1.2 * (2 * uniform01(g) - 1), 0.8 * (2 * uniform01(g) - 1));
        const long d = static_cast<long>(count_local(P, q1).N()) - static_cast<long>(count_local(P, q0).N());
        CHECK(crossing_delta(lines, q0, q1) == d);
    }
}

TEST_CASE("polygon evolute: one normal line crossed right to left adds an edge and a vertex")
{
    Eigen::Matrix2Xd quad(2, 4);
    quad << 0, 4, 3, 1, 0, 0, 2, 2;
    const auto P = polygon(quad);
    const auto lines = polygon_evolute(P);
    // Normal of the slanted edge (4,0)-(3,2) through (3,2); it runs through the interior.
    const auto& L = lines[3];
    REQUIRE(L.edge == 1);
    const Vec2 mid = L.point + 0.5 * L.dir;
    const Vec2 left = mid + 0.05 * perp(L.dir), right = mid - 0.05 * perp(L.dir);
    CHECK(crossing_delta(lines, right, left) == 2);
    CHECK(static_cast<long>(count_local(P, left).N()) - static_cast<long>(count_local(P, right).N()) == 2);
}

TEST_CASE("event log format")
{
    CrossingEvent c;
    c.t = 0.25;
    c.tau = 1.5;
    c.kind = EventKind::Annihilation;
    std::ostringstream os;
    write_event_log(os, {c});
    CHECK(os.str() == "{\"t\":0.25,\"tau\":1.5,\"kind\":\"A\"}\n");
}
