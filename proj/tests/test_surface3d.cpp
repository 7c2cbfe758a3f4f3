#include "eqlab/mesh.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/surface.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace eqlab;

namespace {

Vec3 random_interior(const TriMesh& m, std::mt19937_64& g)
{
    const Vec3 lo = m.vertices().rowwise().minCoeff(), hi = m.vertices().rowwise().maxCoeff();
    for (;;) {
        const Vec3 p = lo + Vec3(uniform01(g), uniform01(g), uniform01(g)).cwiseProduct(hi - lo);
        if (m.contains(p, 1e-3)) return p;
    }
}

}  // namespace

TEST_CASE("mesh: tetrahedron OFF, cube OBJ with quads, round trip")
{
    std::istringstream off("OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n");
    const auto t = read_off(off);
    CHECK(t.num_vertices() == 4);
    CHECK(t.num_edges() == 6);
    CHECK(t.num_faces() == 4);

    std::istringstream obj("# cube\nv -1 -1 -1\nv 1 -1 -1\nv 1 1 -1\nv -1 1 -1\nv -1 -1 1\nv 1 -1 1\nv 1 1 1\nv -1 1 1\n"
                           "f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n");
    const auto c = read_obj(obj);
    CHECK(c.num_faces() == 12);
    CHECK(c.num_edges() == 18);
    CHECK(c.centroid().norm() < 1e-15);
    CHECK(c.volume() == doctest::Approx(8.0));

    std::ostringstream os;
    write_off(os, c);
    std::istringstream back(os.str());
    const auto c2 = read_off(back);
    CHECK(c2.vertices().isApprox(c.vertices()));
    CHECK(c2.num_faces() == 12);
    std::ostringstream oo;
    write_obj(oo, t);
    std::istringstream tb(oo.str());
    CHECK(read_obj(tb).num_faces() == 4);
}

TEST_CASE("mesh: validation errors")
{
    std::istringstream open("OFF\n4 3 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n");
    CHECK_THROWS_AS(read_off(open), MeshError);
    std::istringstream bad("OFX\n");
    CHECK_THROWS_AS(read_off(bad), MeshError);
    // A dented octahedron: one apex pushed inside.
    std::istringstream dent("OFF\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -0.1\n"
                            "3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n");
    CHECK_NOTHROW(read_off(dent));
    std::istringstream dent2("OFF\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 0.1\n"
                             "3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n");
    CHECK_THROWS_AS(read_off(dent2), MeshError);
    CHECK_THROWS_AS(load_mesh("/nonexistent/file.off"), MeshError);
    CHECK_THROWS_AS(load_mesh("mesh.stl"), MeshError);
}

TEST_CASE("solid_centroid: cube, translation covariance, ellipsoid symmetry")
{
    CHECK(cube_mesh().centroid().norm() < 1e-15);
    CHECK((cube_mesh(1.0, Vec3(1, 2, 3)).centroid() - Vec3(1, 2, 3)).norm() < 1e-14);
    const auto e = ellipsoid_mesh(2, 1.5, 1, 20);
    CHECK(e.centroid().norm() < 1e-3);
    const auto& V = e.vertices();
    const auto& F = e.faces();
    const Eigen::Matrix3Xd shifted = V.colwise() + Vec3(0.5, -0.25, 2.0);
    CHECK((solid_centroid(shifted, F) - solid_centroid(V, F) - Vec3(0.5, -0.25, 2.0)).norm() < 1e-12);
    Eigen::Matrix3Xd flat = Eigen::Matrix3Xd::Zero(3, 4);
    flat.col(1) = Vec3(1, 0, 0);
    flat.col(2) = Vec3(0, 1, 0);
    flat.col(3) = Vec3(1, 1, 0);
    Eigen::Matrix3Xi ff(3, 4);
    ff << 0, 0, 0, 1, 1, 2, 3, 3, 2, 3, 1, 2;
    CHECK_THROWS_AS(solid_centroid(flat, ff), DegenerateError);
}

TEST_CASE("icosphere and ellipsoid mesh sizes")
{
    const auto s = icosphere(4);
    CHECK(s.num_faces() == 320);
    CHECK(s.num_vertices() == 162);
    CHECK(icosphere_frequency_for(51108) == 51);
    const auto m = parse_mesh("ellipsoid:2,1.5,1,2000");
    CHECK(m.num_vertices() - m.num_edges() + m.num_faces() == 2);
    CHECK(m.vertices().row(0).maxCoeff() <= 2.0 + 1e-12);
    CHECK(m.vertices().row(2).maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("classify_equilibria: cube and tetrahedron about the centroid")
{
    const auto c = cube_mesh();
    const auto e = classify_equilibria(c, Vec3(1e-3, 2e-3, -3e-3));
    CHECK(e.S() == 6);
    CHECK(e.H() == 12);
    CHECK(e.U() == 8);
    CHECK(e.euler() == 2);

    const auto t = tetrahedron_mesh();
    const auto f = classify_equilibria(t, t.centroid());
    CHECK(f.S() == 4);
    CHECK(f.H() == 6);
    CHECK(f.U() == 4);
}

TEST_CASE("classify_equilibria: face feet lie in their faces and on the normal")
{
    const auto m = ellipsoid_mesh(2, 1.5, 1, 8);
    const Vec3 o(0.1, 0.05, -0.02);
    const auto eq = classify_equilibria(m, o);
    for (std::size_t k = 0; k < eq.stable_faces.size(); ++k) {
        const Vec3 n = m.face_normals().col(eq.stable_faces[k]);
        CHECK((eq.face_feet[k] - o).cross(n).norm() < 1e-12);
    }
}

TEST_CASE("classify_equilibria: ring oracle on meshes up to 1000 faces")
{
    auto g = substream(61, 0);
    std::vector<TriMesh> meshes{cube_mesh(), tetrahedron_mesh(), octahedron_mesh(), icosphere(3, generic_rotation()),
                                ellipsoid_mesh(2, 1.5, 1, 5), ellipsoid_mesh(1.3, 1.1, 0.7, 7)};
    for (const auto& m : meshes) {
        REQUIRE(m.num_faces() <= 1000);
        for (int i = 0; i < 20; ++i) {
            const Vec3 o = random_interior(m, g);
            const auto eq = classify_equilibria(m, o);
            const auto ref = oracle::ring_oracle(m, o);
            CHECK(eq.S() == ref.S);
            CHECK(eq.H() == ref.H);
            CHECK(eq.U() == ref.U);
            CHECK(ref.vertex_saddles == 0);
        }
    }
}

TEST_CASE("Poincare-Hopf: 1000 random interior points per mesh")
{
    auto g = substream(62, 0);
    std::vector<TriMesh> meshes{cube_mesh(), tetrahedron_mesh(), ellipsoid_mesh(2, 1.5, 1, 12)};
    int failures = 0;
    for (const auto& m : meshes)
        for (int i = 0; i < 1000; ++i)
            if (classify_equilibria(m, random_interior(m, g), 2).euler() != 2) ++failures;
    CHECK(failures == 0);
}

TEST_CASE("classify_equilibria: thread count does not change the result")
{
    const auto m = ellipsoid_mesh(2, 1.5, 1, 30);
    const Vec3 o(0.3, -0.1, 0.05);
    const auto a = classify_equilibria(m, o, 1), b = classify_equilibria(m, o, 7);
    CHECK(a.stable_faces == b.stable_faces);
    CHECK(a.saddle_edges == b.saddle_edges);
    CHECK(a.unstable_vertices == b.unstable_vertices);
}

TEST_CASE("imaginary_index_3d: examples and index identity")
{
    const auto a = imaginary_index_3d(-0.5, -0.5, 1.0);
    CHECK(a.d == doctest::Approx(4));
    CHECK(a.S0 == doctest::Approx(4));
    CHECK(a.U0 == doctest::Approx(1));
    CHECK(a.H0 == doctest::Approx(4));
    const auto b = imaginary_index_3d(-0.5, -2.0, 1.0);
    CHECK(b.d == doctest::Approx(2));
    CHECK(b.S0 + b.U0 - b.H0 == doctest::Approx(-1));
    const auto c = imaginary_index_3d(-2.0, -2.0, 1.0);
    CHECK(c.S0 == doctest::Approx(1));
    CHECK(c.U0 == doctest::Approx(4));
    CHECK(c.H0 == doctest::Approx(4));
    CHECK_THROWS_AS(imaginary_index_3d(-1.0, -0.5, 1.0), DegenerateError);
    CHECK_THROWS_AS(imaginary_index_3d(0.5, -0.5, 1.0), DomainError);

    auto g = substream(63, 0);
    int bad = 0;
    for (int i = 0; i < 100000; ++i) {
        const double k1 = -4 * uniform01(g), k2 = -4 * uniform01(g);
        const double f = (1 + k1) * (1 + k2);
        if (std::abs(f) < 1e-6) continue;
        const auto r = imaginary_index_3d(k1, k2, 1.0);
        if (std::abs(r.S0 + r.U0 - r.H0 - (f > 0 ? 1.0 : -1.0)) > 1e-9) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("hull_diagonal agrees with the 5-point hull brute force")
{
    auto g = substream(64, 0);
    int checked = 0;
    for (int i = 0; i < 20000; ++i) {
        auto r = [&] { return 2 * uniform01(g) - 1; };
        const Vec3 o(r(), r(), r() - 2.0);
        const Vec3 p00(r(), r(), 0.3 * r()), p10(1 + r() * 0.5, r(), 0.3 * r()), p11(1 + 0.5 * r(), 1 + 0.5 * r(), 0.3 * r()),
            p01(r(), 1 + 0.5 * r(), 0.3 * r());
        try {
            CHECK(hull_diagonal(o, p00, p10, p11, p01) == oracle::hull_edge_brute(o, p00, p10, p11, p01));
            ++checked;
        } catch (const NongenericError&) {
        }
    }
    CHECK(checked > 19000);

    // Bent quad: exactly one diagonal is a hull edge; a flat one is a tie.
    const Vec3 o(0.2, 0.3, -1.0);
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(1.2, 1.1, 0.1), d(0, 1, 0);
    CHECK(hull_diagonal(o, a, b, c, d) != hull_diagonal(o, b, c, d, a));
    CHECK_THROWS_AS(hull_diagonal(o, a, b, Vec3(1.2, 1.1, 0), d), NongenericError);
}

TEST_CASE("grid_surface: ellipsoid octant patch")
{
    const Ellipsoid el{2, 1.5, 1};
    // Latitude-longitude quads are planar on an ellipsoid; a shear in latitude bends them.
    const SurfaceMap r = [&](double u, double v) {
        const double w = u + 0.2 * u * std::sin(3 * v);
        return Vec3(el.a * std::cos(w) * std::cos(v), el.b * std::cos(w) * std::sin(v), el.c * std::sin(w));
    };
    const Vec3 o(0.1, 0.2, 0.05);
    const auto p = grid_surface(r, 0.01, kPi / 2 - 0.01, 0.01, kPi / 2 - 0.01, 50, o);
    CHECK(p.vertices.cols() == 51 * 51);
    CHECK(p.faces.cols() == 2 * 50 * 50);
    for (int i = 0; i < 50; i += 7)
        for (int j = 0; j < 50; j += 11) {
            const auto V = [&](int a, int b) { return Vec3(p.vertices.col(a * 51 + b)); };
            const bool main = p.main_diagonal[static_cast<std::size_t>(i * 50 + j)];
            CHECK(main == oracle::hull_edge_brute(o, V(i, j), V(i + 1, j), V(i + 1, j + 1), V(i, j + 1)));
        }
    CHECK_THROWS_AS(grid_surface(r, 0, 1, 0, 1, 0, o), DomainError);
}

TEST_CASE("grid_stationary: paraboloid, saddle, brute force, r doubling")
{
    const int n = 101;
    Eigen::MatrixXd bowl(n, n), saddle(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -1 + 2.0 * i / (n - 1) + 1e-3, y = -1 + 2.0 * j / (n - 1) + 2e-3;
            bowl(i, j) = x * x + 1.1 * y * y;
            saddle(i, j) = x * x - 1.1 * y * y;
        }
    const auto b = grid_stationary(bowl, 3);
    CHECK(b.minima.size() == 1);
    CHECK(b.maxima.empty());
    CHECK(std::abs(b.minima[0].i - 50) <= 1);
    const auto s = grid_stationary(saddle, 3);
    CHECK(s.minima.empty());
    CHECK(s.maxima.empty());
    bool near_origin = false;
    for (const auto& q : s.stationary) near_origin = near_origin || (std::abs(q.i - 50) <= 2 && std::abs(q.j - 50) <= 2);
    CHECK(near_origin);

    auto g = substream(65, 0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd f(60, 60);
        std::vector<std::array<double, 4>> bumps;
        for (int k = 0; k < 6; ++k) bumps.push_back({uniform01(g), uniform01(g), 2 * uniform01(g) - 1, 0.05 + 0.1 * uniform01(g)});
        for (int i = 0; i < 60; ++i)
            for (int j = 0; j < 60; ++j) {
                const double x = i / 59.0, y = j / 59.0;
                double v = 0.01 * x + 0.013 * y;
                for (const auto& q : bumps)
                    v += q[2] * std::exp(-((x - q[0]) * (x - q[0]) + (y - q[1]) * (y - q[1])) / (q[3] * q[3]));
                f(i, j) = v;
            }
        for (int r : {2, 3, 5}) {
            const auto got = grid_stationary(f, r);
            const auto ref = oracle::grid_extrema_brute(f, r);
            CHECK(static_cast<int>(got.minima.size()) == ref.first);
            CHECK(static_cast<int>(got.maxima.size()) == ref.second);
        }
    }

    Eigen::MatrixXd tie = Eigen::MatrixXd::Zero(10, 10);
    CHECK_THROWS_AS(grid_stationary(tie, 2), NongenericError);
    CHECK_THROWS_AS(grid_stationary(bowl, 0), DomainError);
}

TEST_CASE("grid_stationary_stable: counts stop changing when r doubles")
{
    const int n = 400;
    Eigen::MatrixXd f(n / 2, n);
    const Ellipsoid e{2, 1.5, 1};
    const Vec3 o(0.31, 0.17, 0.05);
    for (int i = 0; i < n / 2; ++i)
        for (int j = 0; j < n; ++j) {
            const double lat = -1.3 + 2.6 * (i + 0.31) / (n / 2), lon = kTwoPi * (j + 0.27) / n;
            const Vec3 x(e.a * std::cos(lat) * std::cos(lon), e.b * std::cos(lat) * std::sin(lon), e.c * std::sin(lat));
            f(i, j) = (x - o).squaredNorm();
        }
    const auto st = grid_stationary_stable(f, 5, 40, true);
    const auto twice = grid_stationary(f, 2 * st.r, true);
    CHECK(twice.minima.size() == st.minima.size());
    CHECK(twice.maxima.size() == st.maxima.size());
}

TEST_CASE("ellipsoid: grid counts agree with the Lagrange oracle")
{
    const Ellipsoid e{2, 1.5, 1};
    for (const Vec3& o : {Vec3(0.3, 0.013, 0.021), Vec3(1.0, 0.013, 0.021), Vec3(1.7, 0.013, 0.021), Vec3(0.2, 0.4, -0.1)}) {
        const auto sm = ellipsoid_equilibria(e, o);
        int S = 0, H = 0, U = 0;
        for (const auto& q : sm) {
            (q.type == 0 ? S : q.type == 1 ? H : U) += 1;
            const Vec3 x = q.position;
            CHECK(std::pow(x.x() / e.a, 2) + std::pow(x.y() / e.b, 2) + std::pow(x.z() / e.c, 2) == doctest::Approx(1.0));
        }
        CHECK(S + U - H == 2);
        const auto gc = ellipsoid_grid_counts(e, o, 400);
        CHECK(gc.S == S);
        CHECK(gc.U == U);
        CHECK(gc.H == H);
    }
    CHECK_THROWS_AS(ellipsoid_equilibria(e, Vec3(0.1, 0.0, 0.2)), DomainError);
}

TEST_CASE("ellipsoid umbilic caustic point")
{
    const Vec3 v = ellipsoid_umbilic_caustic({2, 1.5, 1});
    CHECK(v.norm() == doctest::Approx(1.0477).epsilon(1e-4));
    CHECK(v.y() == 0.0);
    CHECK_THROWS_AS(ellipsoid_umbilic_caustic({1, 1, 1}), DomainError);
}

TEST_CASE("largest_flock: centroid and principal direction")
{
    const auto m = ellipsoid_mesh(2, 1.5, 1, 25);
    const auto eq = classify_equilibria(m, Vec3(0.013, 0.007, -0.011));
    const auto f = largest_flock(m, eq, 3 * m.mean_edge_length());
    REQUIRE(f.points.size() >= 2);
    Vec3 mean = Vec3::Zero();
    for (const auto& p : f.points) mean += p;
    mean /= static_cast<double>(f.points.size());
    CHECK((mean - f.centroid).norm() < 1e-12);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : f.points) cov += (p - mean) * (p - mean).transpose();
    cov /= static_cast<double>(f.points.size());
    const Vec3 cp = cov * f.principal;
    CHECK(cp.cross(f.principal).norm() < 1e-9 * (1 + cp.norm()));
    CHECK(cp.dot(f.principal) == doctest::Approx(f.spread * f.spread));
}

TEST_CASE("caustic_sweep: small major-axis sweep, Poincare-Hopf per row, range error")
{
    const auto m = ellipsoid_mesh(2, 1.5, 1, 12);
    SweepOptions opt;
    opt.steps = 20;
    opt.tmax = 1.5;
    opt.grid_n = 200;
    const auto res = caustic_sweep(m, Vec3(1, 0, 0), opt, Ellipsoid{2, 1.5, 1});
    REQUIRE(res.rows.size() == 21);
    for (const auto& r : res.rows) {
        CHECK(r.S_delta + r.U_delta - r.H_delta == 2);
        CHECK(r.S + r.U - r.H == 2);
    }
    opt.tmax = 5.0;
    CHECK_THROWS_AS(caustic_sweep(m, Vec3(1, 0, 0), opt), DomainError);

    std::ostringstream csv;
    write_sweep_csv(csv, res);
    CHECK(csv.str().rfind("t,ox,oy,oz,N_delta,S_delta,U_delta,H_delta,N,S,U,H\n", 0) == 0);
}

TEST_CASE("flock export: OBJ comments and JSON sidecar")
{
    const auto m = ellipsoid_mesh(2, 1.5, 1, 10);
    auto f = largest_flock(m, classify_equilibria(m, Vec3(0.01, 0.02, 0.03)), 3 * m.mean_edge_length());
    std::ostringstream obj, js;
    write_flock_obj(obj, f);
    write_flock_json(js, f);
    CHECK(obj.str().find("# ") == 0);
    CHECK(obj.str().find("\nv ") != std::string::npos);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j.contains("stable_faces"));
    CHECK(j.contains("saddle_edges"));
    CHECK(j.contains("unstable_vertices"));
    CHECK(j["stable_faces"].size() + j["saddle_edges"].size() + j["unstable_vertices"].size() == f.points.size());
}

TEST_CASE("geodesic_bound")
{
    CHECK(geodesic_bound(0.0, 1.0) == 0.0);
    CHECK(geodesic_bound(0.1, 0.5) > 0.1);
    CHECK(geodesic_bound(0.1, 0.5) == doctest::Approx(2 * 0.5 * std::asin(0.1)));
}
