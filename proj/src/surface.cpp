#include "eqlab/surface.hpp"

#include "eqlab/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace eqlab {

namespace {

// Ids satisfying pred, gathered in parallel blocks and concatenated in id order.
template <typename Pred>
std::vector<int> collect(Eigen::Index count, int threads, Pred&& pred)
{
    const std::int64_t blocks = std::min<std::int64_t>(64, std::max<Eigen::Index>(count, 1));
    std::vector<std::vector<int>> parts(static_cast<std::size_t>(blocks));
    parallel_for(blocks, threads, [&](std::int64_t b) {
        const Eigen::Index lo = count * b / blocks, hi = count * (b + 1) / blocks;
        for (Eigen::Index i = lo; i < hi; ++i)
            if (pred(static_cast<int>(i))) parts[static_cast<std::size_t>(b)].push_back(static_cast<int>(i));
    });
    std::vector<int> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace

SurfaceEquilibriumSet classify_equilibria(const TriMesh& mesh, const Vec3& o, int threads)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.faces();
    const auto& E = mesh.edges();
    const auto& EF = mesh.edge_faces();
    const auto& Nf = mesh.face_normals();
    const double tol = 1e-10 * mesh.scale();
    threads = resolve_threads(threads);

    // Signed distance of o from the line a->b inside the face with normal n; positive on the face side.
    // An edge is a saddle when o projects to the face side of it in both adjacent faces.
    auto side = [&](const Vec3& a, const Vec3& b, const Vec3& n) {
        const Vec3 d = b - a;
        return d.cross(o - a).dot(n) / d.norm();
    };

    SurfaceEquilibriumSet out;
    out.stable_faces = collect(mesh.num_faces(), threads, [&](int f) {
        bool inside = true;
        for (int k = 0; k < 3; ++k) {
            const double s = side(V.col(F(k, f)), V.col(F((k + 1) % 3, f)), Nf.col(f));
            if (std::abs(s) < tol) throw NongenericError("face", f);
            inside = inside && s > 0;
        }
        return inside;
    });
    out.saddle_edges = collect(mesh.num_edges(), threads, [&](int e) {
        const Vec3 a = V.col(E(0, e)), b = V.col(E(1, e));
        const Vec3 d = b - a;
        const double len = d.norm();
        const double s = (o - a).dot(d) / len;
        if (std::abs(s) < tol || std::abs(s - len) < tol) throw NongenericError("edge", e);
        if (s < 0 || s > len) return false;
        const double s0 = side(a, b, Nf.col(EF(0, e)));
        const double s1 = side(b, a, Nf.col(EF(1, e)));
        if (std::abs(s0) < tol || std::abs(s1) < tol) throw NongenericError("edge", e);
        return s0 > 0 && s1 > 0;
    });
    out.unstable_vertices = collect(mesh.num_vertices(), threads, [&](int v) {
        const Vec3 p = V.col(v);
        bool peak = true;
        for (int w : mesh.neighbors(v)) {
            const Vec3 u = V.col(w) - p;
            const double g = (p - o).dot(u) / u.norm();
            if (std::abs(g) < tol) throw NongenericError("vertex", v);
            peak = peak && g < 0;
        }
        return peak;
    });

    for (int f : out.stable_faces) {
        const Vec3 n = Nf.col(f);
        out.face_feet.push_back(o + n * n.dot(V.col(F(0, f)) - o));
    }
    for (int e : out.saddle_edges) {
        const Vec3 a = V.col(E(0, e)), d = V.col(E(1, e)) - a;
        out.edge_feet.push_back(a + d * ((o - a).dot(d) / d.squaredNorm()));
    }
    return out;
}

ImaginaryIndex3D imaginary_index_3d(double kappa1, double kappa2, double rho)
{
    if (kappa1 > 0 || kappa2 > 0) throw DomainError("principal curvatures must be nonpositive");
    if (!(rho > 0)) throw DomainError("distance must be positive");
    const double f1 = 1.0 + kappa1 * rho, f2 = 1.0 + kappa2 * rho;
    if (std::abs(f1 * f2) < 1e-12) throw DegenerateError("reference point on the caustic");
    ImaginaryIndex3D r;
    r.kappa1 = kappa1;
    r.kappa2 = kappa2;
    r.rho = rho;
    r.d = 1.0 / std::abs(f1 * f2);
    r.S0 = r.d;
    r.U0 = kappa1 * kappa2 * rho * rho * r.d;
    r.H0 = -(kappa1 + kappa2) * rho * r.d;
    return r;
}

bool hull_diagonal(const Vec3& o, const Vec3& p00, const Vec3& p10, const Vec3& p11, const Vec3& p01)
{
    // [p00, p11] is a hull edge iff o, p10, p01 project into an open half-plane
    // of the plane orthogonal to the diagonal.
    const Vec3 d = (p11 - p00).normalized();
    const Vec3 e1 = d.unitOrthogonal();
    const Vec3 e2 = d.cross(e1);
    std::array<double, 3> ang{};
    const std::array<Vec3, 3> q{o, p10, p01};
    for (int k = 0; k < 3; ++k) {
        const Vec3 w = q[static_cast<std::size_t>(k)] - p00;
        const Vec3 perp_w = w - d * w.dot(d);
        if (perp_w.norm() < 1e-12 * w.norm()) throw NongenericError("quad", -1);
        ang[static_cast<std::size_t>(k)] = std::atan2(perp_w.dot(e2), perp_w.dot(e1));
    }
    std::sort(ang.begin(), ang.end());
    const double gap = std::max({ang[1] - ang[0], ang[2] - ang[1], ang[0] + kTwoPi - ang[2]});
    if (std::abs(gap - kPi) < 1e-10) throw NongenericError("quad", -1);
    return gap > kPi;
}

SurfacePatch grid_surface(const SurfaceMap& r, double u0, double u1, double v0, double v1, int n, const Vec3& o)
{
    if (n < 1) throw DomainError("grid size must be positive");
    SurfacePatch p;
    p.n = n;
    const int m = n + 1;
    p.vertices.resize(3, m * m);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            p.vertices.col(i * m + j) = r(u0 + (u1 - u0) * i / n, v0 + (v1 - v0) * j / n);
    p.faces.resize(3, 2 * n * n);
    p.main_diagonal.resize(static_cast<std::size_t>(n * n));
    int f = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int a = i * m + j, b = (i + 1) * m + j, c = (i + 1) * m + j + 1, d = i * m + j + 1;
            try {
                const bool main = hull_diagonal(o, p.vertices.col(a), p.vertices.col(b), p.vertices.col(c),
                                                p.vertices.col(d));
                p.main_diagonal[static_cast<std::size_t>(i * n + j)] = main;
                if (main) {
                    p.faces.col(f++) << a, b, c;
                    p.faces.col(f++) << a, c, d;
                } else {
                    p.faces.col(f++) << a, b, d;
                    p.faces.col(f++) << b, c, d;
                }
            } catch (const NongenericError&) {
                throw NongenericError("quad", i * n + j);
            }
        }
    return p;
}

std::vector<SmoothEquilibrium3D> ellipsoid_equilibria(const Ellipsoid& e, const Vec3& o)
{
    const Vec3 a2(e.a * e.a, e.b * e.b, e.c * e.c);
    for (int i = 0; i < 3; ++i)
        if (o(i) == 0.0) throw DomainError("reference point on a symmetry plane");
    auto F = [&](double mu) {
        double s = -1.0;
        for (int i = 0; i < 3; ++i) s += o(i) * o(i) * a2(i) / ((a2(i) - mu) * (a2(i) - mu));
        return s;
    };
    auto bisect = [&](double lo, double hi) {
        const double flo = F(lo);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            ((F(mid) < 0) == (flo < 0) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::array<double, 3> poles{a2(0), a2(1), a2(2)};
    std::sort(poles.begin(), poles.end());
    const double reach = 1.01 * std::sqrt((o.array().square() * a2.array()).sum());
    auto below = [](double p) { return std::nextafter(p, -1e300); };
    auto above = [](double p) { return std::nextafter(p, 1e300); };

    std::vector<double> roots;
    roots.push_back(bisect(poles[0] - reach, below(poles[0])));
    roots.push_back(bisect(above(poles[2]), poles[2] + reach));
    for (int k = 0; k < 2; ++k) {
        double lo = above(poles[static_cast<std::size_t>(k)]), hi = below(poles[static_cast<std::size_t>(k) + 1]);
        if (!(hi > lo)) continue;
        // F is convex between poles: golden-section minimum, then one root on each side.
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = F(x1), f2 = F(x2);
        for (int it = 0; it < 300 && hi - lo > 1e-15 * std::abs(hi); ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = F(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = F(x2);
            }
        }
        const double xm = 0.5 * (lo + hi);
        if (F(xm) < 0) {
            roots.push_back(bisect(above(poles[static_cast<std::size_t>(k)]), xm));
            roots.push_back(bisect(xm, below(poles[static_cast<std::size_t>(k) + 1])));
        }
    }
    std::sort(roots.begin(), roots.end());

    std::vector<SmoothEquilibrium3D> out;
    for (double mu : roots) {
        SmoothEquilibrium3D q;
        q.position = (o.array() * a2.array() / (a2.array() - mu)).matrix();
        const Vec3 n = (q.position.array() / a2.array()).matrix().normalized();
        const Vec3 t1 = n.unitOrthogonal(), t2 = n.cross(t1);
        Eigen::Matrix<double, 3, 2> T;
        T << t1, t2;
        const Eigen::Matrix3d Hs = Eigen::Matrix3d::Identity() - mu * a2.cwiseInverse().asDiagonal().toDenseMatrix();
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(T.transpose() * Hs * T).eigenvalues();
        if (ev(0) > 0) q.type = 0;
        else if (ev(1) < 0) q.type = 2;
        else q.type = 1;
        out.push_back(q);
    }
    return out;
}

Vec3 ellipsoid_umbilic_caustic(const Ellipsoid& e)
{
    const double a2 = e.a * e.a, b2 = e.b * e.b, c2 = e.c * e.c;
    if (!(e.a > e.b && e.b > e.c)) throw DomainError("umbilics need distinct semi-axes a > b > c");
    return {std::pow(a2 - b2, 1.5) / (e.a * std::sqrt(a2 - c2)), 0.0,
            std::pow(b2 - c2, 1.5) / (e.c * std::sqrt(a2 - c2))};
}

}  // namespace eqlab
