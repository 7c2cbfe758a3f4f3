#include "eqlab/surface.hpp"

#include "eqlab/fit.hpp"
#include "eqlab/format.hpp"
#include "eqlab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace eqlab {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

FlockSnapshot largest_flock(const TriMesh& mesh, const SurfaceEquilibriumSet& eq, double link)
{
    FlockSnapshot all;
    for (std::size_t k = 0; k < eq.stable_faces.size(); ++k) {
        all.points.push_back(eq.face_feet[k]);
        all.types.push_back(0);
        all.ids.push_back(eq.stable_faces[k]);
    }
    for (std::size_t k = 0; k < eq.saddle_edges.size(); ++k) {
        all.points.push_back(eq.edge_feet[k]);
        all.types.push_back(1);
        all.ids.push_back(eq.saddle_edges[k]);
    }
    for (int v : eq.unstable_vertices) {
        all.points.push_back(mesh.vertices().col(v));
        all.types.push_back(2);
        all.ids.push_back(v);
    }
    const std::size_t n = all.points.size();
    if (n == 0) return all;

    // Spatial hash with cell size = link; neighbors are in the 27 surrounding cells.
    auto cell = [&](const Vec3& p) {
        return std::array<long long, 3>{static_cast<long long>(std::floor(p.x() / link)),
                                        static_cast<long long>(std::floor(p.y() / link)),
                                        static_cast<long long>(std::floor(p.z() / link))};
    };
    auto key = [](const std::array<long long, 3>& c) {
        return static_cast<std::uint64_t>((c[0] * 73856093LL) ^ (c[1] * 19349663LL) ^ (c[2] * 83492791LL));
    };
    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    for (std::size_t i = 0; i < n; ++i) grid[key(cell(all.points[i]))].push_back(static_cast<int>(i));
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = cell(all.points[i]);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy)
                for (long long dz = -1; dz <= 1; ++dz) {
                    auto it = grid.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == grid.end()) continue;
                    for (int j : it->second)
                        if ((all.points[i] - all.points[static_cast<std::size_t>(j)]).norm() <= link)
                            uf.unite(static_cast<int>(i), j);
                }
    }
    std::vector<int> size(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++size[static_cast<std::size_t>(uf.find(static_cast<int>(i)))];
    const int root = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());

    FlockSnapshot out;
    for (std::size_t i = 0; i < n; ++i)
        if (uf.find(static_cast<int>(i)) == root) {
            out.points.push_back(all.points[i]);
            out.types.push_back(all.types[i]);
            out.ids.push_back(all.ids[i]);
        }
    Vec3 mean = Vec3::Zero();
    for (const auto& p : out.points) mean += p;
    mean /= static_cast<double>(out.points.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : out.points) cov += (p - mean) * (p - mean).transpose();
    cov /= static_cast<double>(out.points.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    out.centroid = mean;
    out.principal = es.eigenvectors().col(2);
    Eigen::Index big;
    out.principal.cwiseAbs().maxCoeff(&big);
    if (out.principal(big) < 0) out.principal = -out.principal;
    const Vec3 ev = es.eigenvalues().cwiseMax(0.0);
    out.spread = std::sqrt(ev(2));
    out.spread_ratio = ev(2) > 0 ? std::sqrt(ev(1) / ev(2)) : 0.0;
    return out;
}

double geodesic_bound(double chord, double r_min)
{
    if (chord >= 2.0 * r_min) return kPi * r_min;
    return 2.0 * r_min * std::asin(chord / (2.0 * r_min));
}

SweepResult caustic_sweep(const TriMesh& mesh, const Vec3& direction, const SweepOptions& opt,
                          const std::optional<Ellipsoid>& smooth)
{
    if (opt.steps < 1) throw DomainError("sweep needs at least one step");
    if (!(direction.norm() > 0)) throw DomainError("sweep direction must be nonzero");
    const Vec3 dir = direction.normalized();
    const int threads = resolve_threads(opt.threads);
    SweepResult res;
    res.rows.resize(static_cast<std::size_t>(opt.steps) + 1);

    auto classify_at = [&](const Vec3& o) {
        // A tie is resolved by a tiny fixed nudge of the reference point.
        Vec3 q = o;
        for (int attempt = 0;; ++attempt) {
            try {
                return classify_equilibria(mesh, q, threads);
            } catch (const NongenericError&) {
                if (attempt >= 4) throw;
                q += 1e-9 * mesh.scale() * Vec3(0.3719, -0.5826, 0.7229);
            }
        }
    };

    for (int s = 0; s <= opt.steps; ++s) {
        SweepRow& row = res.rows[static_cast<std::size_t>(s)];
        row.t = opt.tmin + (opt.tmax - opt.tmin) * s / opt.steps;
        row.o = mesh.centroid() + row.t * dir;
        if (!mesh.contains(row.o)) throw DomainError("reference point leaves the mesh at t=" + fmt17(row.t));
        const auto eq = classify_at(row.o);
        row.S_delta = eq.S();
        row.U_delta = eq.U();
        row.H_delta = eq.H();
        if (smooth) {
            const auto g = ellipsoid_grid_counts(*smooth, row.o, opt.grid_n);
            row.S = g.S;
            row.U = g.U;
            row.H = g.H;
            row.N = g.N();
        }
    }

    std::vector<double> nd;
    for (const auto& r : res.rows) nd.push_back(r.N_delta());
    res.baseline = median(nd);
    const double thr = opt.peak_factor * res.baseline;
    const std::size_t last_row = res.rows.size() - 1;
    for (std::size_t i = 0; i < res.rows.size();) {
        if (nd[i] <= thr) {
            ++i;
            continue;
        }
        SweepPeak pk;
        pk.first = i;
        // Runs separated by at most `margin` rows belong to one peak.
        for (;;) {
            while (i < res.rows.size() && nd[i] > thr) ++i;
            pk.last = i - 1;
            std::size_t next = i;
            while (next < res.rows.size() && nd[next] <= thr) ++next;
            if (next >= res.rows.size() || next - pk.last > static_cast<std::size_t>(opt.margin)) break;
            i = next;
        }
        pk.index = static_cast<std::size_t>(std::max_element(nd.begin() + static_cast<std::ptrdiff_t>(pk.first),
                                                             nd.begin() + static_cast<std::ptrdiff_t>(pk.last) + 1) -
                                            nd.begin());
        pk.N_delta = static_cast<int>(nd[pk.index]);
        const auto m = static_cast<std::size_t>(opt.margin);
        pk.N_before = res.rows[pk.first >= m ? pk.first - m : 0].N;
        pk.N_after = res.rows[std::min(last_row, pk.last + m)].N;
        const SweepRow& top = res.rows[pk.index];
        pk.flock = largest_flock(mesh, classify_at(top.o), opt.link_factor * mesh.mean_edge_length());
        pk.flock.t = top.t;
        pk.flock.o = top.o;
        res.peaks.push_back(std::move(pk));
    }
    return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& s)
{
    os << "t,ox,oy,oz,N_delta,S_delta,U_delta,H_delta,N,S,U,H\n";
    for (const auto& r : s.rows)
        os << fmt17(r.t) << ',' << fmt17(r.o.x()) << ',' << fmt17(r.o.y()) << ',' << fmt17(r.o.z()) << ','
           << r.N_delta() << ',' << r.S_delta << ',' << r.U_delta << ',' << r.H_delta << ',' << r.N << ',' << r.S
           << ',' << r.U << ',' << r.H << '\n';
}

void write_flock_obj(std::ostream& os, const FlockSnapshot& f)
{
    static const char* label[] = {"stable face", "saddle edge", "unstable vertex"};
    os << "# flock at t=" << fmt17(f.t) << " o=" << fmt17(f.o.x()) << ' ' << fmt17(f.o.y()) << ' '
       << fmt17(f.o.z()) << '\n';
    for (std::size_t i = 0; i < f.points.size(); ++i)
        os << "# " << label[f.types[i]] << ' ' << f.ids[i] << '\n'
           << "v " << fmt17(f.points[i].x()) << ' ' << fmt17(f.points[i].y()) << ' ' << fmt17(f.points[i].z()) << '\n';
}

void write_flock_json(std::ostream& os, const FlockSnapshot& f)
{
    nlohmann::json j;
    j["stable_faces"] = nlohmann::json::array();
    j["saddle_edges"] = nlohmann::json::array();
    j["unstable_vertices"] = nlohmann::json::array();
    static const char* key[] = {"stable_faces", "saddle_edges", "unstable_vertices"};
    for (std::size_t i = 0; i < f.points.size(); ++i) j[key[f.types[i]]].push_back(f.ids[i]);
    j["t"] = f.t;
    j["centroid"] = {f.centroid.x(), f.centroid.y(), f.centroid.z()};
    j["principal"] = {f.principal.x(), f.principal.y(), f.principal.z()};
    j["spread"] = f.spread;
    j["spread_ratio"] = f.spread_ratio;
    os << j.dump(2) << '\n';
}

}  // namespace eqlab
