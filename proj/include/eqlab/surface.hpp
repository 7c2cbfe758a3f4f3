#pragma once

#include "eqlab/mesh.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace eqlab {

struct SurfaceEquilibriumSet {
    std::vector<int> stable_faces;
    std::vector<Vec3> face_feet;
    std::vector<int> saddle_edges;
    std::vector<Vec3> edge_feet;
    std::vector<int> unstable_vertices;

    int S() const { return static_cast<int>(stable_faces.size()); }
    int H() const { return static_cast<int>(saddle_edges.size()); }
    int U() const { return static_cast<int>(unstable_vertices.size()); }
    int N() const { return S() + H() + U(); }
    int euler() const { return S() + U() - H(); }
};

// Feature-wise classification of the critical points of |x - o| on the mesh.
// Tie band 1e-10 * scale; a hit throws NongenericError naming the feature.
SurfaceEquilibriumSet classify_equilibria(const TriMesh& mesh, const Vec3& o, int threads = 1);

struct ImaginaryIndex3D {
    double S0 = 0.0;
    double U0 = 0.0;
    double H0 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double rho = 0.0;
    double d = 0.0;
};

// Requires kappa_i <= 0; throws DegenerateError when a factor 1 + kappa_i rho vanishes.
ImaginaryIndex3D imaginary_index_3d(double kappa1, double kappa2, double rho);

using SurfaceMap = std::function<Vec3(double u, double v)>;

struct SurfacePatch {
    Eigen::Matrix3Xd vertices;  // (n+1)^2 samples, index i * (n+1) + j for (u_i, v_j)
    Eigen::Matrix3Xi faces;
    std::vector<char> main_diagonal;  // per quad: split along p(i,j) p(i+1,j+1)
    int n = 0;
};

// True when [p00, p11] is an edge of conv{o, p00, p10, p11, p01}. Throws NongenericError
// when the decision is inside the tie band.
bool hull_diagonal(const Vec3& o, const Vec3& p00, const Vec3& p10, const Vec3& p11, const Vec3& p01);

SurfacePatch grid_surface(const SurfaceMap& r, double u0, double u1, double v0, double v1, int n, const Vec3& o);

struct GridPoint {
    int i = 0;
    int j = 0;
};

struct GridExtrema {
    std::vector<GridPoint> minima;
    std::vector<GridPoint> maxima;
    std::vector<GridPoint> stationary;
    int r = 0;
};

// Grid-circle extrema and stationary vertices over the vertices whose circle of radius r
// lies inside the grid. With periodic_cols the column index wraps. Ties throw NongenericError.
GridExtrema grid_stationary(const Eigen::MatrixXd& f, int r, bool periodic_cols = false);

// Starts at r0 and doubles until (minima, maxima) repeat twice in a row or r exceeds r_max.
GridExtrema grid_stationary_stable(const Eigen::MatrixXd& f, int r0 = 5, int r_max = -1, bool periodic_cols = false);

// Axis-aligned ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1.
struct Ellipsoid {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
};

struct GlobalCounts {
    int S = 0;
    int U = 0;
    int H = 0;  // from S + U - H = 2
    int N() const { return S + U + H; }
    int r = 0;
};

// Grid-circle extrema of |r(lat, lon) - o|^2 on two latitude-longitude charts with
// perpendicular polar axes, n longitude samples per chart.
GlobalCounts ellipsoid_grid_counts(const Ellipsoid& e, const Vec3& o, int n);

struct SmoothEquilibrium3D {
    Vec3 position = Vec3::Zero();
    int type = 0;  // 0 stable, 1 saddle, 2 unstable
};

// Critical points of |x - o| on the ellipsoid from the Lagrange condition
// x_i = o_i a_i^2 / (a_i^2 - mu). Requires all o_i != 0.
std::vector<SmoothEquilibrium3D> ellipsoid_equilibria(const Ellipsoid& e, const Vec3& o);

// Curvature center at the umbilic in the first octant of the xz-plane.
Vec3 ellipsoid_umbilic_caustic(const Ellipsoid& e);

struct FlockSnapshot {
    double t = 0.0;
    Vec3 o = Vec3::Zero();
    std::vector<Vec3> points;  // members of the largest cluster
    std::vector<int> types;    // 0 face, 1 edge, 2 vertex
    std::vector<int> ids;
    Vec3 centroid = Vec3::Zero();
    Vec3 principal = Vec3::Zero();  // unit direction of largest spread
    double spread = 0.0;            // standard deviation along principal
    double spread_ratio = 0.0;      // second over first principal deviation
};

// Largest single-link cluster of the equilibrium positions with link length `link`.
FlockSnapshot largest_flock(const TriMesh& mesh, const SurfaceEquilibriumSet& eq, double link);

struct SweepRow {
    double t = 0.0;
    Vec3 o = Vec3::Zero();
    int S_delta = 0;
    int U_delta = 0;
    int H_delta = 0;
    int N_delta() const { return S_delta + U_delta + H_delta; }
    int N = -1;  // global count, -1 without a smooth model
    int S = -1;
    int U = -1;
    int H = -1;
};

struct SweepPeak {
    std::size_t index = 0;  // row of the maximum
    std::size_t first = 0;  // run above threshold
    std::size_t last = 0;
    int N_delta = 0;
    int N_before = -1;  // global N just outside the run
    int N_after = -1;
    FlockSnapshot flock;
};

struct SweepOptions {
    int steps = 200;
    double tmin = 0.0;
    double tmax = 1.0;
    int grid_n = 400;          // global chart resolution
    double peak_factor = 3.0;  // threshold over the median N^Delta
    int margin = 5;            // rows outside a peak run for N before/after
    double link_factor = 3.0;  // flock link in mean edge lengths
    int threads = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double baseline = 0.0;
    std::vector<SweepPeak> peaks;
};

// o(t) = mesh centroid + t * direction. Throws DomainError when o leaves the mesh.
SweepResult caustic_sweep(const TriMesh& mesh, const Vec3& direction, const SweepOptions& opt,
                          const std::optional<Ellipsoid>& smooth = std::nullopt);

// Upper bound on the geodesic distance for a chord on a surface with minimal curvature radius r_min.
double geodesic_bound(double chord, double r_min);

void write_sweep_csv(std::ostream& os, const SweepResult& s);
// Points of the flock as OBJ vertices, one labelled comment per feature.
void write_flock_obj(std::ostream& os, const FlockSnapshot& f);
// {stable_faces:[...], saddle_edges:[...], unstable_vertices:[...]} of the flock.
void write_flock_json(std::ostream& os, const FlockSnapshot& f);

}  // namespace eqlab
