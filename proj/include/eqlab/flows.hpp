#pragma once

#include "eqlab/curve.hpp"

#include <iosfwd>
#include <vector>

namespace eqlab {

// Closed polyline with equal arc-length spacing and unit perimeter.
struct FlowState {
    Eigen::Matrix2Xd vertices;
    Eigen::VectorXd alpha;  // tangent angle of edge i (vertex i to i+1), unwrapped
    double t = 0.0;         // renormalized clock
    double t_unscaled = 0.0;
    double scale = 1.0;     // physical length of one renormalized unit
    double c = 1.0;
};

double polygon_area(const Eigen::Matrix2Xd& p);
double polygon_perimeter(const Eigen::Matrix2Xd& p);
Vec2 lamina_centroid(const Eigen::Matrix2Xd& p);
double isoperimetric_ratio(const Eigen::Matrix2Xd& p);

// n points at equal chordal arc length along a closed polyline, starting at its first vertex.
Eigen::Matrix2Xd resample_arclength(const Eigen::Matrix2Xd& p, int n);
Eigen::VectorXd tangent_angles(const Eigen::Matrix2Xd& p);

FlowState make_flow_state(const SmoothCurve& curve, int n, double c = 1.0);
FlowState make_flow_state(const Eigen::Matrix2Xd& polygon, int n, double c = 1.0);

double stable_dt(const FlowState& s);  // dt bound of the explicit scheme
FlowState csf_step(const FlowState& s, double dt);

// Inner parallel body at distance d of a convex counterclockwise polygon (no rescaling).
Eigen::Matrix2Xd erode(const Eigen::Matrix2Xd& polygon, double d);

struct EikonalStep {
    Eigen::Matrix2Xd polygon;  // rescaled to unit perimeter about the centroid
    double elapsed = 0.0;      // erosion depth in input units, before rescaling
    double factor = 1.0;       // applied rescaling factor
};
EikonalStep eikonal_step(const Eigen::Matrix2Xd& polygon, double dt);

// dr/dt of the inward unit-speed flow for a star-shaped curve r(phi) on a uniform grid.
Eigen::VectorXd eikonal_polar_rate(const Eigen::VectorXd& r);

enum class FlowKind { CSF, Eikonal };

struct FlowParams {
    FlowKind kind = FlowKind::CSF;
    int n = 512;
    double c = 1.0;
    double dt = 0.0;  // 0: 0.25 ds^2 / c for CSF, 0.002 for Eikonal
    int steps = 100000;
    int mesh_n = 0;   // > 0: count N^Delta on a spline resampling with this many vertices
    double mesh_offset = 0.37;
    int stop_N = 4;
};

struct SeriesRow {
    double t = 0.0;
    double t_unscaled = 0.0;
    int N = 0;
    int S = 0;
    int U = 0;
    long N_delta = 0;
    long S_delta = 0;
    long U_delta = 0;
    char event = '-';
    int event_count = 0;
};

struct CoEvolutionSeries {
    std::vector<SeriesRow> rows;
    int annihilations = 0;
    int creations = 0;
    bool reached_stop = false;
};

CoEvolutionSeries run_flow(const SmoothCurve& initial, const FlowParams& p);

// Strict extrema of the cyclic vertex-distance sequence from o: (minima, maxima).
std::pair<int, int> vertex_distance_extrema(const Eigen::Matrix2Xd& p, const Vec2& o);

struct SpikeReport {
    double t_event = 0.0;
    double peak = 0.0;
    double median = 0.0;
    double ratio = 0.0;
};

// For each annihilation: the largest N^Delta in [t_e - window*T, t_e] against the
// median of N^Delta over [t_e - trail*T, t_e].
std::vector<SpikeReport> annihilation_spikes(const CoEvolutionSeries& s, double window = 0.05, double trail = 0.10);
// Largest N^Delta(t) / median over [t - trail*T, t] across the run.
double max_spike_ratio(const CoEvolutionSeries& s, double trail = 0.10);

void write_series_csv(std::ostream& os, const CoEvolutionSeries& s);

}  // namespace eqlab
