#pragma once

#include "eqlab/curve.hpp"
#include "eqlab/discretize.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace eqlab {

struct EvoluteCurve {
    std::shared_ptr<const SmoothCurve> curve;
    std::vector<double> tau;
    Eigen::Matrix2Xd points;
    std::vector<double> cusps;
};

// Parameters where kappa' changes sign.
std::vector<double> cusp_parameters(const SmoothCurve& curve, int samples = 4096);
EvoluteCurve build_evolute(const SmoothCurve& curve, int samples = 4096);

// Turning sign of the sampled evolute is constant over the 5-sample window at index i.
bool locally_convex(const EvoluteCurve& E, std::size_t i);

enum class Side { Convex, Concave, OnCurve };

// Side of q against the osculating parabola of the evolute at E(tau0). The convex
// side is the one the evolute bends towards.
Side side_of_evolute(const EvoluteCurve& E, double tau0, const Vec2& q);
Side side_of_evolute(const SmoothCurve& curve, double tau0, const Vec2& q);

enum class EventKind { Creation, Annihilation, Degenerate };

struct CrossingEvent {
    double t = 0.0;
    double tau = 0.0;
    EventKind kind = EventKind::Degenerate;
    Side side_before = Side::OnCurve;
    Side side_after = Side::OnCurve;
    int n_before = 0;
    int n_after = 0;
    bool sides_agree = false;  // side transition matches the jump sign
};

using CurveFamily = std::function<SmoothCurve(double)>;
using ReferencePath = std::function<Vec2(double)>;

// Continuous piecewise linear reference trajectory.
struct PolylinePath {
    std::vector<double> t;
    std::vector<Vec2> p;
    Vec2 operator()(double s) const;
};

struct CrossingOptions {
    double time_tol = 1e-9;    // relative to the grid span
    double cusp_guard = 1e-4;  // parameter distance to a cusp; also 4 times the pair gap
};

std::vector<CrossingEvent> detect_crossings(const CurveFamily& family, const ReferencePath& o,
                                            const std::vector<double>& t_grid, const CrossingOptions& opt = {});

struct StepFunction {
    std::vector<double> t;  // jump times
    std::vector<int> N;     // N[0] before t[0], N[i+1] after t[i]
    int at(double s) const;
};

// Degenerate events are skipped.
StepFunction reconstruct_N(int N0, const std::vector<CrossingEvent>& events);

// Normal line of an edge through one of its endpoints.
struct NormalLine {
    Vec2 point = Vec2::Zero();
    Vec2 dir = Vec2::Zero();
    Eigen::Index edge = 0;
    bool at_start = true;
};

std::vector<NormalLine> polygon_evolute(const Polygonization& poly);

// Predicted N^Delta(q1) - N^Delta(q0) for q0, q1 inside the polygon: every line
// crossed right to left adds a stable edge and an unstable vertex.
int crossing_delta(const std::vector<NormalLine>& lines, const Vec2& q0, const Vec2& q1);

void write_event_log(std::ostream& os, const std::vector<CrossingEvent>& events);

}  // namespace eqlab
