#pragma once

#include "eqlab/curve.hpp"
#include "eqlab/predicates.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

namespace eqlab {

// Vertex chain sampled at parameters (indices[i]) * delta, indices[i] = first + i + offset.
struct Polygonization {
    Eigen::Matrix2Xd vertices;
    Eigen::VectorXd params;
    Eigen::VectorXd indices;
    double delta = 0.0;
    double offset = 0.0;
    bool closed = true;
    std::shared_ptr<const SmoothCurve> source;

    Eigen::Index size() const { return vertices.cols(); }
    Eigen::Index edge_count() const { return closed ? size() : size() - 1; }
    double scale() const;
};

Polygonization partition(const SmoothCurve& curve, int n, double offset);
// Open chain over the global grid (i + offset) * delta restricted to [lo, hi].
Polygonization partition_window(const SmoothCurve& curve, double delta, double offset, double lo, double hi);
Polygonization polygon(const Eigen::Matrix2Xd& points, bool closed = true);

struct EdgeEquilibrium {
    Verdict verdict = Verdict::No;
    Vec2 foot = Vec2::Zero();
};

// Tie band defaults to 1e-12 times the largest distance from o times the largest segment length.
EdgeEquilibrium edge_equilibrium(const Vec2& o, const Vec2& p, const Vec2& q, double tie = -1.0);
Verdict vertex_equilibrium(const Vec2& o, const Vec2& prev, const Vec2& v, const Vec2& next, double tie = -1.0);

struct LocalEquilibriumSet {
    std::vector<Eigen::Index> stable_edges;
    std::vector<Vec2> feet;
    std::vector<Eigen::Index> unstable_vertices;

    std::size_t S() const { return stable_edges.size(); }
    std::size_t U() const { return unstable_vertices.size(); }
    std::size_t N() const { return S() + U(); }
};

// Throws NongenericError naming the first edge or vertex inside the tie band.
LocalEquilibriumSet count_local(const Polygonization& poly, const Vec2& o);

// Features are ordered vertex 0, edge 0, vertex 1, edge 1, ...; position 2i is
// vertex i and 2i+1 is edge i.
struct Flock {
    Eigen::Index first = 0;  // feature positions; last < first means the run wraps
    Eigen::Index last = 0;
    std::vector<Eigen::Index> edges;
    std::vector<Eigen::Index> vertices;

    int S() const { return static_cast<int>(edges.size()); }
    int U() const { return static_cast<int>(vertices.size()); }
};

std::vector<Flock> flocks(const LocalEquilibriumSet& eq, const Polygonization& poly);

struct ImaginaryIndex2D {
    double S0 = 0.0;
    double U0 = 0.0;
    double kappa_rho = 0.0;
    double lambda = 0.0;
};

ImaginaryIndex2D imaginary_index(double kappa, double rho);

enum class MeshExponent { NMinusOne, N };
double random_mesh_expectation(double lambda, int n, MeshExponent e = MeshExponent::NMinusOne);

struct MonteCarloResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

// Samples n sorted parameters uniformly on [tau0 - delta, tau0 + delta] per trial and
// counts stable edge equilibria of the open chain through them.
MonteCarloResult monte_carlo_random_mesh(const SmoothCurve& curve, const Vec2& o, int n, double delta,
                                         std::int64_t trials, std::uint64_t seed, int threads = 1,
                                         double tau0 = 0.0);

// Strict interior local minima and maxima of a sampled sequence.
std::pair<int, int> grid_recover_1d(const std::vector<double>& values, bool periodic = false);

void write_local_csv(std::ostream& os, const LocalEquilibriumSet& eq, const Polygonization& poly);

}  // namespace eqlab
