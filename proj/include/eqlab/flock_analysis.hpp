#pragma once

#include "eqlab/curve.hpp"
#include "eqlab/fit.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace eqlab {

// Smallest k >= 2 with a nonzero k-th derivative of |r - o| at tau_m.
int degenerate_order(const SmoothCurve& curve, const Vec2& o, double tau_m);

struct ScalingOptions {
    double delta0 = 0.0;  // 0: period / 2000
    int rungs = 8;
    double ratio = 2.0;
    int offsets = 200;
    double half_window = 0.3;  // parameter half-width around tau0
    std::uint64_t seed = 1;
    int threads = 0;
};

struct ScalingReport {
    int k = 2;
    std::vector<double> deltas;
    std::vector<double> counts;
    std::vector<double> diameters;
    LineFit count_fit;
    LineFit diameter_fit;
    std::vector<std::string> warnings;
};

ScalingReport flock_scaling(const SmoothCurve& curve, const Vec2& o, double tau0, const ScalingOptions& opt = {});

enum class RateCase { TransverseConvexToConcave, TangentLocallyConvex, TransverseAtCusp, TangentAtCusp };

const char* rate_case_name(RateCase c);
double rate_exponent(RateCase c);

// Graph-form curve with the degenerate center at the origin and a direction (mu, nu)
// realizing the case.
struct RateSetup {
    SmoothCurve curve;
    Vec2 direction;
    double tau_star = 0.0;
};

RateSetup make_rate_case(RateCase c);

struct RateProfile {
    RateCase rate_case = RateCase::TransverseConvexToConcave;
    int k = 3;
    std::vector<double> t;
    std::vector<double> n0_plus;   // o = center + t * direction
    std::vector<double> n0_minus;  // o = center - t * direction
    int diverging_side = 1;        // +1 or -1
    LineFit fit;
    double expected = 0.0;
    double matched = 0.0;  // nearest admissible exponent
    int capped = 0;
};

// N0 proxy: sum of 2/|1 + rho kappa| over equilibria with |tau - tau*| <= 10 t^(1/(k-1)),
// k = 3 at general evolute points and 4 at cusps. `delta` is the root-scan spacing
// (0: window / 65536). Throws ClassificationError when the fitted slope is more than
// 0.1 away from every admissible exponent.
RateProfile rate_profile(const SmoothCurve& curve, const Vec2& center, double tau_star, const Vec2& direction,
                         RateCase hint, const std::vector<double>& t_ladder, double delta = 0.0);

}  // namespace eqlab
