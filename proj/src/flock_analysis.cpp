#include "eqlab/flock_analysis.hpp"

#include "eqlab/discretize.hpp"
#include "eqlab/format.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace eqlab {

int degenerate_order(const SmoothCurve& curve, const Vec2& o, double tau_m)
{
    const int k = distance_order(curve, o, tau_m);
    if (k == 0) throw OrderTooHighError("all derivatives of the distance up to order 5 vanish");
    return k;
}

ScalingReport flock_scaling(const SmoothCurve& curve, const Vec2& o, double tau0, const ScalingOptions& opt)
{
    if (opt.rungs < 6) throw DomainError("scaling fit needs at least 6 rungs");
    if (opt.offsets < 1) throw DomainError("offsets must be positive");
    ScalingReport rep;
    rep.k = degenerate_order(curve, o, tau0);
    const double delta0 = opt.delta0 > 0 ? opt.delta0 : curve.period() / 2000.0;
    const int threads = resolve_threads(opt.threads);

    for (int j = 0; j < opt.rungs; ++j) {
        const double delta = delta0 / std::pow(opt.ratio, j);
        std::vector<double> counts(static_cast<std::size_t>(opt.offsets)), diams(counts.size());
        parallel_for(opt.offsets, threads, [&](std::int64_t m) {
            auto g = substream(opt.seed, static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(opt.offsets) +
                                             static_cast<std::uint64_t>(m));
            double offset = uniform01(g);
            for (int attempt = 0;; ++attempt) {
                try {
                    const auto poly =
                        partition_window(curve, delta, offset, tau0 - opt.half_window, tau0 + opt.half_window);
                    const auto eq = count_local(poly, o);
                    double lo = 1e300, hi = -1e300;
                    for (auto e : eq.stable_edges) {
                        const double t = 0.5 * (poly.params(e) + poly.params(e + 1));
                        lo = std::min(lo, t);
                        hi = std::max(hi, t);
                    }
                    for (auto v : eq.unstable_vertices) {
                        lo = std::min(lo, poly.params(v));
                        hi = std::max(hi, poly.params(v));
                    }
                    counts[static_cast<std::size_t>(m)] = static_cast<double>(eq.N());
                    diams[static_cast<std::size_t>(m)] = eq.N() > 1 ? hi - lo : 0.0;
                    return;
                } catch (const NongenericError&) {
                    if (attempt >= 8) throw;
                    offset = std::fmod(offset + 1e-6, 1.0);
                }
            }
        });
        double c = 0.0, d = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            c += counts[i];
            d += diams[i];
        }
        rep.deltas.push_back(delta);
        rep.counts.push_back(c / opt.offsets);
        rep.diameters.push_back(d / opt.offsets);
    }

    rep.count_fit = fit_loglog(rep.deltas, rep.counts);
    rep.diameter_fit = fit_loglog(rep.deltas, rep.diameters);
    if (rep.k >= 3) {
        for (std::size_t j = 1; j < rep.counts.size(); ++j)
            if (rep.counts[j] < 0.95 * rep.counts[j - 1])
                rep.warnings.push_back("scaling regime not reached: count drops at delta=" + fmt17(rep.deltas[j]));
    }
    return rep;
}

const char* rate_case_name(RateCase c)
{
    switch (c) {
    case RateCase::TransverseConvexToConcave: return "i";
    case RateCase::TangentLocallyConvex: return "ii";
    case RateCase::TransverseAtCusp: return "iii";
    default: return "iv";
    }
}

double rate_exponent(RateCase c)
{
    switch (c) {
    case RateCase::TransverseConvexToConcave: return -0.5;
    case RateCase::TransverseAtCusp: return -2.0 / 3.0;
    default: return -1.0;
    }
}

RateSetup make_rate_case(RateCase c)
{
    // General point: A != 0, B = -1/8 cancels the cubic term of <r - o, r'>.
    // Cusp: A = 0 and f''''(0) = 24 B != -3/rho0^3.
    const bool cusp = c == RateCase::TransverseAtCusp || c == RateCase::TangentAtCusp;
    const bool tangent = c == RateCase::TangentLocallyConvex || c == RateCase::TangentAtCusp;
    return RateSetup{cusp ? SmoothCurve::jet(1.0, 0.0, 0.05, 1.0) : SmoothCurve::jet(1.0, 0.3, -0.125, 1.0),
                     tangent ? Vec2(0.0, 1.0) : Vec2(1.0, 0.3), 0.0};
}

RateProfile rate_profile(const SmoothCurve& curve, const Vec2& center, double tau_star, const Vec2& direction,
                         RateCase hint, const std::vector<double>& t_ladder, double delta)
{
    RateProfile rp;
    rp.rate_case = hint;
    rp.expected = rate_exponent(hint);
    const bool cusp = hint == RateCase::TransverseAtCusp || hint == RateCase::TangentAtCusp;
    rp.k = cusp ? 4 : 3;
    rp.t = t_ladder;

    std::vector<bool> capped_plus, capped_minus;
    auto proxy = [&](double t, int side, bool& capped) {
        const Vec2 o = center + side * t * direction;
        const double w = 10.0 * std::pow(t, 1.0 / (rp.k - 1));
        EquilibriumOptions opt;
        opt.detect_degenerate = false;
        opt.lo = tau_star - w;
        opt.hi = tau_star + w;
        if (!curve.closed()) {
            opt.lo = std::max(opt.lo, curve.lo());
            opt.hi = std::min(opt.hi, curve.hi());
        }
        opt.samples = delta > 0 ? static_cast<int>(std::ceil((opt.hi - opt.lo) / delta)) : 65536;
        double sum = 0.0;
        capped = false;
        for (const auto& e : global_equilibria(curve, o, opt)) {
            const double inv = 1.0 / std::abs(1.0 + e.rho * e.kappa);
            if (inv > 1e9) {
                capped = true;
                sum += 2e9;
            } else {
                sum += 2.0 * inv;
            }
        }
        return sum;
    };

    for (double t : t_ladder) {
        if (!(t > 0)) throw DomainError("t ladder must be positive");
        bool cp = false, cm = false;
        rp.n0_plus.push_back(proxy(t, 1, cp));
        rp.n0_minus.push_back(proxy(t, -1, cm));
        capped_plus.push_back(cp);
        capped_minus.push_back(cm);
    }

    const auto smallest = static_cast<std::size_t>(
        std::min_element(t_ladder.begin(), t_ladder.end()) - t_ladder.begin());
    rp.diverging_side = rp.n0_plus[smallest] >= rp.n0_minus[smallest] ? 1 : -1;
    const auto& vals = rp.diverging_side > 0 ? rp.n0_plus : rp.n0_minus;
    const auto& caps = rp.diverging_side > 0 ? capped_plus : capped_minus;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (caps[i]) {
            ++rp.capped;
            continue;
        }
        xs.push_back(t_ladder[i]);
        ys.push_back(vals[i]);
    }
    rp.fit = fit_loglog(xs, ys);

    const double admissible[] = {-0.5, -1.0, -2.0 / 3.0};
    double best = 1e300;
    for (double a : admissible) {
        if (std::abs(rp.fit.slope - a) < best) {
            best = std::abs(rp.fit.slope - a);
            rp.matched = a;
        }
    }
    if (best > 0.1)
        throw ClassificationError("fitted slope " + fmt17(rp.fit.slope) + " matches no admissible exponent");
    return rp;
}

}  // namespace eqlab
