#include "eqlab/discretize.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace eqlab {

int resolve_threads(int requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EQLAB_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

MonteCarloResult monte_carlo_random_mesh(const SmoothCurve& curve, const Vec2& o, int n, double delta,
                                         std::int64_t trials, std::uint64_t seed, int threads, double tau0)
{
    if (n < 2) throw DomainError("random mesh needs n >= 2");
    if (trials < 1) throw DomainError("trials must be positive");
    if (!(delta > 0)) throw DomainError("delta must be positive");
    if (2 * delta >= curve.period() || (!curve.closed() && (tau0 - delta < curve.lo() || tau0 + delta > curve.hi())))
        throw DomainError("delta exceeds the curve domain");

    threads = resolve_threads(threads);
    const int blocks = 64;
    std::vector<std::int64_t> sum(blocks, 0), sum2(blocks, 0);
    parallel_for(blocks, threads, [&](std::int64_t b) {
        std::vector<double> t(n);
        Eigen::Matrix2Xd q(2, n);
        const std::int64_t lo = trials * b / blocks, hi = trials * (b + 1) / blocks;
        for (std::int64_t trial = lo; trial < hi; ++trial) {
            auto g = substream(seed, static_cast<std::uint64_t>(trial));
            for (int i = 0; i < n; ++i) t[i] = tau0 - delta + 2.0 * delta * uniform01(g);
            std::sort(t.begin(), t.end());
            for (int i = 0; i < n; ++i) q.col(i) = curve.eval(t[i]);
            std::int64_t c = 0;
            // Random parameters are generic almost surely, so the tie band is off.
            for (int i = 0; i + 1 < n; ++i)
                if (edge_test(o, q.col(i), q.col(i + 1), 0.0) == Verdict::Yes) ++c;
            sum[b] += c;
            sum2[b] += c * c;
        }
    });

    std::int64_t s = 0, s2 = 0;
    for (int b = 0; b < blocks; ++b) {
        s += sum[b];
        s2 += sum2[b];
    }
    MonteCarloResult r;
    r.trials = trials;
    r.seed = seed;
    const double m = static_cast<double>(s) / static_cast<double>(trials);
    r.mean = m;
    if (trials > 1) {
        const double var = (static_cast<double>(s2) - static_cast<double>(trials) * m * m) /
                           static_cast<double>(trials - 1);
        r.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
    }
    return r;
}

}  // namespace eqlab
