#include "eqlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace eqlab {

namespace {

// Sliding extremum of width 2r+1 centered at each index of v; with wrap the sequence is cyclic.
// Positions whose window leaves a non-cyclic range are left untouched.
template <typename Better>
void sliding(const double* v, int n, int stride, int r, bool wrap, double* out, int out_stride, Better better)
{
    std::deque<int> dq;
    const int lo = wrap ? -r : 0, hi = wrap ? n + r : n;
    auto at = [&](int k) { return v[static_cast<std::ptrdiff_t>(((k % n) + n) % n) * stride]; };
    for (int k = lo; k < hi; ++k) {
        while (!dq.empty() && !better(at(dq.back()), at(k))) dq.pop_back();
        dq.push_back(k);
        const int c = k - r;
        if (dq.front() < c - r) dq.pop_front();
        if (c - r >= lo && c >= 0 && c < n) out[static_cast<std::ptrdiff_t>(c) * out_stride] = at(dq.front());
    }
}

Eigen::MatrixXd window_extremum(const Eigen::MatrixXd& f, int r, bool wrap, bool max)
{
    const int rows = static_cast<int>(f.rows()), cols = static_cast<int>(f.cols());
    auto better = [max](double a, double b) { return max ? a > b : a < b; };
    Eigen::MatrixXd rowpass = f, out = f;
    // Column index runs along a row: stride rows in column-major storage.
    for (int i = 0; i < rows; ++i) sliding(f.data() + i, cols, rows, r, wrap, rowpass.data() + i, rows, better);
    for (int j = 0; j < cols; ++j)
        sliding(rowpass.data() + static_cast<std::ptrdiff_t>(j) * rows, rows, 1, r, false,
                out.data() + static_cast<std::ptrdiff_t>(j) * rows, 1, better);
    return out;
}

}  // namespace

GridExtrema grid_stationary(const Eigen::MatrixXd& f, int r, bool periodic_cols)
{
    if (r < 1) throw DomainError("grid-circle radius must be positive");
    const int rows = static_cast<int>(f.rows()), cols = static_cast<int>(f.cols());
    if (rows < 3 || cols < 3) throw DomainError("grid too small");
    GridExtrema out;
    out.r = r;
    auto col = [&](int j) { return periodic_cols ? ((j % cols) + cols) % cols : j; };

    const Eigen::MatrixXd wmin = window_extremum(f, r, periodic_cols, false);
    const Eigen::MatrixXd wmax = window_extremum(f, r, periodic_cols, true);
    const int j_lo = periodic_cols ? 0 : r, j_hi = periodic_cols ? cols - 1 : cols - 1 - r;
    for (int i = r; i <= rows - 1 - r; ++i)
        for (int j = j_lo; j <= j_hi; ++j) {
            const double v = f(i, j);
            const bool is_min = v == wmin(i, j), is_max = v == wmax(i, j);
            if (!is_min && !is_max) continue;
            for (int di = -r; di <= r; ++di)
                for (int dj = -r; dj <= r; ++dj)
                    if ((di || dj) && f(i + di, col(j + dj)) == v)
                        throw NongenericError("grid vertex", static_cast<std::ptrdiff_t>(i) * cols + j);
            (is_min ? out.minima : out.maxima).push_back({i, j});
        }

    for (int i = 1; i < rows - 1; ++i)
        for (int j = periodic_cols ? 0 : 1; j < (periodic_cols ? cols : cols - 1); ++j) {
            const double v = f(i, j);
            bool stat = true;
            for (auto [q, q2] : {std::pair{f(i - 1, j), f(i + 1, j)}, std::pair{f(i, col(j - 1)), f(i, col(j + 1))}}) {
                if (q == v || q2 == v) throw NongenericError("grid vertex", static_cast<std::ptrdiff_t>(i) * cols + j);
                stat = stat && (v > std::max(q, q2) || v < std::min(q, q2));
            }
            if (stat) out.stationary.push_back({i, j});
        }
    return out;
}

GridExtrema grid_stationary_stable(const Eigen::MatrixXd& f, int r0, int r_max, bool periodic_cols)
{
    if (r_max < 0) r_max = static_cast<int>(std::min(f.rows(), f.cols()) / 4);
    int r = std::max(1, std::min(r0, r_max));
    GridExtrema cur = grid_stationary(f, r, periodic_cols);
    int repeats = 0;
    while (repeats < 2 && 2 * r <= r_max) {
        r *= 2;
        GridExtrema next = grid_stationary(f, r, periodic_cols);
        const bool same = next.minima.size() == cur.minima.size() && next.maxima.size() == cur.maxima.size();
        repeats = same ? repeats + 1 : 0;
        cur = std::move(next);
    }
    return cur;
}

GlobalCounts ellipsoid_grid_counts(const Ellipsoid& e, const Vec3& o, int n)
{
    if (n < 16) throw DomainError("chart resolution too small");
    const double h = kTwoPi / n;
    const double lat_max = 85.0 * kPi / 180.0, lat_keep = 50.0 * kPi / 180.0;
    const int half = static_cast<int>(std::floor(lat_max / h));
    const int rows = 2 * half + 1;
    // Generic offsets keep mirror-symmetric samples off the grid.
    const double lat_off = 0.3137, lon_off = 0.2718;
    const int r_max = std::max(1, static_cast<int>(std::floor((lat_max - lat_keep) / h)) - 1);

    struct Hit {
        Vec3 p;
        bool min;
    };
    std::vector<Hit> hits;
    int r_used = 0;
    for (int chart = 0; chart < 2; ++chart) {
        auto point = [&](int i, int j) {
            const double lat = (i - half + lat_off) * h, lon = (j + lon_off) * h;
            const double cl = std::cos(lat), sl = std::sin(lat);
            return chart == 0 ? Vec3(e.a * cl * std::cos(lon), e.b * cl * std::sin(lon), e.c * sl)
                              : Vec3(e.a * sl, e.b * cl * std::cos(lon), e.c * cl * std::sin(lon));
        };
        Eigen::MatrixXd f(rows, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < rows; ++i) f(i, j) = (point(i, j) - o).squaredNorm();
        const GridExtrema g = grid_stationary_stable(f, 5, r_max, true);
        r_used = std::max(r_used, g.r);
        for (bool is_min : {true, false})
            for (const auto& q : is_min ? g.minima : g.maxima)
                if (std::abs((q.i - half + lat_off) * h) <= lat_keep) hits.push_back({point(q.i, q.j), is_min});
    }

    const double merge = 5.0 * h * std::max({e.a, e.b, e.c});
    GlobalCounts out;
    out.r = r_used;
    std::vector<Hit> kept;
    for (const auto& q : hits) {
        const bool dup = std::any_of(kept.begin(), kept.end(),
                                     [&](const Hit& k) { return k.min == q.min && (k.p - q.p).norm() < merge; });
        if (dup) continue;
        kept.push_back(q);
        (q.min ? out.S : out.U) += 1;
    }
    out.H = out.S + out.U - 2;
    return out;
}

}  // namespace eqlab
