#include "eqlab/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

namespace eqlab {

double signed_volume(const Eigen::Matrix3Xd& V, const Eigen::Matrix3Xi& F)
{
    const Vec3 base = V.col(0);
    double vol = 0.0;
    for (Eigen::Index f = 0; f < F.cols(); ++f) {
        const Vec3 a = V.col(F(0, f)) - base, b = V.col(F(1, f)) - base, c = V.col(F(2, f)) - base;
        vol += a.dot(b.cross(c));
    }
    return vol / 6.0;
}

Vec3 solid_centroid(const Eigen::Matrix3Xd& V, const Eigen::Matrix3Xi& F)
{
    const Vec3 base = V.col(0);
    double vol = 0.0;
    Vec3 acc = Vec3::Zero();
    for (Eigen::Index f = 0; f < F.cols(); ++f) {
        const Vec3 a = V.col(F(0, f)) - base, b = V.col(F(1, f)) - base, c = V.col(F(2, f)) - base;
        const double w = a.dot(b.cross(c));
        vol += w;
        acc += w * (a + b + c);
    }
    const double scale = (V.rowwise().maxCoeff() - V.rowwise().minCoeff()).norm();
    if (std::abs(vol) / 6.0 <= 1e-12 * scale * scale * scale) throw DegenerateError("solid has zero volume");
    return base + acc / (4.0 * vol);
}

TriMesh::TriMesh(Eigen::Matrix3Xd V, Eigen::Matrix3Xi F) : V_(std::move(V)), F_(std::move(F))
{
    const Eigen::Index nv = V_.cols(), nf = F_.cols();
    if (nv < 4 || nf < 4) throw MeshError("mesh needs at least 4 vertices and 4 faces");
    if (!V_.allFinite()) throw MeshError("mesh has non-finite coordinates");
    std::vector<int> used(static_cast<std::size_t>(nv), 0);
    for (Eigen::Index f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int v = F_(k, f);
            if (v < 0 || v >= nv) throw MeshError("face " + std::to_string(f) + " references a missing vertex");
            used[static_cast<std::size_t>(v)] = 1;
        }
        if (F_(0, f) == F_(1, f) || F_(1, f) == F_(2, f) || F_(0, f) == F_(2, f))
            throw MeshError("face " + std::to_string(f) + " repeats a vertex");
    }
    for (Eigen::Index v = 0; v < nv; ++v)
        if (!used[static_cast<std::size_t>(v)]) throw MeshError("vertex " + std::to_string(v) + " is unused");
    scale_ = (V_.rowwise().maxCoeff() - V_.rowwise().minCoeff()).norm();

    // Half-edges grouped by undirected key.
    struct Half {
        int lo, hi, face;
        bool forward;  // runs lo -> hi
    };
    std::vector<Half> halves;
    halves.reserve(static_cast<std::size_t>(3 * nf));
    for (Eigen::Index f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k) {
            const int a = F_(k, f), b = F_((k + 1) % 3, f);
            halves.push_back({std::min(a, b), std::max(a, b), static_cast<int>(f), a < b});
        }
    std::sort(halves.begin(), halves.end(), [](const Half& x, const Half& y) {
        return x.lo != y.lo ? x.lo < y.lo : (x.hi != y.hi ? x.hi < y.hi : x.face < y.face);
    });

    std::vector<std::array<int, 2>> edge_list;
    std::vector<std::array<int, 2>> pair_faces;
    std::vector<bool> same_dir;
    for (std::size_t i = 0; i < halves.size();) {
        std::size_t j = i;
        while (j < halves.size() && halves[j].lo == halves[i].lo && halves[j].hi == halves[i].hi) ++j;
        if (j - i != 2)
            throw MeshError("edge (" + std::to_string(halves[i].lo) + "," + std::to_string(halves[i].hi) + ") has " +
                            std::to_string(j - i) + " incident faces (mesh open or non-manifold)");
        edge_list.push_back({halves[i].lo, halves[i].hi});
        pair_faces.push_back({halves[i].face, halves[i + 1].face});
        same_dir.push_back(halves[i].forward == halves[i + 1].forward);
        i = j;
    }

    // Consistent orientation by breadth-first propagation over face adjacency.
    std::vector<std::vector<std::pair<int, bool>>> fadj(static_cast<std::size_t>(nf));
    for (std::size_t e = 0; e < edge_list.size(); ++e) {
        fadj[static_cast<std::size_t>(pair_faces[e][0])].push_back({pair_faces[e][1], same_dir[e]});
        fadj[static_cast<std::size_t>(pair_faces[e][1])].push_back({pair_faces[e][0], same_dir[e]});
    }
    std::vector<int> flip(static_cast<std::size_t>(nf), -1);
    std::deque<int> queue{0};
    flip[0] = 0;
    int reached = 1;
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop_front();
        for (auto [g, same] : fadj[static_cast<std::size_t>(f)]) {
            const int want = flip[static_cast<std::size_t>(f)] ^ (same ? 1 : 0);
            if (flip[static_cast<std::size_t>(g)] < 0) {
                flip[static_cast<std::size_t>(g)] = want;
                queue.push_back(g);
                ++reached;
            } else if (flip[static_cast<std::size_t>(g)] != want) {
                throw MeshError("mesh is not orientable near face " + std::to_string(g));
            }
        }
    }
    if (reached != nf) throw MeshError("mesh is not connected");
    for (Eigen::Index f = 0; f < nf; ++f)
        if (flip[static_cast<std::size_t>(f)]) std::swap(F_(1, f), F_(2, f));
    if (signed_volume(V_, F_) < 0) F_.row(1).swap(F_.row(2));

    const Eigen::Index ne = static_cast<Eigen::Index>(edge_list.size());
    if (nv - ne + nf != 2)
        throw MeshError("Euler characteristic V-E+F = " + std::to_string(nv - ne + nf) + ", expected 2");

    volume_ = signed_volume(V_, F_);
    centroid_ = solid_centroid(V_, F_);

    N_.resize(3, nf);
    for (Eigen::Index f = 0; f < nf; ++f) {
        const Vec3 a = V_.col(F_(0, f)), b = V_.col(F_(1, f)), c = V_.col(F_(2, f));
        const Vec3 n = (b - a).cross(c - a);
        if (n.norm() <= 1e-14 * scale_ * scale_) throw MeshError("face " + std::to_string(f) + " is degenerate");
        N_.col(f) = n.normalized();
        if (N_.col(f).dot((a + b + c) / 3.0 - centroid_) <= 0)
            throw MeshError("face " + std::to_string(f) + " is not outward oriented");
    }

    E_.resize(2, ne);
    EF_.resize(2, ne);
    for (Eigen::Index e = 0; e < ne; ++e) {
        const int a = edge_list[static_cast<std::size_t>(e)][0], b = edge_list[static_cast<std::size_t>(e)][1];
        E_(0, e) = a;
        E_(1, e) = b;
        int f0 = pair_faces[static_cast<std::size_t>(e)][0], f1 = pair_faces[static_cast<std::size_t>(e)][1];
        // EF(0) is the face traversing a -> b.
        bool f0_forward = false;
        for (int k = 0; k < 3; ++k)
            if (F_(k, f0) == a && F_((k + 1) % 3, f0) == b) f0_forward = true;
        if (!f0_forward) std::swap(f0, f1);
        EF_(0, e) = f0;
        EF_(1, e) = f1;
    }

    // Local convexity at every edge; global check on small meshes.
    const double tol = 1e-9 * scale_;
    for (Eigen::Index e = 0; e < ne; ++e) {
        for (int s = 0; s < 2; ++s) {
            const int f = EF_(s, e), g = EF_(1 - s, e);
            int w = -1;
            for (int k = 0; k < 3; ++k)
                if (F_(k, g) != E_(0, e) && F_(k, g) != E_(1, e)) w = F_(k, g);
            if (N_.col(f).dot(V_.col(w) - V_.col(E_(0, e))) > tol)
                throw MeshError("mesh is not convex at edge " + std::to_string(e));
        }
    }
    if (nv * nf <= 50'000'000) {
        for (Eigen::Index f = 0; f < nf; ++f) {
            const Eigen::VectorXd h = N_.col(f).transpose() * (V_.colwise() - V_.col(F_(0, f)));
            if (h.maxCoeff() > tol) throw MeshError("mesh is not convex: vertex above face " + std::to_string(f));
        }
    }

    adj_off_.assign(static_cast<std::size_t>(nv) + 1, 0);
    for (Eigen::Index e = 0; e < ne; ++e) {
        ++adj_off_[static_cast<std::size_t>(E_(0, e)) + 1];
        ++adj_off_[static_cast<std::size_t>(E_(1, e)) + 1];
    }
    std::partial_sum(adj_off_.begin(), adj_off_.end(), adj_off_.begin());
    adj_.assign(static_cast<std::size_t>(2 * ne), 0);
    std::vector<int> fill(adj_off_.begin(), adj_off_.end() - 1);
    double total = 0.0;
    for (Eigen::Index e = 0; e < ne; ++e) {
        const int a = E_(0, e), b = E_(1, e);
        adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(a)]++)] = b;
        adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(b)]++)] = a;
        total += (V_.col(a) - V_.col(b)).norm();
    }
    mean_edge_ = total / static_cast<double>(ne);
}

bool TriMesh::contains(const Vec3& p, double margin) const
{
    for (Eigen::Index f = 0; f < F_.cols(); ++f)
        if (N_.col(f).dot(p - V_.col(F_(0, f))) > -margin * scale_) return false;
    return true;
}

}  // namespace eqlab
