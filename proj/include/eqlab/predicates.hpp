#pragma once

#include "eqlab/common.hpp"

namespace eqlab {

enum class Verdict { No, Yes, Nongeneric };

// Stable point of |x - o| on the open segment (p, q). `tie` is an absolute band
// for both inner products.
template <typename O, typename P, typename Q>
Verdict edge_test(const Eigen::MatrixBase<O>& o, const Eigen::MatrixBase<P>& p, const Eigen::MatrixBase<Q>& q,
                  typename O::Scalar tie)
{
    const auto d = (q - p).eval();
    const auto a = (p - o).dot(d);
    const auto b = (q - o).dot(d);
    if (std::abs(a) < tie || std::abs(b) < tie) return Verdict::Nongeneric;
    return (a < 0 && b > 0) ? Verdict::Yes : Verdict::No;
}

template <typename O, typename P, typename Q>
auto perpendicular_foot(const Eigen::MatrixBase<O>& o, const Eigen::MatrixBase<P>& p, const Eigen::MatrixBase<Q>& q)
{
    const auto d = (q - p).eval();
    return (p + d * ((o - p).dot(d) / d.squaredNorm())).eval();
}

// |x - o| has a strict local maximum at v along the chain prev, v, next.
template <typename O, typename A, typename V, typename B>
Verdict vertex_test(const Eigen::MatrixBase<O>& o, const Eigen::MatrixBase<A>& prev, const Eigen::MatrixBase<V>& v,
                    const Eigen::MatrixBase<B>& next, typename O::Scalar tie)
{
    const auto r = (v - o).eval();
    const auto a = r.dot(next - v);
    const auto b = r.dot(prev - v);
    if (std::abs(a) < tie || std::abs(b) < tie) return Verdict::Nongeneric;
    return (a < 0 && b < 0) ? Verdict::Yes : Verdict::No;
}

}  // namespace eqlab
