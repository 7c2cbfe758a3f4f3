#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eqlab {

template <typename Scalar> using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar> using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
using Vec2 = Vec2T<double>;
using Vec3 = Vec3T<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested capability outside what the object provides (derivative order, constant curvature, ...).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class OrderTooHighError : public UnsupportedError {
public:
    using UnsupportedError::UnsupportedError;
};

// Geometric degeneracy: zero tangent, vanishing curvature, on-evolute point, zero volume.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// Input outside the admissible range: parameters, reference points, sizes.
class DomainError : public Error {
public:
    using Error::Error;
};

// A predicate fell inside its tie band. Carries the offending feature.
class NongenericError : public Error {
public:
    NongenericError(const std::string& feature, std::ptrdiff_t index)
        : Error("nongeneric configuration at " + feature + " " + std::to_string(index)),
          feature_(feature), index_(index) {}
    const std::string& feature() const { return feature_; }
    std::ptrdiff_t index() const { return index_; }

private:
    std::string feature_;
    std::ptrdiff_t index_;
};

class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double suggested_dt)
        : Error(what), suggested_dt_(suggested_dt) {}
    double suggested_dt() const { return suggested_dt_; }

private:
    double suggested_dt_;
};

// Inconsistent event logs and nontransverse crossings.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class ClassificationError : public Error {
public:
    using Error::Error;
};

class MeshError : public Error {
public:
    using Error::Error;
};

template <typename A, typename B>
inline typename A::Scalar cross2(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

// Counterclockwise quarter turn.
template <typename A>
inline Vec2T<typename A::Scalar> perp(const Eigen::MatrixBase<A>& a)
{
    return Vec2T<typename A::Scalar>(-a.y(), a.x());
}

}  // namespace eqlab
