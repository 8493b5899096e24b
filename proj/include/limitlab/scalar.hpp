#pragma once

#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace limitlab {

/// Extended precision used wherever a computation follows a geodesic far
/// toward the boundary. 128 decimal digits cover horizons up to ~200.
using Precise = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<128>,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
inline Scalar pi() {
  return boost::math::constants::pi<Scalar>();
}

template <typename Scalar>
inline double to_double(const Scalar& x) {
  return static_cast<double>(x);
}

// Inverse hyperbolic functions written out so the same code serves double and
// Precise (the multiprecision versions are slow and not uniformly available).
template <typename Scalar>
inline Scalar acosh_of(const Scalar& x) {
  using std::log;
  using std::sqrt;
  return log(x + sqrt(x * x - Scalar(1)));
}

template <typename Scalar>
inline Scalar asinh_of(const Scalar& x) {
  using std::log;
  using std::sqrt;
  using std::abs;
  const Scalar ax = abs(x);
  const Scalar r = log(ax + sqrt(ax * ax + Scalar(1)));
  return x < Scalar(0) ? Scalar(-r) : r;
}

template <>
inline double acosh_of<double>(const double& x) {
  return std::acosh(x);
}

template <>
inline double asinh_of<double>(const double& x) {
  return std::asinh(x);
}

}  // namespace limitlab
