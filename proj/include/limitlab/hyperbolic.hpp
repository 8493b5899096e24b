#pragma once

// Upper half-plane geometry. Arithmetic happens in the half-plane; boundary
// points carry projective coordinates and report positions as angles on the
// unit circle after the Cayley transform z -> (z - i) / (z + i).

#include <cmath>
#include <limits>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "limitlab/error.hpp"
#include "limitlab/scalar.hpp"

namespace limitlab {

inline constexpr double kClassifyTolerance = 1e-9;
inline constexpr double kBoundaryTolerance = 1e-10;
inline constexpr double kDeterminantTolerance = 1e-6;
inline constexpr double kSignTolerance = 1e-12;

/// Orientation-preserving isometry of the upper half-plane, stored as a
/// unit-determinant real 2x2 matrix with a canonical overall sign.
template <typename Scalar>
class Mobius {
 public:
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;

  Mobius() : m_(Matrix::Identity()) {}

  static Mobius identity() { return Mobius(); }

  static Mobius from_entries(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d) {
    Matrix m;
    m << a, b, c, d;
    return from_matrix(m);
  }

  /// Rejects non-finite entries and determinants further than 1e-6 from 1.
  static Mobius from_matrix(const Matrix& m) {
    using std::abs;
    using std::isfinite;
    for (int k = 0; k < 4; ++k) {
      if (!isfinite(m(k / 2, k % 2))) {
        throw Error(ErrorCode::InvalidInput, "Mobius entry is not finite");
      }
    }
    const Scalar det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (abs(det - Scalar(1)) > Scalar(kDeterminantTolerance)) {
      throw Error(ErrorCode::InvalidInput, "Mobius determinant deviates from 1 by more than 1e-6");
    }
    // Leave entries untouched when already unimodular to rounding, so that
    // serialized matrices read back bit-exactly.
    if (abs(det - Scalar(1)) <= Scalar(1e-14)) return Mobius(canonical_sign(m));
    return normalized(m);
  }

  /// Canonical sign only, for products of already valid maps. Rescaling by
  /// the computed determinant would inject cancellation error into large
  /// entries.
  static Mobius trusted(const Matrix& m) { return Mobius(canonical_sign(m)); }

  const Matrix& matrix() const { return m_; }
  Scalar a() const { return m_(0, 0); }
  Scalar b() const { return m_(0, 1); }
  Scalar c() const { return m_(1, 0); }
  Scalar d() const { return m_(1, 1); }
  Scalar trace() const { return m_(0, 0) + m_(1, 1); }

  Mobius inverse() const {
    Matrix inv;
    inv << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return Mobius(canonical_sign(inv));
  }

  template <typename To>
  Mobius<To> cast() const {
    return Mobius<To>::trusted(m_.template cast<To>());
  }

 private:
  explicit Mobius(const Matrix& m) : m_(m) {}

  static Matrix canonical_sign(Matrix m) {
    using std::abs;
    for (int k = 0; k < 4; ++k) {
      const Scalar& entry = m(k / 2, k % 2);
      if (abs(entry) > Scalar(kSignTolerance)) {
        if (entry < Scalar(0)) m = -m;
        break;
      }
    }
    return m;
  }

  static Mobius normalized(Matrix m) {
    using std::sqrt;
    const Scalar det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(det > Scalar(0))) {
      throw Error(ErrorCode::InvalidInput, "Mobius matrix has non-positive determinant");
    }
    m /= sqrt(det);
    return Mobius(canonical_sign(m));
  }

  Matrix m_;
};

template <typename Scalar>
Mobius<Scalar> compose(const Mobius<Scalar>& m, const Mobius<Scalar>& n) {
  return Mobius<Scalar>::trusted(m.matrix() * n.matrix());
}

template <typename Scalar>
Mobius<Scalar> operator*(const Mobius<Scalar>& m, const Mobius<Scalar>& n) {
  return compose(m, n);
}

template <typename Scalar>
Mobius<Scalar> power(const Mobius<Scalar>& m, int k) {
  Mobius<Scalar> base = k < 0 ? m.inverse() : m;
  Mobius<Scalar> result;
  for (int n = k < 0 ? -k : k; n > 0; n >>= 1) {
    if (n & 1) result = result * base;
    base = base * base;
  }
  return result;
}

/// Frobenius distance between the PSL(2,R) classes, i.e. min over the sign.
template <typename Scalar>
Scalar matrix_distance(const Mobius<Scalar>& m, const Mobius<Scalar>& n) {
  using std::min;
  const Scalar minus = (m.matrix() - n.matrix()).norm();
  const Scalar plus = (m.matrix() + n.matrix()).norm();
  return min(minus, plus);
}

template <typename Scalar>
struct InteriorPoint {
  Scalar x{0};
  Scalar y{1};

  static InteriorPoint i() { return {Scalar(0), Scalar(1)}; }

  static InteriorPoint checked(const Scalar& x, const Scalar& y) {
    using std::isfinite;
    if (!isfinite(x) || !isfinite(y) || !(y > Scalar(0))) {
      throw Error(ErrorCode::InvalidInput, "interior point needs finite x and y > 0");
    }
    return {x, y};
  }

  template <typename To>
  InteriorPoint<To> cast() const {
    return {static_cast<To>(x), static_cast<To>(y)};
  }
};

template <typename Scalar>
Scalar wrap_angle(Scalar theta) {
  using std::fmod;
  const Scalar two_pi = Scalar(2) * pi<Scalar>();
  theta = fmod(theta, two_pi);
  if (theta < Scalar(0)) theta += two_pi;
  if (theta >= two_pi) theta -= two_pi;
  if (theta == Scalar(0)) return Scalar(0);
  return theta;
}

/// Distance between two disc-angles along the circle, in [0, pi].
inline double angular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, 2.0 * pi<double>() - d);
}

/// Point of the extended real line, held in projective coordinates (u : v)
/// so the point at infinity needs no special case.
template <typename Scalar>
class BoundaryPoint {
 public:
  BoundaryPoint() : u_(1), v_(0) {}

  static BoundaryPoint infinity() { return BoundaryPoint(Scalar(1), Scalar(0)); }
  static BoundaryPoint from_real(const Scalar& x) { return from_projective(x, Scalar(1)); }

  static BoundaryPoint from_projective(Scalar u, Scalar v) {
    using std::abs;
    using std::sqrt;
    using std::isfinite;
    const Scalar norm = sqrt(u * u + v * v);
    if (!(norm > Scalar(0)) || !isfinite(norm)) {
      throw Error(ErrorCode::InvalidInput, "degenerate projective boundary coordinates");
    }
    u /= norm;
    v /= norm;
    if (v < Scalar(0) || (v == Scalar(0) && u < Scalar(0))) {
      u = -u;
      v = -v;
    }
    return BoundaryPoint(u, v);
  }

  /// Inverse of `angle()`: the half-plane point x = -cot(theta / 2).
  static BoundaryPoint from_angle(const Scalar& theta) {
    using std::cos;
    using std::sin;
    const Scalar half = theta / Scalar(2);
    return from_projective(cos(half), -sin(half));
  }

  /// Boundary point whose Cayley image is the direction (cx, cy) in the disc.
  static BoundaryPoint from_disc(const Scalar& cx, const Scalar& cy) {
    using std::abs;
    // x = -cy / (1 - cx) = -(1 + cx) / cy; take the better conditioned form.
    if (abs(Scalar(1) - cx) >= abs(Scalar(1) + cx)) return from_projective(-cy, Scalar(1) - cx);
    return from_projective(-(Scalar(1) + cx), cy);
  }

  const Scalar& u() const { return u_; }
  const Scalar& v() const { return v_; }
  bool is_infinity() const { return v_ == Scalar(0); }

  Scalar value() const {
    if (is_infinity()) return std::numeric_limits<Scalar>::infinity();
    return u_ / v_;
  }

  Scalar angle() const {
    using std::atan2;
    return wrap_angle(Scalar(-2) * atan2(v_, u_));
  }

  template <typename To>
  BoundaryPoint<To> cast() const {
    return BoundaryPoint<To>::from_projective(static_cast<To>(u_), static_cast<To>(v_));
  }

 private:
  BoundaryPoint(Scalar u, Scalar v) : u_(std::move(u)), v_(std::move(v)) {}

  Scalar u_;
  Scalar v_;
};

template <typename Scalar>
InteriorPoint<Scalar> apply(const Mobius<Scalar>& m, const InteriorPoint<Scalar>& p) {
  const Scalar dx = m.c() * p.x + m.d();
  const Scalar dy = m.c() * p.y;
  const Scalar nx = m.a() * p.x + m.b();
  const Scalar ny = m.a() * p.y;
  const Scalar den = dx * dx + dy * dy;
  return {(nx * dx + ny * dy) / den, p.y / den};
}

template <typename Scalar>
BoundaryPoint<Scalar> apply(const Mobius<Scalar>& m, const BoundaryPoint<Scalar>& p) {
  return BoundaryPoint<Scalar>::from_projective(m.a() * p.u() + m.b() * p.v(),
                                                m.c() * p.u() + m.d() * p.v());
}

/// cosh of the hyperbolic distance; monotone in the distance and purely algebraic.
template <typename Scalar>
Scalar cosh_distance(const InteriorPoint<Scalar>& p, const InteriorPoint<Scalar>& q) {
  const Scalar dx = p.x - q.x;
  const Scalar dy = p.y - q.y;
  return Scalar(1) + (dx * dx + dy * dy) / (Scalar(2) * p.y * q.y);
}

template <typename Scalar>
Scalar hyperbolic_distance(const InteriorPoint<Scalar>& p, const InteriorPoint<Scalar>& q) {
  using std::sqrt;
  const Scalar dx = p.x - q.x;
  const Scalar dy = p.y - q.y;
  return Scalar(2) * asinh_of<Scalar>(sqrt((dx * dx + dy * dy) / (Scalar(4) * p.y * q.y)));
}

/// Distance from i, the default basepoint (the disc origin).
template <typename Scalar>
Scalar distance_from_i(const InteriorPoint<Scalar>& p) {
  return hyperbolic_distance(p, InteriorPoint<Scalar>::i());
}

/// Displacement d(i, m(i)); cosh of it is half the squared Frobenius norm.
template <typename Scalar>
Scalar displacement_at_i(const Mobius<Scalar>& m) {
  using std::max;
  const Scalar half_norm = m.matrix().squaredNorm() / Scalar(2);
  return acosh_of<Scalar>(max(half_norm, Scalar(1)));
}

template <typename Scalar>
class Geodesic {
 public:
  Geodesic(BoundaryPoint<Scalar> from, BoundaryPoint<Scalar> to) : from_(std::move(from)), to_(std::move(to)) {
    if (angular_distance(to_double(from_.angle()), to_double(to_.angle())) <= kBoundaryTolerance) {
      throw Error(ErrorCode::InvalidInput, "geodesic endpoints coincide");
    }
  }

  const BoundaryPoint<Scalar>& from() const { return from_; }
  const BoundaryPoint<Scalar>& to() const { return to_; }

 private:
  BoundaryPoint<Scalar> from_;
  BoundaryPoint<Scalar> to_;
};

template <typename Scalar>
Geodesic<Scalar> apply(const Mobius<Scalar>& m, const Geodesic<Scalar>& g) {
  return Geodesic<Scalar>(apply(m, g.from()), apply(m, g.to()));
}

enum class IsometryKind { identity, loxodromic, parabolic, elliptic };

std::string_view to_string(IsometryKind kind);

struct IsometryClass {
  IsometryKind kind = IsometryKind::identity;
  double translation_length = 0.0;
};

template <typename Scalar>
IsometryClass classify_isometry(const Mobius<Scalar>& m) {
  using std::abs;
  if (to_double(matrix_distance(m, Mobius<Scalar>::identity())) < kClassifyTolerance) {
    return {IsometryKind::identity, 0.0};
  }
  const Scalar t = abs(m.trace());
  if (t > Scalar(2 + kClassifyTolerance)) {
    return {IsometryKind::loxodromic, to_double(Scalar(2) * acosh_of<Scalar>(t / Scalar(2)))};
  }
  if (t < Scalar(2 - kClassifyTolerance)) return {IsometryKind::elliptic, 0.0};
  return {IsometryKind::parabolic, 0.0};
}

/// Axis of a loxodromic map, ordered (repelling, attracting).
template <typename Scalar>
Geodesic<Scalar> axis_of(const Mobius<Scalar>& m) {
  using std::abs;
  using std::max;
  using std::sqrt;
  if (classify_isometry(m).kind != IsometryKind::loxodromic) {
    throw Error(ErrorCode::NotLoxodromic, "axis_of needs a loxodromic map");
  }
  const Scalar tr = m.trace();
  const Scalar root = sqrt(tr * tr - Scalar(4));
  const Scalar big = tr > Scalar(0) ? (tr + root) / Scalar(2) : (tr - root) / Scalar(2);
  const Scalar small = Scalar(1) / big;
  auto fixed_point = [&](const Scalar& lambda) {
    const Scalar u1 = m.b(), v1 = lambda - m.a();
    const Scalar u2 = lambda - m.d(), v2 = m.c();
    if (max(abs(u1), abs(v1)) >= max(abs(u2), abs(v2))) {
      return BoundaryPoint<Scalar>::from_projective(u1, v1);
    }
    return BoundaryPoint<Scalar>::from_projective(u2, v2);
  };
  return Geodesic<Scalar>(fixed_point(small), fixed_point(big));
}

template <typename Scalar>
BoundaryPoint<Scalar> attracting_fixed_point(const Mobius<Scalar>& m) {
  return axis_of(m).to();
}

enum class CrossingKind { disjoint, cross, share_endpoint };

std::string_view to_string(CrossingKind kind);

/// Crossing test on disc-angles: interleaving endpoints cross; endpoints
/// closer than 1e-10 count as shared.
CrossingKind geodesics_cross_angles(double g_from, double g_to, double h_from, double h_to);

template <typename Scalar>
CrossingKind geodesics_cross(const Geodesic<Scalar>& g, const Geodesic<Scalar>& h) {
  return geodesics_cross_angles(to_double(g.from().angle()), to_double(g.to().angle()),
                                to_double(h.from().angle()), to_double(h.to().angle()));
}

// Elementary isometries. `disc_rotation(phi)` rotates the disc picture by
// +phi about the origin (fixing i); `axis_translation(t)` moves i a distance
// t up the imaginary axis; `move_to_i(z)` sends z to i along a horizontal
// shift followed by a dilation.

template <typename Scalar>
Mobius<Scalar> disc_rotation(const Scalar& phi) {
  using std::cos;
  using std::sin;
  const Scalar h = phi / Scalar(2);
  return Mobius<Scalar>::trusted((typename Mobius<Scalar>::Matrix() << cos(h), sin(h), -sin(h), cos(h)).finished());
}

template <typename Scalar>
Mobius<Scalar> axis_translation(const Scalar& t) {
  using std::exp;
  const Scalar e = exp(t / Scalar(2));
  return Mobius<Scalar>::trusted((typename Mobius<Scalar>::Matrix() << e, Scalar(0), Scalar(0), Scalar(1) / e).finished());
}

template <typename Scalar>
Mobius<Scalar> move_to_i(const InteriorPoint<Scalar>& z) {
  using std::sqrt;
  const Scalar s = sqrt(z.y);
  return Mobius<Scalar>::trusted(
      (typename Mobius<Scalar>::Matrix() << Scalar(1) / s, -z.x / s, Scalar(0), s).finished());
}

/// Point at hyperbolic distance t from z0 along the geodesic ray toward `target`.
template <typename Scalar>
InteriorPoint<Scalar> point_along_ray(const InteriorPoint<Scalar>& z0, const BoundaryPoint<Scalar>& target,
                                      const Scalar& t) {
  using std::exp;
  const Mobius<Scalar> to_i = move_to_i(z0);
  const BoundaryPoint<Scalar> tau = apply(to_i, target);
  // Cayley image of tau: (u - iv)^2 / (u^2 + v^2), with (u, v) already unit.
  const Scalar ex = tau.u() * tau.u() - tau.v() * tau.v();
  const Scalar ey = Scalar(-2) * tau.u() * tau.v();
  const Scalar big = exp(t);
  const Scalar r = (big - Scalar(1)) / (big + Scalar(1));
  const Scalar one_minus_r2 = Scalar(4) * big / ((big + Scalar(1)) * (big + Scalar(1)));
  const Scalar wx = r * ex;
  const Scalar wy = r * ey;
  const Scalar den = (Scalar(1) - wx) * (Scalar(1) - wx) + wy * wy;
  const InteriorPoint<Scalar> local{Scalar(-2) * wy / den, one_minus_r2 / den};
  return apply(to_i.inverse(), local);
}

/// Forward endpoint of the geodesic ray from z0 through z1.
template <typename Scalar>
BoundaryPoint<Scalar> ray_endpoint(const InteriorPoint<Scalar>& z0, const InteriorPoint<Scalar>& z1) {
  using std::sqrt;
  const Mobius<Scalar> to_i = move_to_i(z0);
  const InteriorPoint<Scalar> w = apply(to_i, z1);
  // Cayley image (w - i) / (w + i) has the direction of the ray from the origin.
  const Scalar den = w.x * w.x + (w.y + Scalar(1)) * (w.y + Scalar(1));
  const Scalar cx = (w.x * w.x + w.y * w.y - Scalar(1)) / den;
  const Scalar cy = Scalar(-2) * w.x / den;
  const Scalar norm = sqrt(cx * cx + cy * cy);
  if (!(norm > Scalar(0))) throw Error(ErrorCode::InvalidInput, "ray_endpoint needs distinct points");
  return apply(to_i.inverse(), BoundaryPoint<Scalar>::from_disc(cx / norm, cy / norm));
}

/// Distance from p to the geodesic arc [z0, z1] (closest point may be an end).
template <typename Scalar>
double distance_to_segment(const InteriorPoint<Scalar>& p, const InteriorPoint<Scalar>& z0,
                           const InteriorPoint<Scalar>& z1);

/// Isometry sending z0 to i and z1 to a point i*exp(D) on the imaginary axis.
template <typename Scalar>
Mobius<Scalar> segment_frame(const InteriorPoint<Scalar>& z0, const InteriorPoint<Scalar>& z1) {
  using std::atan2;
  const Mobius<Scalar> to_i = move_to_i(z0);
  const InteriorPoint<Scalar> w = apply(to_i, z1);
  // Rotate about i so that the disc direction of w becomes angle 0 (toward infinity).
  const Scalar den = w.x * w.x + (w.y + Scalar(1)) * (w.y + Scalar(1));
  const Scalar cx = (w.x * w.x + w.y * w.y - Scalar(1)) / den;
  const Scalar cy = Scalar(-2) * w.x / den;
  return disc_rotation<Scalar>(-atan2(cy, cx)) * to_i;
}

template <typename Scalar>
double distance_to_segment(const InteriorPoint<Scalar>& p, const InteriorPoint<Scalar>& z0,
                           const InteriorPoint<Scalar>& z1) {
  const Mobius<Scalar> frame = segment_frame(z0, z1);
  const InteriorPoint<Scalar> q = apply(frame, p);
  const InteriorPoint<Scalar> end = apply(frame, z1);
  // In the frame the segment is {i*s : 1 <= s <= end.y}; beyond its ends the
  // nearest point is an endpoint.
  const Scalar r2 = q.x * q.x + q.y * q.y;
  if (r2 < Scalar(1)) return to_double(hyperbolic_distance(q, InteriorPoint<Scalar>::i()));
  if (r2 > end.y * end.y) return to_double(hyperbolic_distance(q, InteriorPoint<Scalar>{Scalar(0), end.y}));
  using std::abs;
  return std::asinh(to_double(abs(q.x) / q.y));
}

/// Isometry sending g.from() to 0 and g.to() to infinity.
template <typename Scalar>
Mobius<Scalar> axis_frame(const Geodesic<Scalar>& g) {
  using std::sqrt;
  typename Mobius<Scalar>::Matrix f;
  f << g.from().v(), -g.from().u(), g.to().v(), -g.to().u();
  Scalar det = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
  if (det < Scalar(0)) {
    f.row(0) = -f.row(0);
    det = -det;
  }
  return Mobius<Scalar>::trusted(f / sqrt(det));
}

/// Cayley image (z - i) / (z + i) in the unit disc.
template <typename Scalar>
std::pair<Scalar, Scalar> to_disc(const InteriorPoint<Scalar>& z) {
  const Scalar den = z.x * z.x + (z.y + Scalar(1)) * (z.y + Scalar(1));
  return {(z.x * z.x + z.y * z.y - Scalar(1)) / den, Scalar(-2) * z.x / den};
}

/// Isometric circle of m read in the disc model: |conj(beta) z + conj(alpha)| = 1.
struct DiscCircle {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 0.0;
};

DiscCircle isometric_circle(const Mobius<double>& m);

}  // namespace limitlab
