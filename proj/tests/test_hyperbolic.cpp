#include <doctest.h>

#include <random>

#include "limitlab/hyperbolic.hpp"
#include "oracles.hpp"

using namespace limitlab;
using M = Mobius<double>;
using P = InteriorPoint<double>;
using B = BoundaryPoint<double>;

namespace {

M random_mobius(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  return disc_rotation(angle(rng)) * axis_translation(shift(rng)) * disc_rotation(angle(rng));
}

P random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-4.0, 4.0);
  std::uniform_real_distribution<double> logy(-2.0, 2.0);
  return {x(rng), std::exp(logy(rng))};
}

bool close(const M& m, const M& n, double tol) { return matrix_distance(m, n) < tol; }

}  // namespace

TEST_SUITE("hyperbolic_core") {
  TEST_CASE("composition") {
    const M diag = M::from_entries(2, 0, 0, 0.5);
    const M shear = M::from_entries(1, 1, 0, 1);
    CHECK(close(M::identity() * shear, shear, 1e-15));
    CHECK(close(shear * shear.inverse(), M::identity(), 1e-10));
    CHECK(close(diag * diag, M::from_entries(4, 0, 0, 0.25), 1e-15));
  }

  TEST_CASE("construction rejects bad matrices") {
    CHECK_THROWS_AS(M::from_entries(2, 0, 0, 2), Error);
    CHECK_THROWS_AS(M::from_entries(std::nan(""), 0, 0, 1), Error);
  }

  TEST_CASE("canonical sign") {
    const M m = M::from_entries(-2, 0, 0, -0.5);
    CHECK(m.a() > 0);
    const M n = M::from_entries(0, -1, 1, 0);
    CHECK(n.b() > 0);
  }

  TEST_CASE("actions") {
    const P i = P::i();
    const P image = apply(M::identity(), i);
    CHECK(image.x == 0.0);
    CHECK(image.y == 1.0);
    const P four = apply(M::from_entries(2, 0, 0, 0.5), i);
    CHECK(four.x == doctest::Approx(0.0));
    CHECK(four.y == doctest::Approx(4.0));
    CHECK(apply(M::from_entries(1, 1, 0, 1), B::infinity()).is_infinity());
    // A boundary pole goes to infinity.
    CHECK(apply(M::from_entries(1, 0, 1, 1), B::from_real(-1.0)).is_infinity());
  }

  TEST_CASE("classification") {
    const IsometryClass lox = classify_isometry(M::from_entries(2, 0, 0, 0.5));
    CHECK(lox.kind == IsometryKind::loxodromic);
    CHECK(lox.translation_length == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(classify_isometry(M::from_entries(1, 1, 0, 1)).kind == IsometryKind::parabolic);
    CHECK(classify_isometry(disc_rotation(M_PI / 3)).kind == IsometryKind::elliptic);
    CHECK(classify_isometry(M::identity()).kind == IsometryKind::identity);
  }

  TEST_CASE("axes") {
    const Geodesic<double> g = axis_of(M::from_entries(2, 0, 0, 0.5));
    CHECK(g.from().value() == doctest::Approx(0.0));
    CHECK(g.to().is_infinity());
    const M shear = M::from_entries(1, 1, 0, 1);
    const Geodesic<double> h = axis_of(shear * M::from_entries(2, 0, 0, 0.5) * shear.inverse());
    CHECK(h.from().value() == doctest::Approx(1.0));
    CHECK(h.to().is_infinity());
    CHECK_THROWS_AS(axis_of(shear), Error);
    try {
      axis_of(shear);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotLoxodromic);
    }
  }

  TEST_CASE("distances") {
    const P i = P::i();
    CHECK(hyperbolic_distance(i, i) == 0.0);
    CHECK(hyperbolic_distance(i, P{0, 2}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(hyperbolic_distance(i, P{1, 1}) == doctest::Approx(std::acosh(1.5)).epsilon(1e-14));
  }

  TEST_CASE("distance agrees with the disc-model formula") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
      const P p = random_point(rng);
      const P q = random_point(rng);
      const double expected = oracle::distance({p.x, p.y}, {q.x, q.y});
      CHECK(hyperbolic_distance(p, q) == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  TEST_CASE("crossings") {
    const Geodesic<double> imaginary(B::from_real(0.0), B::infinity());
    CHECK(geodesics_cross(imaginary, Geodesic<double>(B::from_real(-1.0), B::from_real(1.0))) == CrossingKind::cross);
    CHECK(geodesics_cross(Geodesic<double>(B::from_real(0.0), B::from_real(1.0)),
                          Geodesic<double>(B::from_real(2.0), B::from_real(3.0))) == CrossingKind::disjoint);
    CHECK(geodesics_cross(imaginary, Geodesic<double>(B::from_real(0.0), B::from_real(1.0))) ==
          CrossingKind::share_endpoint);
    CHECK_THROWS_AS(Geodesic<double>(B::from_real(1.0), B::from_real(1.0)), Error);
  }

  TEST_CASE("boundary angles follow the Cayley transform") {
    for (double x : {-100.0, -2.0, -0.5, 0.0, 0.25, 1.0, 7.0, 1e6}) {
      const double angle = B::from_real(x).angle();
      CHECK(oracle::circle_distance(angle, oracle::boundary_angle(x)) < 1e-12);
      CHECK(angular_distance(B::from_angle(angle).angle(), angle) < 1e-10);
    }
    CHECK(B::infinity().angle() == 0.0);
  }

  TEST_CASE("rays") {
    const P i = P::i();
    const P up = point_along_ray(i, B::infinity(), 2.0);
    CHECK(up.x == doctest::Approx(0.0));
    CHECK(up.y == doctest::Approx(std::exp(2.0)));
    const B end = ray_endpoint(P{1, 1}, P{1, 3});
    CHECK(end.is_infinity());
    const M frame = segment_frame(P{2, 0.5}, P{-1, 3});
    const P a = apply(frame, P{2, 0.5});
    const P b = apply(frame, P{-1, 3});
    CHECK(a.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.y == doctest::Approx(1.0));
    CHECK(b.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::log(b.y) == doctest::Approx(hyperbolic_distance(P{2, 0.5}, P{-1, 3})));
  }

  TEST_CASE("isometry invariance of distance") {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const M m = random_mobius(rng);
      const P p = random_point(rng);
      const P q = random_point(rng);
      worst = std::max(worst, std::abs(hyperbolic_distance(apply(m, p), apply(m, q)) - hyperbolic_distance(p, q)));
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("classification is conjugation invariant") {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 200; ++k) {
      const M m = random_mobius(rng);
      const M n = random_mobius(rng);
      const IsometryClass a = classify_isometry(m);
      const IsometryClass b = classify_isometry(n * m * n.inverse());
      CHECK(a.kind == b.kind);
      if (a.kind == IsometryKind::loxodromic) CHECK(std::abs(a.translation_length - b.translation_length) < 1e-9);
    }
  }

  TEST_CASE("axes are equivariant") {
    std::mt19937_64 rng(3);
    const M m = M::from_entries(3, 0, 0, 1.0 / 3);
    for (int k = 0; k < 200; ++k) {
      const M n = random_mobius(rng);
      const Geodesic<double> g = axis_of(n * m * n.inverse());
      CHECK(angular_distance(g.from().angle(), apply(n, B::from_real(0.0)).angle()) < 1e-9);
      CHECK(angular_distance(g.to().angle(), apply(n, B::infinity()).angle()) < 1e-9);
    }
  }

  TEST_CASE("loxodromic fixed points attract") {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
      M m = random_mobius(rng);
      if (classify_isometry(m).kind != IsometryKind::loxodromic) continue;
      if (classify_isometry(m).translation_length < 0.5) m = m * m * m;
      const P p = random_point(rng);
      const P far = apply(power(m, 40), p);
      const double angle = std::arg(oracle::cayley({far.x, far.y}));
      CHECK(oracle::circle_distance(angle, attracting_fixed_point(m).angle()) < 1e-6);
    }
  }

  TEST_CASE("extended precision matches double") {
    const Mobius<Precise> m = Mobius<Precise>::from_entries(Precise(3), Precise(1), Precise(2), Precise(1));
    const InteriorPoint<Precise> p{Precise("0.3"), Precise("1.7")};
    const double d = to_double(hyperbolic_distance(apply(m, p), p));
    CHECK(d == doctest::Approx(hyperbolic_distance(apply(M::from_entries(3, 1, 2, 1), P{0.3, 1.7}), P{0.3, 1.7})));
  }
}
