#include <doctest.h>

#include <numeric>

#include "limitlab/limit_analysis.hpp"
#include "oracles.hpp"

using namespace limitlab;

namespace {

using oracle::cplx;

LimitCloud cloud_of(std::vector<double> angles) {
  return make_cloud(angles, std::vector<std::uint8_t>(angles.size(), 1));
}

// Real fixed points of x -> (ax + b)/(cx + d) from the quadratic formula.
std::array<double, 2> fixed_points(const Mobius<double>& m) {
  const double disc = std::sqrt(std::pow(m.a() + m.d(), 2) - 4.0);
  if (m.c() == 0.0) return {m.b() / (m.d() - m.a()), std::numeric_limits<double>::infinity()};
  return {(m.a() - m.d() + disc) / (2.0 * m.c()), (m.a() - m.d() - disc) / (2.0 * m.c())};
}

double angle_of(double x) { return std::isinf(x) ? 0.0 : oracle::boundary_angle(x); }

// Isometric circle |conj(beta) z + conj(alpha)| = 1 of the disc-model matrix C M C^-1.
struct Circle {
  cplx centre;
  double radius;
};

Circle disc_isometric_circle(const Mobius<double>& m) {
  const cplx i(0, 1);
  const cplx c[2][2] = {{1.0, -i}, {1.0, i}};
  const cplx cinv[2][2] = {{i / (2.0 * i), i / (2.0 * i)}, {-1.0 / (2.0 * i), 1.0 / (2.0 * i)}};
  const double mm[2][2] = {{m.a(), m.b()}, {m.c(), m.d()}};
  cplx t[2][2]{};
  cplx r[2][2]{};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int k = 0; k < 2; ++k) t[p][q] += c[p][k] * mm[k][q];
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int k = 0; k < 2; ++k) r[p][q] += t[p][k] * cinv[k][q];
  // r = [[alpha, beta], [conj beta, conj alpha]]; the circle is |r10 z + r11| = 1.
  return {-r[1][1] / r[1][0], 1.0 / std::abs(r[1][0])};
}

}  // namespace

TEST_SUITE("limit_analysis") {
  TEST_CASE("cyclic subgroup limit set is the fixed-point pair") {
    const MarkedGroup g = build_genus2_group();
    for (const char* w : {"a1", "b2", "a1 b1"}) {
      const Word word = g.parse_word(w);
      const LimitCloud cloud = approximate_limit_set(g, CyclicSubgroup{word, 64}, 6);
      REQUIRE(cloud.size() == 2);
      const auto fp = fixed_points(g.evaluate(word));
      for (double x : fp) {
        const double a = angle_of(x);
        CHECK(std::min(oracle::circle_distance(a, cloud.angles[0]), oracle::circle_distance(a, cloud.angles[1])) <
              1e-9);
      }
    }
  }

  TEST_CASE("schottky cloud lies in the isometric disks") {
    const MarkedGroup s = build_schottky_group(3.0);
    std::vector<Circle> circles;
    for (const Generator& gen : s.generators()) {
      circles.push_back(disc_isometric_circle(gen.matrix));
      circles.push_back(disc_isometric_circle(gen.matrix.inverse()));
    }
    const LimitCloud cloud = approximate_limit_set(s, WholeGroup{}, 8);
    CHECK(cloud.size() > 1000);
    std::size_t outside = 0;
    for (double a : cloud.angles) {
      const cplx z = std::polar(1.0, a);
      bool inside = false;
      for (const Circle& c : circles) inside = inside || std::abs(z - c.centre) <= c.radius + 1e-9;
      if (!inside) ++outside;
    }
    CHECK(outside == 0);
  }

  TEST_CASE("limit set gaps shrink with depth") {
    const MarkedGroup g = build_genus2_group();
    double previous = 2.0 * M_PI;
    for (int depth = 2; depth <= 5; ++depth) {
      const double gap = max_angular_gap(approximate_limit_set(g, WholeGroup{}, depth));
      CHECK(gap <= previous);
      previous = gap;
    }
    CHECK(previous < 0.5);
  }

  TEST_CASE("rank-one orbit counts") {
    const MarkedGroup h("rank1", {{"g", Mobius<double>::from_entries(2, 0, 0, 0.5)}}, std::nullopt, {});
    EnumerationLimits limits;
    limits.max_depth = 30;
    const OrbitCounts counts = orbit_counts(h, WholeGroup{}, 30, InteriorPoint<double>::i(), limits);
    REQUIRE(counts.radii.size() == 61);
    for (std::size_t k = 0; k < counts.radii.size(); ++k) {
      const double expected = 2.0 * std::log(2.0) * static_cast<double>((k + 1) / 2);
      CHECK(counts.radii[k] == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(counts.count_within(2.0 * std::log(2.0) + 1e-9) == 3);
    CHECK(poincare_partial_sum(counts, 1.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(poincare_partial_sum(counts, 0.0), Error);
  }

  TEST_CASE("cyclic subgroup has exponent near zero") {
    const MarkedGroup g = build_genus2_group();
    const OrbitCounts counts = orbit_counts(g, CyclicSubgroup{g.parse_word("a1"), 64}, 6);
    CHECK_THROWS_AS(estimate_delta(counts), Error);
    const MarkedGroup h("rank1", {{"g", Mobius<double>::from_entries(1.2, 0, 0, 1 / 1.2)}}, std::nullopt, {});
    EnumerationLimits limits;
    limits.max_depth = 200;
    CHECK(estimate_delta(orbit_counts(h, WholeGroup{}, 200, InteriorPoint<double>::i(), limits)).delta_hat < 0.1);
  }

  TEST_CASE("synthetic exponential growth") {
    OrbitCounts counts;
    for (std::size_t k = 1; k <= 200000; ++k) {
      counts.radii.push_back(2.0 * std::log(static_cast<double>(k)));
      counts.counts.push_back(k);
    }
    const DeltaEstimate est = estimate_delta(counts);
    CHECK(est.delta_hat == doctest::Approx(0.5).epsilon(0.01));
    CHECK(est.r_hi == doctest::Approx(0.9 * counts.radii.back()));
  }

  TEST_CASE("box dimension") {
    std::vector<double> uniform(10000);
    for (std::size_t k = 0; k < uniform.size(); ++k) uniform[k] = 2.0 * M_PI * (k + 0.5) / uniform.size();
    const std::vector<double> scales{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    CHECK(box_dimension(cloud_of(uniform), scales) == doctest::Approx(1.0).epsilon(0.02));

    LimitCloud pair;
    for (int k = 0; k < 100; ++k) {
      pair.angles.push_back(1.00005 + k * 1e-7);
      pair.word_lengths.push_back(1);
    }
    for (int k = 0; k < 100; ++k) {
      pair.angles.push_back(4.00005 + k * 1e-7);
      pair.word_lengths.push_back(1);
    }
    CHECK(std::abs(box_dimension(pair, scales)) < 1e-12);
    CHECK_THROWS_AS(box_dimension(cloud_of({0.1, 0.2}), scales), Error);
    CHECK_THROWS_AS(box_dimension(cloud_of(uniform), {1e-2, 2e-2, 3e-2}), Error);
  }

  TEST_CASE("hausdorff distance") {
    CHECK(cloud_hausdorff(cloud_of({0.0}), cloud_of({0.1})) == doctest::Approx(0.1));
    CHECK(cloud_hausdorff(cloud_of({0.0, M_PI}), cloud_of({0.0})) == doctest::Approx(M_PI));
    CHECK(cloud_hausdorff(cloud_of({0.05}), cloud_of({2.0 * M_PI - 0.05})) == doctest::Approx(0.1));
    CHECK(cloud_hausdorff(cloud_of({1.0, 2.0}), cloud_of({2.0, 1.0})) == 0.0);
    try {
      cloud_hausdorff(cloud_of({}), cloud_of({1.0}));
      FAIL("expected EmptyCloud");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCloud);
    }
  }

  TEST_CASE("make_cloud merges and wraps") {
    const LimitCloud c = make_cloud({7.0, 0.5, 0.5 + 1e-9, -0.1}, {3, 2, 1, 4});
    REQUIRE(c.size() == 3);
    CHECK(c.angles[0] == doctest::Approx(0.5));
    CHECK(c.word_lengths[0] == 1);
    CHECK(c.angles[1] == doctest::Approx(7.0 - 2.0 * M_PI));
    CHECK(c.angles[2] == doctest::Approx(2.0 * M_PI - 0.1));
  }

  TEST_CASE("subgroup clouds are contained in the group cloud") {
    const MarkedGroup g = build_genus2_group();
    const Ball ball = enumerate_ball(g, 5);
    const LimitCloud whole = limit_set_from_ball(g, ball, WholeGroup{});
    for (const SubgroupSpec& spec : {SubgroupSpec{CharacterKernel{"ab4", {}}}, SubgroupSpec{CharacterKernel{"grid", {}}},
                                     SubgroupSpec{CyclicSubgroup{g.parse_word("a2"), 64}}}) {
      const LimitCloud sub = limit_set_from_ball(g, ball, spec);
      CHECK_FALSE(sub.empty());
      CHECK(max_distance_to(sub, whole) <= kCloudResolution);
    }
  }

  TEST_CASE("clouds are conjugation equivariant") {
    const MarkedGroup g = build_genus2_group();
    const Mobius<double> n = Mobius<double>::from_entries(1.5, 0.3, 0.4, 0.746666666666666667);
    const MarkedGroup h = conjugate_group(g, n, "conj");
    const LimitCloud moved = apply(n, approximate_limit_set(g, WholeGroup{}, 4));
    CHECK(cloud_hausdorff(moved, approximate_limit_set(h, WholeGroup{}, 4)) < 1e-8);
  }

  TEST_CASE("subgroup exponent does not exceed the group exponent") {
    const MarkedGroup s = build_schottky_group(3.0);
    const Ball ball = enumerate_ball(s, 10);
    const double whole = estimate_delta(orbit_counts_from_ball(s, ball, WholeGroup{})).delta_hat;
    const double kernel = estimate_delta(orbit_counts_from_ball(s, ball, CharacterKernel{"ab2", {}})).delta_hat;
    CHECK(kernel <= whole + 0.05);
  }

  TEST_CASE("poincare sums decrease in s") {
    const MarkedGroup g = build_genus2_group();
    const OrbitCounts counts = orbit_counts(g, WholeGroup{}, 4);
    double previous = std::numeric_limits<double>::infinity();
    for (double s : {0.5, 1.0, 1.5, 2.0, 4.0}) {
      const double sum = poincare_partial_sum(counts, s);
      CHECK(sum < previous);
      CHECK(sum >= 1.0);
      previous = sum;
    }
  }

  TEST_CASE("binned streaming agrees with the stored ball") {
    const MarkedGroup g = build_genus2_group();
    const auto bins = stream_limit_bins(g, {WholeGroup{}, CharacterKernel{"ab4", {}}}, 4);
    REQUIRE(bins.size() == 2);
    const LimitCloud whole = approximate_limit_set(g, WholeGroup{}, 4);
    CHECK(cloud_hausdorff(bins[0], bins[0]) == 0.0);
    CHECK(std::abs(max_angular_gap(bins[0]) - max_angular_gap(whole)) < 1e-7);
    CHECK(bins[1].occupied <= bins[0].occupied);
  }

  TEST_CASE("cloud payload") {
    const LimitCloud c = make_cloud({0.5, 1.5}, {2, 3}, "g", "whole", 4);
    const auto doc = cloud_payload(c);
    CHECK(doc["count"] == 2);
    CHECK(doc["depth"] == 4);
    CHECK(doc["word_lengths"][1] == 3);
  }
}
