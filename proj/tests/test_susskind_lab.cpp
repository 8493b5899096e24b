#include <doctest.h>

#include <random>

#include "limitlab/counterexamples.hpp"
#include "limitlab/susskind_lab.hpp"

using namespace limitlab;

namespace {

const MarkedGroup& genus2() {
  static const MarkedGroup g = build_genus2_group();
  return g;
}

Eigen::MatrixXi columns(std::initializer_list<std::array<int, 2>> cols) {
  Eigen::MatrixXi b(2, static_cast<Eigen::Index>(cols.size()));
  Eigen::Index k = 0;
  for (const auto& c : cols) {
    b(0, k) = c[0];
    b(1, k) = c[1];
    ++k;
  }
  return b;
}

const SubgroupSpec kCommutator = CharacterKernel{"ab4", {}};
const SubgroupSpec kXi = CharacterKernel{"grid", {}};
const SubgroupSpec kXiA = CharacterKernel{"grid", columns({{1, 0}})};
const SubgroupSpec kThreeZ = CharacterKernel{"grid", columns({{3, 0}, {0, 1}})};

RayTrace fixed_point_ray(const MarkedGroup& g, const char* word, double horizon = kDefaultHorizon) {
  return trace_ray(g, attracting_fixed_point(g, g.parse_word(word)), InteriorPoint<double>::i(), kDefaultStep,
                   horizon);
}

}  // namespace

TEST_SUITE("susskind_lab") {
  TEST_CASE("reduction of a point already in the domain") {
    const InteriorPoint<double> q{0.1, 1.2};
    const DomainReduction r = reduce_to_domain(genus2(), q);
    CHECK(r.element.word.empty());
    CHECK(r.point.x == q.x);
    CHECK(r.point.y == q.y);
    CHECK(r.element.character_images.at("grid").isZero());
  }

  TEST_CASE("reduction undoes one generator") {
    const MarkedGroup& g = genus2();
    const InteriorPoint<double> q{0.1, 1.2};
    const DomainReduction r = reduce_to_domain(g, apply(g.evaluate(g.parse_word("a1")), q));
    CHECK(hyperbolic_distance(r.point, q) < 1e-9);
    CHECK(g.format_word(r.element.word) == "a1^-1");
    CHECK(r.element.character_images.at("grid") == Eigen::Vector2i(-1, 0));
  }

  TEST_CASE("reduction accumulates coset coordinates") {
    const MarkedGroup& g = genus2();
    const InteriorPoint<double> q{-0.05, 0.9};
    const Mobius<double> forward = g.evaluate(g.parse_word("a1 a1 a1 b2"));
    const DomainReduction r = reduce_to_domain(g, apply(forward, q));
    CHECK(r.element.character_images.at("grid") == Eigen::Vector2i(-3, 0));
    CHECK(hyperbolic_distance(apply(r.element.matrix.inverse(), r.point), apply(forward, q)) < 1e-8);
  }

  TEST_CASE("reduction round trip on random points") {
    const MarkedGroup& g = genus2();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> x(-3.0, 3.0);
    std::uniform_real_distribution<double> logy(-3.0, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const InteriorPoint<double> p{x(rng), std::exp(logy(rng))};
      const DomainReduction r = reduce_to_domain(g, p);
      CHECK(distance_from_i(r.point) <= distance_from_i(p) + 1e-12);
      CHECK(matrix_distance(r.element.matrix, g.evaluate(r.element.word)) < 1e-9);
      worst = std::max(worst, hyperbolic_distance(apply(r.element.matrix.inverse(), r.point), p));
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("sample counts") {
    const MarkedGroup& g = genus2();
    CHECK(fixed_point_ray(g, "a1", 10.0).samples.size() == 41);
    const RayTrace zero = fixed_point_ray(g, "a1", 0.0);
    REQUIRE(zero.samples.size() == 1);
    CHECK(zero.samples[0].t == 0.0);
    CHECK(zero.samples[0].raw_distance == 0.0);
    CHECK_THROWS_AS(trace_ray(g, BoundaryPoint<Precise>::infinity(), InteriorPoint<double>::i(), 2.0, 10.0), Error);
    CHECK_THROWS_AS(trace_ray(g, BoundaryPoint<Precise>::infinity(), InteriorPoint<double>::i(), 0.25, 300.0), Error);
  }

  TEST_CASE("trace invariants") {
    const MarkedGroup& g = genus2();
    const RayTrace trace = fixed_point_ray(g, "a1 b2^-1", 30.0);
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
      const RaySample& s = trace.samples[k];
      CHECK(s.t == doctest::Approx(0.25 * static_cast<double>(k)));
      CHECK(s.reduced_distance <= s.raw_distance + 1e-9);
      CHECK(s.raw_distance == doctest::Approx(s.t).epsilon(1e-9));
    }
  }

  TEST_CASE("axis ray stays near the domain") {
    const MarkedGroup& g = genus2();
    const Word a1 = g.parse_word("a1");
    const Mobius<double> m = g.evaluate(a1);
    const double ell = classify_isometry(m).translation_length;
    const Geodesic<double> axis = axis_of(m);
    const Mobius<double> frame = axis_frame(axis);
    // Foot of the perpendicular from i, and the axis point there.
    const InteriorPoint<double> image = apply(frame, InteriorPoint<double>::i());
    const InteriorPoint<double> foot = apply(frame.inverse(), InteriorPoint<double>{0.0, std::hypot(image.x, image.y)});
    const double offset = hyperbolic_distance(foot, InteriorPoint<double>::i());
    const double circumradius = std::acosh(std::pow(1.0 + std::sqrt(2.0), 2));
    const RayTrace trace = trace_ray(g, attracting_fixed_point(g, a1), foot, 0.25, 100.0);
    double worst = 0.0;
    for (const RaySample& s : trace.samples) worst = std::max(worst, s.reduced_distance);
    CHECK(worst <= ell / 2.0 + offset + 2.0 * circumradius);
  }

  TEST_CASE("fixed-point ray classification") {
    const MarkedGroup& g = genus2();
    const RayTrace trace = fixed_point_ray(g, "a1");
    CHECK(classify_recurrence(g, trace, WholeGroup{}).tag == RecurrenceTag::bounded);
    CHECK(classify_recurrence(g, trace, kCommutator).tag == RecurrenceTag::transient);
    CHECK(classify_recurrence(g, trace, kXi).tag == RecurrenceTag::transient);
    CHECK_THROWS_AS(classify_recurrence(g, fixed_point_ray(g, "a1", 10.0), WholeGroup{}), Error);
  }

  TEST_CASE("spiral ray classification") {
    const MarkedGroup& g = genus2();
    const RayTrace trace = trace_ray(g, spiral_target(g, spiral_program(10)));
    CHECK(classify_recurrence(g, trace, kXiA).tag == RecurrenceTag::recurrent);
    CHECK(classify_recurrence(g, trace, kXi).tag == RecurrenceTag::transient);
  }

  TEST_CASE("axis certification") {
    for (const MarkedGroup& g : {build_genus2_group(), build_schottky_group(3.0)}) {
      for (int k = 0; k < g.rank(); ++k) {
        const Word w = Word::generator(k);
        const RecurrenceClass c = certify_uniform_conical_axis(g, w);
        CHECK(c.tag == RecurrenceTag::bounded);
        CHECK(c.bound <= classify_isometry(g.evaluate(w)).translation_length + 1e-12);
      }
    }
    const MarkedGroup h("rank1", {{"g", Mobius<double>::from_entries(2, 0, 0, 0.5)}}, std::nullopt, {});
    const RecurrenceClass c = certify_uniform_conical_axis(h, Word::generator(0));
    CHECK(c.tag == RecurrenceTag::bounded);
    CHECK(c.bound <= 2.0 * std::log(2.0) + 1e-12);
    try {
      certify_uniform_conical_axis(genus2(), Word());
      FAIL("expected NotLoxodromic");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotLoxodromic);
    }
  }

  TEST_CASE("common elements") {
    const MarkedGroup& g = genus2();
    const auto whole = find_common_elements(g, WholeGroup{}, WholeGroup{}, 1);
    REQUIRE(whole.size() == 8);
    CHECK(g.format_word(whole[0].element.word) == "a1");
    const auto cubes = find_common_elements(g, CyclicSubgroup{g.parse_word("a1"), 64}, kThreeZ, 4);
    REQUIRE_FALSE(cubes.empty());
    CHECK(g.format_word(cubes[0].element.word) == "a1 a1 a1");
    for (const auto& w : cubes) {
      CHECK(w.evidence.size() == 2);
      CHECK(w.evidence[0].member);
      CHECK(w.evidence[1].member);
    }
    const MarkedGroup s = build_schottky_group(3.0);
    CHECK(find_common_elements(s, CyclicSubgroup{s.parse_word("g1"), 64}, CyclicSubgroup{s.parse_word("g2"), 64}, 12)
              .empty());
  }

  TEST_CASE("listed words are matched by matrix") {
    const MarkedGroup& g = genus2();
    const WordList a{{g.parse_word("a1 b1"), g.parse_word("a2")}};
    const WordList b{{g.parse_word("b2 a2 b2^-1"), g.parse_word("a1 b1")}};
    const auto common = find_common_elements(g, a, b, 6);
    REQUIRE(common.size() == 1);
    CHECK(g.format_word(common[0].element.word) == "a1 b1");
  }

  TEST_CASE("normal intersection witness") {
    const MarkedGroup& g = genus2();
    const Word phi = g.parse_word("a1 b1 a1^-1 b1^-1");
    const Word theta = g.parse_word("b1");
    const IntersectionWitness w = normal_intersection_witness(g, phi, theta, kCommutator, kXi);
    CHECK(matrix_distance(w.element.matrix, Mobius<double>::identity()) > 1e-6);
    CHECK(w.element.character_images.at("ab4").isZero());
    CHECK(w.element.character_images.at("grid").isZero());
    const Mobius<double> expected = g.evaluate(theta.inverse() * phi * theta * phi.inverse());
    CHECK(matrix_distance(w.element.matrix, expected) < 1e-9);

    const IntersectionWitness same = normal_intersection_witness(g, phi, phi, kCommutator, kXi);
    CHECK(same.element.word == phi);

    try {
      normal_intersection_witness(g, g.parse_word("a1"), theta, kCommutator, kXi);
      FAIL("expected PreconditionFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PreconditionFailed);
    }
    try {
      normal_intersection_witness(g, phi, theta, CyclicSubgroup{phi, 64}, kXi);
      FAIL("expected NotNormalSpec");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotNormalSpec);
    }
  }

  TEST_CASE("power search") {
    const MarkedGroup& g = genus2();
    const Word a1 = g.parse_word("a1");
    CHECK(power_in_subgroup(g, a1, kThreeZ, 50) == 3);
    CHECK_FALSE(power_in_subgroup(g, a1, kXi, 50).has_value());
    CHECK(power_in_subgroup(g, a1, WholeGroup{}, 50) == 1);
    CHECK(power_in_subgroup(g, g.parse_word("b1"), kXi, 50) == 1);
  }

  TEST_CASE("no power means no conical return") {
    const MarkedGroup& g = genus2();
    for (const char* word : {"a1", "a2", "a1 a2"}) {
      const Word gamma = g.parse_word(word);
      const RayTrace trace = trace_ray(g, attracting_fixed_point(g, gamma));
      for (const SubgroupSpec& spec : {kCommutator, kXi, kXiA}) {
        if (power_in_subgroup(g, gamma, spec, 50)) continue;
        const RecurrenceTag tag = classify_recurrence(g, trace, spec).tag;
        CHECK((tag == RecurrenceTag::transient || tag == RecurrenceTag::inconclusive));
      }
    }
  }

  TEST_CASE("recurrent rays for two kernels share elements") {
    const MarkedGroup& g = genus2();
    std::vector<Character> characters = g.characters();
    Eigen::MatrixXi h1 = Eigen::MatrixXi::Zero(1, 4);
    h1(0, 0) = 1;
    characters.push_back({"h1", h1});
    std::vector<Generator> generators = g.generators();
    const MarkedGroup extended("genus2-h1", generators, g.relator(), characters);
    const RayTrace trace = trace_ray(extended, spiral_target(extended, spiral_program(10)));
    const SubgroupSpec theta = CharacterKernel{"h1", {}};
    const bool both = classify_recurrence(extended, trace, kXiA).tag == RecurrenceTag::recurrent &&
                      classify_recurrence(extended, trace, theta).tag == RecurrenceTag::recurrent;
    CHECK(both);
    CHECK_FALSE(find_common_elements(extended, kXiA, theta, 4).empty());
  }

  TEST_CASE("serialisation") {
    const MarkedGroup& g = genus2();
    const RayTrace trace = fixed_point_ray(g, "a1", 2.0);
    const std::string jsonl = trace_to_jsonl(g, trace);
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 9);
    const std::string csv = trace_to_csv(g, trace);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
    RecurrenceClass verdict;
    verdict.tag = RecurrenceTag::recurrent;
    CHECK(recurrence_to_json(verdict).find("recurrent") != std::string::npos);
  }
}
