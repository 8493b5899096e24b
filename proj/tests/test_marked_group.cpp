#include <doctest.h>

#include <random>
#include <set>

#include "limitlab/ball.hpp"
#include "limitlab/marked_group.hpp"
#include "limitlab/presentation_io.hpp"
#include "oracles.hpp"

using namespace limitlab;

namespace {

using Mat = std::array<double, 4>;

Mat raw(const Mobius<double>& m) { return {m.a(), m.b(), m.c(), m.d()}; }

Mat multiply(const Mat& p, const Mat& q) {
  return {p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2],
          p[2] * q[1] + p[3] * q[3]};
}

Mat raw_inverse(const Mat& p) { return {p[3], -p[1], -p[2], p[0]}; }

double distance_to_pm_identity(const Mat& p) {
  const double plus = std::abs(p[0] - 1) + std::abs(p[1]) + std::abs(p[2]) + std::abs(p[3] - 1);
  const double minus = std::abs(p[0] + 1) + std::abs(p[1]) + std::abs(p[2]) + std::abs(p[3] + 1);
  return std::min(plus, minus);
}

// Midpoint of side k of the regular octagon with angles pi/4, in the half-plane.
oracle::cplx octagon_side_midpoint(int k) {
  const double inradius = std::acosh(1.0 / std::tan(M_PI / 8.0));
  const oracle::cplx w = std::polar(std::tanh(inradius / 2.0), k * M_PI / 4.0);
  return oracle::cplx(0, 1) * (1.0 + w) / (1.0 - w);
}

Word random_word(std::mt19937_64& rng, int rank, int length) {
  std::uniform_int_distribution<int> gen(0, rank - 1);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<Letter> letters;
  for (int k = 0; k < length; ++k) letters.push_back({gen(rng), sign(rng) ? 1 : -1});
  return Word(letters);
}

std::size_t brute_distinct(const MarkedGroup& group, int depth) {
  std::vector<Mobius<double>> kept;
  std::vector<Word> frontier{Word()};
  std::vector<Word> all{Word()};
  for (int k = 1; k <= depth; ++k) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (int g = 0; g < group.rank(); ++g) {
        for (int e : {1, -1}) {
          const Word v = w * Word::generator(g, e);
          if (static_cast<int>(v.length()) == k) next.push_back(v);
        }
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = next;
  }
  for (const Word& w : all) {
    const Mobius<double> m = group.evaluate(w);
    bool seen = false;
    for (const auto& n : kept) seen = seen || matrix_distance(m, n) < 1e-6;
    if (!seen) kept.push_back(m);
  }
  return kept.size();
}

Eigen::MatrixXi column(int x, int y) {
  Eigen::MatrixXi b(2, 1);
  b << x, y;
  return b;
}

}  // namespace

TEST_SUITE("marked_group") {
  TEST_CASE("genus-two relator is the identity") {
    const MarkedGroup g = build_genus2_group();
    Mat product{1, 0, 0, 1};
    for (const Letter& l : g.relator()->letters()) {
      const Mat m = raw(g.generators()[static_cast<std::size_t>(l.generator)].matrix);
      product = multiply(product, l.exponent > 0 ? m : raw_inverse(m));
    }
    CHECK(distance_to_pm_identity(product) < 1e-8);
  }

  TEST_CASE("genus-two generators pair octagon sides") {
    const MarkedGroup g = build_genus2_group();
    const std::array<std::pair<int, int>, 4> pairs{{{2, 0}, {1, 3}, {6, 4}, {5, 7}}};
    for (std::size_t k = 0; k < 4; ++k) {
      const Mobius<double>& m = g.generators()[k].matrix;
      const oracle::cplx image = oracle::mobius(m.a(), m.b(), m.c(), m.d(), octagon_side_midpoint(pairs[k].first));
      CHECK(std::abs(image - octagon_side_midpoint(pairs[k].second)) < 1e-10);
      const double trace = 2.0 * (1.0 + std::sqrt(2.0)) *
                           std::abs(std::cos(((pairs[k].second - pairs[k].first) * M_PI / 4.0 - M_PI) / 2.0));
      CHECK(std::abs(m.trace()) == doctest::Approx(trace).epsilon(1e-12));
    }
    CHECK(g.shortest_translation_length() == doctest::Approx(2.0 * std::acosh(1.0 + std::sqrt(0.5))).epsilon(1e-10));
  }

  TEST_CASE("precise generators agree with double") {
    const MarkedGroup g = build_genus2_group();
    const Word w = g.parse_word("a1 b2 a2^-1 b1 b1");
    CHECK(matrix_distance(g.evaluate(w), g.evaluate_precise(w).cast<double>()) < 1e-12);
  }

  TEST_CASE("characters") {
    const MarkedGroup g = build_genus2_group();
    CHECK(g.has_character("ab4"));
    CHECK(g.character("grid").dimension() == 2);
    CHECK_THROWS_AS(g.character("nope"), Error);
    const Eigen::VectorXi v = character_image(g, "grid", g.parse_word("a1 a1 b1 a2^-1 b2"));
    CHECK(v(0) == 2);
    CHECK(v(1) == -1);
    CHECK(character_image(g, "ab4", *g.relator()).isZero());
  }

  TEST_CASE("characters and evaluation are homomorphisms") {
    const MarkedGroup g = build_genus2_group();
    std::mt19937_64 rng(7);
    for (int k = 0; k < 1000; ++k) {
      const Word u = random_word(rng, 4, 5);
      const Word v = random_word(rng, 4, 5);
      for (const char* name : {"ab4", "grid"}) {
        CHECK(character_image(g, name, u * v) == character_image(g, name, u) + character_image(g, name, v));
      }
      if (k % 10 == 0) CHECK(matrix_distance(g.evaluate(u * v), g.evaluate(u) * g.evaluate(v)) < 1e-9);
    }
  }

  TEST_CASE("schottky construction") {
    const MarkedGroup s = build_schottky_group(3.0);
    CHECK(s.rank() == 2);
    CHECK_FALSE(s.relator().has_value());
    CHECK(classify_isometry(s.generators()[0].matrix).translation_length ==
          doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));
    CHECK(build_schottky_group(1.0 / 3.0).id() == s.id());
    try {
      build_schottky_group(1.2);
      FAIL("expected overlapping circles");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CirclesOverlap);
    }
    CHECK_THROWS_AS(build_schottky_group(-2.0), Error);
  }

  TEST_CASE("construction validation") {
    const Generator good{"g", Mobius<double>::from_entries(2, 0, 0, 0.5)};
    const Generator parabolic{"p", Mobius<double>::from_entries(1, 1, 0, 1)};
    CHECK_THROWS_AS(MarkedGroup("x", {good, parabolic}, std::nullopt, {}), Error);
    CHECK_THROWS_AS(MarkedGroup("x", {good}, Word::generator(0), {}), Error);
    CHECK_THROWS_AS(MarkedGroup("x", {good}, std::nullopt, {Character{"c", Eigen::MatrixXi::Identity(2, 2)}}),
                    Error);
  }

  TEST_CASE("ball sizes") {
    const MarkedGroup s = build_schottky_group(3.0);
    for (int depth = 0; depth <= 6; ++depth) {
      std::size_t expected = 1;
      for (int k = 1, sphere = 4; k <= depth; ++k, sphere *= 3) expected += static_cast<std::size_t>(sphere);
      CHECK(enumerate_ball(s, depth).size() == expected);
    }
    const MarkedGroup g = build_genus2_group();
    CHECK(enumerate_ball(g, 2).size() == brute_distinct(g, 2));
    CHECK(enumerate_ball(g, 2).size() == 65);
    CHECK(enumerate_ball(g, 3).size() == brute_distinct(g, 3));
  }

  TEST_CASE("balls are monotone and shortlex") {
    const MarkedGroup g = build_genus2_group();
    const Ball small = enumerate_ball(g, 3);
    const Ball large = enumerate_ball(g, 4);
    REQUIRE(small.size() < large.size());
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(small.word(i) == large.word(i));
      CHECK(matrix_distance(small.matrix(i), g.evaluate(small.word(i))) < 1e-12);
    }
    for (std::size_t i = 1; i < large.size(); ++i) CHECK(large.word(i - 1) < large.word(i));
    for (int k = 0; k <= 4; ++k) {
      const auto [begin, end] = large.sphere(k);
      for (std::size_t i = begin; i < end; ++i) CHECK(large.length(i) == k);
    }
  }

  TEST_CASE("dedup margin") {
    CHECK(min_separation(enumerate_ball(build_schottky_group(3.0), 8), 1e-3) > 1e-4);
    CHECK(min_separation(enumerate_ball(build_genus2_group(), 5), 1e-3) > 1e-4);
  }

  TEST_CASE("depth limit") {
    EnumerationLimits limits;
    limits.max_depth = 3;
    CHECK_THROWS_AS(enumerate_ball(build_genus2_group(), 4, limits), Error);
  }

  TEST_CASE("presentation round trip") {
    const MarkedGroup g = build_genus2_group();
    const MarkedGroup back = group_from_json(nlohmann::json::parse(to_json(g).dump()));
    CHECK(back.id() == g.id());
    CHECK(back.rank() == g.rank());
    for (int k = 0; k < g.rank(); ++k) {
      CHECK(matrix_distance(back.generators()[k].matrix, g.generators()[k].matrix) == 0.0);
    }
    CHECK(*back.relator() == *g.relator());
    CHECK(back.character("grid").images == g.character("grid").images);
    CHECK(to_json(back).dump() == to_json(g).dump());
    CHECK_THROWS_AS(group_from_json(nlohmann::json::parse(R"({"id": "x"})")), Error);
  }

  TEST_CASE("membership") {
    const MarkedGroup g = build_genus2_group();
    const auto member = [&](const SubgroupSpec& spec, const char* word) {
      return is_member(g, spec, g.element(g.parse_word(word)));
    };
    const SubgroupSpec commutator = CharacterKernel{"ab4", {}};
    const SubgroupSpec xi = CharacterKernel{"grid", {}};
    const SubgroupSpec xi_a = CharacterKernel{"grid", column(1, 0)};
    Eigen::MatrixXi wide(2, 2);
    wide << 3, 0, 0, 1;
    const SubgroupSpec three = CharacterKernel{"grid", wide};
    CHECK(member(commutator, "a1 b1 a1^-1 b1^-1"));
    CHECK_FALSE(member(commutator, "a1"));
    CHECK(member(xi, "b1 b2"));
    CHECK_FALSE(member(xi, "a1"));
    CHECK(member(xi_a, "a1 a1 b2"));
    CHECK_FALSE(member(xi_a, "a2"));
    CHECK(member(three, "a1 a1 a1 a2"));
    CHECK_FALSE(member(three, "a1 a1"));
    CHECK(member(WholeGroup{}, "a1"));
    CHECK(member(CyclicSubgroup{g.parse_word("a1 b1"), 8}, "a1 b1 a1 b1 a1 b1"));
    CHECK_FALSE(member(CyclicSubgroup{g.parse_word("a1 b1"), 8}, "b1 a1"));
    CHECK_THROWS_AS(validate_spec(g, CharacterKernel{"nope", {}}), Error);
    CHECK(describe(g, xi).find("grid") != std::string::npos);
  }

  TEST_CASE("sublattice fit") {
    Eigen::MatrixXi basis(2, 2);
    basis << 3, 0, 0, 1;
    Eigen::VectorXi v(2);
    v << 6, -2;
    const SublatticeFit fit = fit_sublattice(basis, v);
    CHECK(fit.member);
    CHECK(fit.coefficients(0) == 2);
    v << 4, 0;
    CHECK_FALSE(fit_sublattice(basis, v).member);
    CHECK(fit_sublattice(basis, v).residual_norm == doctest::Approx(1.0));
  }

  TEST_CASE("conjugated groups") {
    const MarkedGroup g = build_genus2_group();
    const Mobius<double> n = Mobius<double>::from_entries(2, 1, 1, 1);
    const MarkedGroup h = conjugate_group(g, n, "conj");
    const Word w = g.parse_word("a1 b2^-1 a2");
    CHECK(matrix_distance(h.evaluate(w), n * g.evaluate(w) * n.inverse()) < 1e-9);
  }
}
