#include "limitlab/marked_group.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/QR>

namespace limitlab {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Eigen::VectorXi sums_vector(const std::vector<int>& sums) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(sums.size()));
  for (std::size_t k = 0; k < sums.size(); ++k) v(static_cast<Eigen::Index>(k)) = sums[k];
  return v;
}

}  // namespace

MarkedGroup::MarkedGroup(std::string id, std::vector<Generator> generators, std::optional<Word> relator,
                         std::vector<Character> characters, std::vector<Mobius<Precise>> precise)
    : id_(std::move(id)),
      generators_(std::move(generators)),
      precise_(std::move(precise)),
      relator_(std::move(relator)),
      characters_(std::move(characters)) {
  if (generators_.empty()) throw Error(ErrorCode::InvalidInput, "group needs at least one generator");
  for (const Generator& g : generators_) {
    if (classify_isometry(g.matrix).kind != IsometryKind::loxodromic) {
      throw Error(ErrorCode::NotLoxodromic, "generator " + g.name + " is not loxodromic");
    }
    inverses_.push_back(g.matrix.inverse());
  }
  auto names = generator_names();
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw Error(ErrorCode::InvalidInput, "duplicate generator names");
  }
  if (precise_.empty()) {
    for (const Generator& g : generators_) precise_.push_back(g.matrix.cast<Precise>());
  }
  if (precise_.size() != generators_.size()) {
    throw Error(ErrorCode::InvalidInput, "precise generator count mismatch");
  }
  for (const auto& m : precise_) precise_inverses_.push_back(m.inverse());

  if (relator_) {
    for (const Letter& letter : relator_->letters()) {
      if (letter.generator >= rank()) throw Error(ErrorCode::InvalidInput, "relator uses unknown generator");
    }
    const double defect = matrix_distance(evaluate(*relator_), Mobius<double>::identity());
    if (defect > kRelatorTolerance) {
      throw Error(ErrorCode::ConstructionFailed, "relator defect " + std::to_string(defect) + " exceeds 1e-8");
    }
  }
  for (const Character& c : characters_) {
    if (c.images.cols() != rank()) {
      throw Error(ErrorCode::InvalidInput, "character " + c.name + " needs one image per generator");
    }
    if (relator_ && !(c.images * sums_vector(relator_->exponent_sums(rank()))).isZero()) {
      throw Error(ErrorCode::InvalidInput, "character " + c.name + " does not vanish on the relator");
    }
  }
}

std::vector<std::string> MarkedGroup::generator_names() const {
  std::vector<std::string> names;
  for (const Generator& g : generators_) names.push_back(g.name);
  return names;
}

bool MarkedGroup::has_character(const std::string& name) const {
  return std::any_of(characters_.begin(), characters_.end(), [&](const Character& c) { return c.name == name; });
}

const Character& MarkedGroup::character(const std::string& name) const {
  for (const Character& c : characters_) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::UnknownCharacter, "no character named '" + name + "'");
}

Mobius<double> MarkedGroup::evaluate(const Word& word) const {
  Mobius<double> m;
  for (const Letter& letter : word.letters()) m = m * letter_matrix(letter);
  return m;
}

Mobius<Precise> MarkedGroup::evaluate_precise(const Word& word) const {
  Mobius<Precise> m;
  for (const Letter& letter : word.letters()) m = m * letter_matrix_precise(letter);
  return m;
}

GroupElement MarkedGroup::element(const Word& word) const {
  GroupElement e{word, evaluate(word), {}};
  const Eigen::VectorXi sums = sums_vector(word.exponent_sums(rank()));
  for (const Character& c : characters_) e.character_images[c.name] = c.images * sums;
  return e;
}

double MarkedGroup::shortest_translation_length() const {
  double best = std::numeric_limits<double>::infinity();
  for (const Generator& g : generators_) best = std::min(best, classify_isometry(g.matrix).translation_length);
  return best;
}

namespace {

// Side pairing of the regular octagon taking side i onto side j; side k has
// outward normal at disc angle k*pi/4 and lies at distance d from the centre.
template <typename Scalar>
Mobius<Scalar> octagon_pairing(int i, int j) {
  const Scalar quarter = pi<Scalar>() / Scalar(4);
  const Scalar d = acosh_of<Scalar>(Scalar(1) + sqrt(Scalar(2)));
  return disc_rotation<Scalar>(quarter * Scalar(j) - pi<Scalar>()) * axis_translation<Scalar>(Scalar(-2) * d) *
         disc_rotation<Scalar>(-quarter * Scalar(i));
}

template <typename Scalar>
std::vector<Mobius<Scalar>> octagon_generators() {
  return {octagon_pairing<Scalar>(2, 0), octagon_pairing<Scalar>(1, 3), octagon_pairing<Scalar>(6, 4),
          octagon_pairing<Scalar>(5, 7)};
}

}  // namespace

MarkedGroup build_genus2_group() {
  const std::vector<std::string> names{"a1", "b1", "a2", "b2"};
  const auto matrices = octagon_generators<double>();
  std::vector<Generator> generators;
  for (std::size_t k = 0; k < names.size(); ++k) generators.push_back({names[k], matrices[k]});
  const Word relator = Word::parse("a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1", names);

  Character ab4{"ab4", Eigen::MatrixXi::Identity(4, 4)};
  Character grid{"grid", Eigen::MatrixXi::Zero(2, 4)};
  grid.images(0, 0) = 1;
  grid.images(1, 2) = 1;
  return MarkedGroup("genus2", std::move(generators), relator, {ab4, grid}, octagon_generators<Precise>());
}

namespace {

template <typename Scalar>
std::vector<Mobius<Scalar>> schottky_generators(const Scalar& lambda) {
  const Mobius<Scalar> g1 = Mobius<Scalar>::trusted(
      (typename Mobius<Scalar>::Matrix() << lambda, Scalar(0), Scalar(0), Scalar(1) / lambda).finished());
  const Mobius<Scalar> quarter = disc_rotation<Scalar>(pi<Scalar>() / Scalar(2));
  return {g1, quarter * g1 * quarter.inverse()};
}

bool circles_disjoint(const DiscCircle& p, const DiscCircle& q) {
  return std::hypot(p.center_x - q.center_x, p.center_y - q.center_y) > p.radius + q.radius;
}

}  // namespace

MarkedGroup build_schottky_group(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw Error(ErrorCode::InvalidInput, "Schottky multiplier must be positive and finite");
  }
  if (lambda < 1.0) lambda = 1.0 / lambda;
  if (lambda - 1.0 < 1e-9) throw Error(ErrorCode::CirclesOverlap, "multiplier 1 gives the identity");
  const auto matrices = schottky_generators<double>(lambda);
  const std::vector<DiscCircle> circles{isometric_circle(matrices[0]), isometric_circle(matrices[0].inverse()),
                                        isometric_circle(matrices[1]), isometric_circle(matrices[1].inverse())};
  for (std::size_t i = 0; i < circles.size(); ++i) {
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      if (!circles_disjoint(circles[i], circles[j])) {
        throw Error(ErrorCode::CirclesOverlap, "isometric circles " + std::to_string(i) + " and " +
                                                   std::to_string(j) + " intersect");
      }
    }
  }
  std::ostringstream id;
  id.precision(17);
  id << "schottky(" << lambda << ")";
  return MarkedGroup(id.str(), {{"g1", matrices[0]}, {"g2", matrices[1]}}, std::nullopt,
                     {Character{"ab2", Eigen::MatrixXi::Identity(2, 2)}}, schottky_generators<Precise>(Precise(lambda)));
}

MarkedGroup conjugate_group(const MarkedGroup& group, const Mobius<double>& n, const std::string& id) {
  std::vector<Generator> generators;
  for (const Generator& g : group.generators()) generators.push_back({g.name, n * g.matrix * n.inverse()});
  return MarkedGroup(id, std::move(generators), group.relator(), group.characters());
}

Eigen::VectorXi character_image(const MarkedGroup& group, const std::string& name, const Word& word) {
  return group.character(name).images * sums_vector(word.exponent_sums(group.rank()));
}

std::string describe(const MarkedGroup& group, const SubgroupSpec& spec) {
  return std::visit(
      Overloaded{
          [](const WholeGroup&) { return std::string("whole-group"); },
          [](const CharacterKernel& k) {
            std::ostringstream out;
            out << "character-kernel(" << k.character;
            if (k.basis.cols() > 0) {
              out << "; basis";
              for (Eigen::Index c = 0; c < k.basis.cols(); ++c) {
                out << " (";
                for (Eigen::Index r = 0; r < k.basis.rows(); ++r) out << (r ? "," : "") << k.basis(r, c);
                out << ")";
              }
            }
            out << ")";
            return out.str();
          },
          [&](const CyclicSubgroup& c) { return "cyclic(" + group.format_word(c.generator) + ")"; },
          [](const WordList& w) { return "word-list(" + std::to_string(w.words.size()) + " words)"; },
      },
      spec);
}

SublatticeFit fit_sublattice(const Eigen::MatrixXi& basis, const Eigen::VectorXi& v) {
  SublatticeFit fit;
  if (basis.cols() == 0) {
    fit.coefficients = Eigen::VectorXi();
    fit.residual = v;
  } else {
    const Eigen::MatrixXd b = basis.cast<double>();
    const Eigen::VectorXd ls = b.colPivHouseholderQr().solve(v.cast<double>());
    fit.coefficients = ls.array().round().cast<int>().matrix();
    fit.residual = v - basis * fit.coefficients;
  }
  fit.residual_norm = fit.residual.cast<double>().norm();
  fit.member = fit.residual.isZero();
  return fit;
}

void validate_spec(const MarkedGroup& group, const SubgroupSpec& spec) {
  std::visit(Overloaded{
                 [](const WholeGroup&) {},
                 [&](const CharacterKernel& k) {
                   const Character& c = group.character(k.character);
                   if (k.basis.cols() == 0) return;
                   if (k.basis.rows() != c.dimension()) {
                     throw Error(ErrorCode::InvalidInput, "sublattice basis has the wrong dimension");
                   }
                   Eigen::FullPivLU<Eigen::MatrixXd> lu(k.basis.cast<double>());
                   if (lu.rank() != k.basis.cols()) {
                     throw Error(ErrorCode::InvalidInput, "sublattice basis is linearly dependent");
                   }
                 },
                 [&](const CyclicSubgroup& c) {
                   if (classify_isometry(group.evaluate(c.generator)).kind != IsometryKind::loxodromic) {
                     throw Error(ErrorCode::NotLoxodromic, "cyclic generator must be loxodromic");
                   }
                   if (c.max_power < 1) throw Error(ErrorCode::InvalidInput, "cyclic max_power must be >= 1");
                 },
                 [](const WordList&) {},
             },
             spec);
}

bool is_member(const MarkedGroup& group, const SubgroupSpec& spec, const Mobius<double>& matrix,
               const std::vector<int>& exponent_sums) {
  return std::visit(
      Overloaded{
          [](const WholeGroup&) { return true; },
          [&](const CharacterKernel& k) {
            const Eigen::VectorXi image = group.character(k.character).images * sums_vector(exponent_sums);
            return fit_sublattice(k.basis, image).member;
          },
          [&](const CyclicSubgroup& c) {
            if (matrix_distance(matrix, Mobius<double>::identity()) < kDuplicateTolerance) return true;
            const Mobius<double> h = group.evaluate(c.generator);
            const double ratio = classify_isometry(matrix).translation_length / classify_isometry(h).translation_length;
            const int k = static_cast<int>(std::lround(ratio));
            if (k < 1 || k > c.max_power) return false;
            return matrix_distance(matrix, power(h, k)) < kDuplicateTolerance ||
                   matrix_distance(matrix, power(h, -k)) < kDuplicateTolerance;
          },
          [&](const WordList& w) {
            return std::any_of(w.words.begin(), w.words.end(), [&](const Word& word) {
              return matrix_distance(matrix, group.evaluate(word)) < kDuplicateTolerance;
            });
          },
      },
      spec);
}

bool is_member(const MarkedGroup& group, const SubgroupSpec& spec, const GroupElement& element) {
  return is_member(group, spec, element.matrix, element.word.exponent_sums(group.rank()));
}

}  // namespace limitlab
