#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "limitlab/hyperbolic.hpp"
#include "limitlab/word.hpp"

namespace limitlab {

inline constexpr double kRelatorTolerance = 1e-8;
inline constexpr double kDuplicateTolerance = 1e-6;

struct Generator {
  std::string name;
  Mobius<double> matrix;
};

/// Integer-valued homomorphism given by its images of the generators,
/// one column per generator.
struct Character {
  std::string name;
  Eigen::MatrixXi images;

  int dimension() const { return static_cast<int>(images.rows()); }
};

struct GroupElement {
  Word word;
  Mobius<double> matrix;
  std::map<std::string, Eigen::VectorXi> character_images;
};

class MarkedGroup {
 public:
  /// Validates: loxodromic generators, relator defect within 1e-8, characters
  /// of the right shape that vanish on the relator. `precise` optionally
  /// supplies extended-precision generator matrices computed independently.
  MarkedGroup(std::string id, std::vector<Generator> generators, std::optional<Word> relator,
              std::vector<Character> characters, std::vector<Mobius<Precise>> precise = {});

  const std::string& id() const { return id_; }
  int rank() const { return static_cast<int>(generators_.size()); }
  const std::vector<Generator>& generators() const { return generators_; }
  const std::optional<Word>& relator() const { return relator_; }
  const std::vector<Character>& characters() const { return characters_; }
  std::vector<std::string> generator_names() const;

  const Character& character(const std::string& name) const;
  bool has_character(const std::string& name) const;

  const Mobius<double>& letter_matrix(const Letter& letter) const {
    return letter.exponent > 0 ? generators_[static_cast<std::size_t>(letter.generator)].matrix
                               : inverses_[static_cast<std::size_t>(letter.generator)];
  }
  const Mobius<Precise>& letter_matrix_precise(const Letter& letter) const {
    return letter.exponent > 0 ? precise_[static_cast<std::size_t>(letter.generator)]
                               : precise_inverses_[static_cast<std::size_t>(letter.generator)];
  }

  Mobius<double> evaluate(const Word& word) const;
  Mobius<Precise> evaluate_precise(const Word& word) const;
  GroupElement element(const Word& word) const;

  /// Shortest translation length over the generators.
  double shortest_translation_length() const;

  Word parse_word(std::string_view text) const { return Word::parse(text, generator_names()); }
  std::string format_word(const Word& word) const { return word.format(generator_names()); }

 private:
  std::string id_;
  std::vector<Generator> generators_;
  std::vector<Mobius<double>> inverses_;
  std::vector<Mobius<Precise>> precise_;
  std::vector<Mobius<Precise>> precise_inverses_;
  std::optional<Word> relator_;
  std::vector<Character> characters_;
};

/// Genus-two surface group from the side pairings of the regular octagon with
/// all vertex angles pi/4, centred at the disc origin. Generators a1 b1 a2 b2,
/// relator [a1,b1][a2,b2], characters "ab4" and "grid".
MarkedGroup build_genus2_group();

/// Two-generator Schottky group: g1 = diag(lambda, 1/lambda) and g2 its
/// conjugate by a quarter-turn about i. Character "ab2".
MarkedGroup build_schottky_group(double lambda);

/// The same marked group with every generator replaced by n g n^-1.
MarkedGroup conjugate_group(const MarkedGroup& group, const Mobius<double>& n, const std::string& id);

Eigen::VectorXi character_image(const MarkedGroup& group, const std::string& name, const Word& word);

// Subgroup descriptions.

struct WholeGroup {};

/// Preimage of a sublattice under a character. An empty basis means the
/// kernel itself.
struct CharacterKernel {
  std::string character;
  Eigen::MatrixXi basis;
};

struct CyclicSubgroup {
  Word generator;
  int max_power = 64;
};

struct WordList {
  std::vector<Word> words;
};

using SubgroupSpec = std::variant<WholeGroup, CharacterKernel, CyclicSubgroup, WordList>;

std::string describe(const MarkedGroup& group, const SubgroupSpec& spec);

/// Closest-vector data of an integer vector against a sublattice.
struct SublatticeFit {
  Eigen::VectorXi coefficients;
  Eigen::VectorXi residual;
  double residual_norm = 0.0;
  bool member = false;
};

/// Rounds the least-squares coefficients; membership means zero residual.
SublatticeFit fit_sublattice(const Eigen::MatrixXi& basis, const Eigen::VectorXi& v);

/// Throws InvalidInput if the spec is malformed for the group.
void validate_spec(const MarkedGroup& group, const SubgroupSpec& spec);

bool is_member(const MarkedGroup& group, const SubgroupSpec& spec, const GroupElement& element);

/// Membership test when only the matrix and exponent sums are at hand.
bool is_member(const MarkedGroup& group, const SubgroupSpec& spec, const Mobius<double>& matrix,
               const std::vector<int>& exponent_sums);

}  // namespace limitlab
