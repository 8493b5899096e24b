#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace limitlab {

/// One generator raised to +1 or -1.
struct Letter {
  int generator = 0;
  int exponent = 1;

  Letter inverse() const { return {generator, -exponent}; }
  /// Position in the fixed enumeration order g0, g0^-1, g1, g1^-1, ...
  int rank() const { return 2 * generator + (exponent < 0 ? 1 : 0); }

  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Freely reduced word in the generators. Every constructor cancels adjacent
/// inverse pairs, so two words are equal iff their letter sequences are.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);

  static Word generator(int index, int exponent = 1);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const;
  Word power(int k) const;
  Word operator*(const Word& other) const;

  /// Exponent sum per generator.
  std::vector<int> exponent_sums(int rank) const;

  /// Space-separated tokens such as "a1 b1 a1^-1"; "e" for the identity.
  std::string format(const std::vector<std::string>& names) const;
  std::vector<std::string> tokens(const std::vector<std::string>& names) const;

  /// Accepts tokens "name", "name^-1", "name^k" separated by spaces or '*'.
  static Word parse(std::string_view text, const std::vector<std::string>& names);
  static Word from_tokens(const std::vector<std::string>& tokens, const std::vector<std::string>& names);

  /// Shortlex: shorter first, then letter by letter in enumeration order.
  friend std::strong_ordering operator<=>(const Word& lhs, const Word& rhs);
  friend bool operator==(const Word& lhs, const Word& rhs) { return lhs.letters_ == rhs.letters_; }

 private:
  void append(const Letter& letter);

  std::vector<Letter> letters_;
};

}  // namespace limitlab
