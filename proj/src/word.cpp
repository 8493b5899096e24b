#include "limitlab/word.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include "limitlab/error.hpp"

namespace limitlab {

Word::Word(std::vector<Letter> letters) {
  letters_.reserve(letters.size());
  for (const Letter& letter : letters) {
    if (letter.exponent != 1 && letter.exponent != -1) {
      throw Error(ErrorCode::InvalidInput, "letter exponent must be +1 or -1");
    }
    if (letter.generator < 0) throw Error(ErrorCode::InvalidInput, "negative generator index");
    append(letter);
  }
}

Word Word::generator(int index, int exponent) {
  if (exponent == 0) return Word();
  return Word(std::vector<Letter>(1, Letter{index, exponent > 0 ? 1 : -1})).power(std::abs(exponent));
}

void Word::append(const Letter& letter) {
  if (!letters_.empty() && letters_.back() == letter.inverse()) {
    letters_.pop_back();
  } else {
    letters_.push_back(letter);
  }
}

Word Word::inverse() const {
  Word result;
  result.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) result.letters_.push_back(it->inverse());
  return result;
}

Word Word::power(int k) const {
  const Word base = k < 0 ? inverse() : *this;
  Word result;
  for (int n = 0; n < std::abs(k); ++n) result = result * base;
  return result;
}

Word Word::operator*(const Word& other) const {
  Word result = *this;
  for (const Letter& letter : other.letters_) result.append(letter);
  return result;
}

std::vector<int> Word::exponent_sums(int rank) const {
  std::vector<int> sums(static_cast<std::size_t>(rank), 0);
  for (const Letter& letter : letters_) {
    if (letter.generator >= rank) throw Error(ErrorCode::InvalidInput, "generator index out of range");
    sums[static_cast<std::size_t>(letter.generator)] += letter.exponent;
  }
  return sums;
}

std::vector<std::string> Word::tokens(const std::vector<std::string>& names) const {
  std::vector<std::string> out;
  out.reserve(letters_.size());
  for (const Letter& letter : letters_) {
    if (letter.generator >= static_cast<int>(names.size())) {
      throw Error(ErrorCode::InvalidInput, "generator index out of range");
    }
    std::string token = names[static_cast<std::size_t>(letter.generator)];
    if (letter.exponent < 0) token += "^-1";
    out.push_back(std::move(token));
  }
  return out;
}

std::string Word::format(const std::vector<std::string>& names) const {
  if (letters_.empty()) return "e";
  std::string out;
  for (const std::string& token : tokens(names)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

namespace {

Word parse_token(std::string_view token, const std::vector<std::string>& names) {
  std::string_view name = token;
  int exponent = 1;
  if (const auto caret = token.find('^'); caret != std::string_view::npos) {
    name = token.substr(0, caret);
    const std::string_view digits = token.substr(caret + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), exponent);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw Error(ErrorCode::InvalidInput, "bad exponent in token '" + std::string(token) + "'");
    }
  }
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::InvalidInput, "unknown generator '" + std::string(name) + "'");
  return Word::generator(static_cast<int>(it - names.begin()), exponent);
}

}  // namespace

Word Word::parse(std::string_view text, const std::vector<std::string>& names) {
  Word result;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '*' || text[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '*' && text[end] != '\t') ++end;
    if (end > pos) {
      const std::string_view token = text.substr(pos, end - pos);
      if (token != "e" && token != "1") result = result * parse_token(token, names);
    }
    pos = end;
  }
  return result;
}

Word Word::from_tokens(const std::vector<std::string>& tokens, const std::vector<std::string>& names) {
  Word result;
  for (const std::string& token : tokens) result = result * parse_token(token, names);
  return result;
}

std::strong_ordering operator<=>(const Word& lhs, const Word& rhs) {
  if (auto cmp = lhs.length() <=> rhs.length(); cmp != 0) return cmp;
  for (std::size_t k = 0; k < lhs.length(); ++k) {
    if (auto cmp = lhs.letters_[k].rank() <=> rhs.letters_[k].rank(); cmp != 0) return cmp;
  }
  return std::strong_ordering::equal;
}

}  // namespace limitlab
