#include "limitlab/ball.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

namespace limitlab {

EnumerationLimits EnumerationLimits::from_environment() {
  EnumerationLimits limits;
  if (const char* cap = std::getenv("LIMITLAB_MAX_DEPTH")) {
    char* end = nullptr;
    const long value = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && value >= 0) limits.max_depth = std::min<int>(limits.max_depth, static_cast<int>(value));
  }
  return limits;
}

namespace {

Letter letter_from_rank(int rank) { return {rank / 2, rank % 2 == 0 ? 1 : -1}; }

constexpr double kCell = 1e-4;
constexpr double kProbe = 1e-5;

using Cell = std::array<std::int64_t, 4>;

Cell cell_of(const Mobius<double>::Matrix& m) {
  return {static_cast<std::int64_t>(std::floor(m(0, 0) / kCell)), static_cast<std::int64_t>(std::floor(m(0, 1) / kCell)),
          static_cast<std::int64_t>(std::floor(m(1, 0) / kCell)), static_cast<std::int64_t>(std::floor(m(1, 1) / kCell))};
}

std::uint64_t hash_cell(const Cell& c) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int64_t v : c) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  return h ^ (h >> 33);
}

// Open-addressing multimap from grid cell to element index.
class CellIndex {
 public:
  explicit CellIndex(const std::vector<Mobius<double>>& matrices) : matrices_(matrices) { rehash(1u << 12); }

  void insert(std::uint32_t index) {
    if (2 * (count_ + 1) > slots_.size()) rehash(slots_.size() * 2);
    place(hash_cell(cell_of(matrices_[index].matrix())), index);
    ++count_;
  }

  template <typename Visit>
  void for_each_in_cell(const Cell& cell, Visit&& visit) const {
    const std::uint64_t h = hash_cell(cell);
    for (std::size_t s = h & mask_;; s = (s + 1) & mask_) {
      const Slot& slot = slots_[s];
      if (slot.index == kEmpty) return;
      if (slot.hash == h) visit(slot.index);
    }
  }

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;
  struct Slot {
    std::uint64_t hash = 0;
    std::uint32_t index = kEmpty;
  };

  void place(std::uint64_t h, std::uint32_t index) {
    std::size_t s = h & mask_;
    while (slots_[s].index != kEmpty) s = (s + 1) & mask_;
    slots_[s] = {h, index};
  }

  void rehash(std::size_t capacity) {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(capacity, Slot{});
    mask_ = capacity - 1;
    for (const Slot& slot : old) {
      if (slot.index != kEmpty) place(slot.hash, slot.index);
    }
  }

  const std::vector<Mobius<double>>& matrices_;
  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  std::size_t count_ = 0;
};

// Every cell that may hold a matrix within kProbe of m (or of -m when the
// canonical sign is ambiguous).
void probe_cells(const Mobius<double>::Matrix& m, std::vector<Cell>& out) {
  out.clear();
  auto expand = [&](const Mobius<double>::Matrix& q) {
    const Cell base = cell_of(q);
    std::array<std::array<std::int64_t, 2>, 4> options{};
    std::array<int, 4> counts{};
    for (int k = 0; k < 4; ++k) {
      const double v = q(k / 2, k % 2) / kCell;
      options[k][0] = base[k];
      counts[k] = 1;
      const double frac = v - std::floor(v);
      if (frac < kProbe / kCell) options[k][counts[k]++] = base[k] - 1;
      else if (frac > 1.0 - kProbe / kCell) options[k][counts[k]++] = base[k] + 1;
    }
    for (int i0 = 0; i0 < counts[0]; ++i0)
      for (int i1 = 0; i1 < counts[1]; ++i1)
        for (int i2 = 0; i2 < counts[2]; ++i2)
          for (int i3 = 0; i3 < counts[3]; ++i3)
            out.push_back({options[0][i0], options[1][i1], options[2][i2], options[3][i3]});
  };
  expand(m);
  if (std::abs(m(0, 0)) < kProbe) expand(-m);
}

}  // namespace

Word Ball::word(std::size_t i) const {
  std::vector<Letter> letters(lengths_[i]);
  for (std::size_t k = letters.size(); k > 0; --k) {
    letters[k - 1] = letter_from_rank(last_letters_[i]);
    i = parents_[i];
  }
  return Word(std::move(letters));
}

std::vector<int> Ball::exponent_sums(std::size_t i) const {
  std::vector<int> sums(static_cast<std::size_t>(rank_), 0);
  for (int k = lengths_[i]; k > 0; --k) {
    const Letter letter = letter_from_rank(last_letters_[i]);
    sums[static_cast<std::size_t>(letter.generator)] += letter.exponent;
    i = parents_[i];
  }
  return sums;
}

GroupElement Ball::element(std::size_t i, const MarkedGroup& group) const {
  GroupElement e = group.element(word(i));
  e.matrix = matrices_[i];
  return e;
}

Ball enumerate_ball(const MarkedGroup& group, int depth, const EnumerationLimits& limits) {
  if (depth < 0) throw Error(ErrorCode::InvalidInput, "depth must be nonnegative");
  if (depth > limits.max_depth) {
    throw Error(ErrorCode::DepthExceeded,
                "depth " + std::to_string(depth) + " exceeds the limit " + std::to_string(limits.max_depth));
  }
  Ball ball;
  ball.depth_ = depth;
  ball.rank_ = group.rank();
  ball.matrices_.push_back(Mobius<double>::identity());
  ball.parents_.push_back(0);
  ball.last_letters_.push_back(-1);
  ball.lengths_.push_back(0);
  ball.sphere_offsets_ = {0, 1};

  CellIndex index(ball.matrices_);
  index.insert(0);
  const int letters = 2 * group.rank();
  std::vector<Cell> cells;

  for (int k = 1; k <= depth; ++k) {
    const auto [begin, end] = ball.sphere(k - 1);
    for (std::size_t parent = begin; parent < end; ++parent) {
      const int last = ball.last_letters_[parent];
      for (int r = 0; r < letters; ++r) {
        if (last >= 0 && (r ^ 1) == last) continue;
        const Mobius<double> candidate = ball.matrices_[parent] * group.letter_matrix(letter_from_rank(r));
        bool duplicate = false;
        probe_cells(candidate.matrix(), cells);
        for (const Cell& cell : cells) {
          index.for_each_in_cell(cell, [&](std::uint32_t other) {
            const double dist = matrix_distance(candidate, ball.matrices_[other]);
            if (dist < kDuplicateTolerance) {
              duplicate = true;
            } else if (dist < 10.0 * kDuplicateTolerance) {
              throw Error(ErrorCode::ToleranceCollision,
                          "elements " + group.format_word(ball.word(other)) + " and a length-" + std::to_string(k) +
                              " word differ by " + std::to_string(dist));
            }
          });
          if (duplicate) break;
        }
        if (duplicate) continue;
        if (ball.matrices_.size() >= limits.max_elements) {
          throw Error(ErrorCode::DepthExceeded, "ball exceeds the element budget of " +
                                                    std::to_string(limits.max_elements) + " at depth " +
                                                    std::to_string(k));
        }
        ball.matrices_.push_back(candidate);
        ball.parents_.push_back(static_cast<std::uint32_t>(parent));
        ball.last_letters_.push_back(static_cast<std::int8_t>(r));
        ball.lengths_.push_back(static_cast<std::uint8_t>(k));
        index.insert(static_cast<std::uint32_t>(ball.matrices_.size() - 1));
      }
    }
    ball.sphere_offsets_.push_back(ball.matrices_.size());
  }
  return ball;
}

double min_separation(const Ball& ball, double window) {
  std::vector<std::uint32_t> order(ball.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t p, std::uint32_t q) {
    return ball.matrix(p).a() < ball.matrix(q).a() || (ball.matrix(p).a() == ball.matrix(q).a() && p < q);
  });
  double best = window;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double a = ball.matrix(order[i]).a();
    for (std::size_t j = i + 1; j < order.size() && ball.matrix(order[j]).a() - a < best; ++j) {
      best = std::min(best, matrix_distance(ball.matrix(order[i]), ball.matrix(order[j])));
    }
  }
  return best;
}

}  // namespace limitlab
