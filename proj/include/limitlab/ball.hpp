#pragma once

#include <cstdint>
#include <vector>

#include "limitlab/marked_group.hpp"

namespace limitlab {

struct EnumerationLimits {
  int max_depth = 14;
  std::size_t max_elements = 40'000'000;

  /// Defaults, with max_depth lowered to LIMITLAB_MAX_DEPTH when that is set.
  static EnumerationLimits from_environment();
};

/// All distinct elements of word length <= depth, in shortlex order of their
/// shortest words. Words are stored as parent links to keep large balls small.
class Ball {
 public:
  std::size_t size() const { return matrices_.size(); }
  int depth() const { return depth_; }

  const Mobius<double>& matrix(std::size_t i) const { return matrices_[i]; }
  int length(std::size_t i) const { return lengths_[i]; }
  Word word(std::size_t i) const;
  std::vector<int> exponent_sums(std::size_t i) const;
  GroupElement element(std::size_t i, const MarkedGroup& group) const;

  /// Index range [begin, end) of the elements of word length exactly k.
  std::pair<std::size_t, std::size_t> sphere(int k) const {
    return {sphere_offsets_[static_cast<std::size_t>(k)], sphere_offsets_[static_cast<std::size_t>(k) + 1]};
  }

 private:
  friend Ball enumerate_ball(const MarkedGroup& group, int depth, const EnumerationLimits& limits);

  int depth_ = 0;
  int rank_ = 0;
  std::vector<Mobius<double>> matrices_;
  std::vector<std::uint32_t> parents_;
  std::vector<std::int8_t> last_letters_;
  std::vector<std::uint8_t> lengths_;
  std::vector<std::size_t> sphere_offsets_;
};

/// Breadth-first enumeration over freely reduced words with matrix dedup at
/// 1e-6. Throws DepthExceeded past the limits and ToleranceCollision when two
/// kept elements sit within [1e-6, 1e-5) of each other.
Ball enumerate_ball(const MarkedGroup& group, int depth,
                    const EnumerationLimits& limits = EnumerationLimits::from_environment());

/// Smallest matrix distance between distinct elements, or `window` when no
/// pair is closer than that.
double min_separation(const Ball& ball, double window);

}  // namespace limitlab
