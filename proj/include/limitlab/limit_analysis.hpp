#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "limitlab/ball.hpp"
#include "limitlab/marked_group.hpp"

namespace limitlab {

inline constexpr double kCloudResolution = 1e-8;

/// Finite approximation of a limit set: disc-angles sorted ascending, each
/// with the shortest word length of a loxodromic element fixing it.
struct LimitCloud {
  std::string group_id;
  std::string spec;
  int depth = 0;
  std::vector<double> angles;
  std::vector<std::uint8_t> word_lengths;

  std::size_t size() const { return angles.size(); }
  bool empty() const { return angles.empty(); }
};

/// Sorts, wraps into [0, 2pi) and merges points closer than 1e-8, keeping the
/// smallest word length.
LimitCloud make_cloud(std::vector<double> angles, std::vector<std::uint8_t> word_lengths, std::string group_id = "",
                      std::string spec = "", int depth = 0);

LimitCloud approximate_limit_set(const MarkedGroup& group, const SubgroupSpec& spec, int depth,
                                 const EnumerationLimits& limits = EnumerationLimits::from_environment());
LimitCloud limit_set_from_ball(const MarkedGroup& group, const Ball& ball, const SubgroupSpec& spec);

/// Occupancy of the 1e-8 angular bins; the form used when the ball is too
/// large to hold in memory.
struct BinnedCloud {
  std::string group_id;
  std::string spec;
  int depth = 0;
  std::vector<std::uint64_t> bits;
  std::size_t occupied = 0;

  static std::size_t bin_count();
  bool test(std::size_t bin) const { return (bits[bin >> 6] >> (bin & 63)) & 1u; }
  /// Occupied bins in ascending order, as bin-centre angles.
  std::vector<double> centres() const;
};

/// Streams every freely reduced word of length <= depth depth-first, without
/// storing the ball, and bins the fixed points of the loxodromic members of
/// each spec. Specs must be whole-group or character kernels.
std::vector<BinnedCloud> stream_limit_bins(const MarkedGroup& group, const std::vector<SubgroupSpec>& specs, int depth);

struct OrbitCounts {
  std::vector<double> radii;
  std::vector<std::size_t> counts;
  InteriorPoint<double> basepoint = InteriorPoint<double>::i();
  /// Radius below which the ball is complete: the smallest displacement of a
  /// word of maximal length. Zero when unknown.
  double trusted_radius = 0.0;

  /// N(R) = number of elements with displacement <= R.
  std::size_t count_within(double r) const;
};

OrbitCounts orbit_counts(const MarkedGroup& group, const SubgroupSpec& spec, int depth,
                         const InteriorPoint<double>& z0 = InteriorPoint<double>::i(),
                         const EnumerationLimits& limits = EnumerationLimits::from_environment());
OrbitCounts orbit_counts_from_ball(const MarkedGroup& group, const Ball& ball, const SubgroupSpec& spec,
                                   const InteriorPoint<double>& z0 = InteriorPoint<double>::i());

/// Sum of exp(-s R) over the counted elements, reduced pairwise.
double poincare_partial_sum(const OrbitCounts& counts, double s);

struct DeltaEstimate {
  double delta_hat = 0.0;
  double residual = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
};

/// Slope of log N(R) against R on [0.4 R_max, 0.9 R_max], sampled at 64
/// equally spaced radii. R_max is the trusted radius when set, otherwise the
/// largest radius. Needs at least 50 elements at positive radius.
DeltaEstimate estimate_delta(const OrbitCounts& counts);

/// Slope of log(occupied bins) against log(1/scale). Needs >= 3 scales
/// spanning >= 1.5 decades and >= 200 points.
double box_dimension(const LimitCloud& cloud, const std::vector<double>& scales);

/// Symmetric Hausdorff distance in the disc-angle metric.
double cloud_hausdorff(const LimitCloud& a, const LimitCloud& b);
double cloud_hausdorff(const BinnedCloud& a, const BinnedCloud& b);

/// Largest circular gap between consecutive points.
double max_angular_gap(const LimitCloud& cloud);
double max_angular_gap(const BinnedCloud& cloud);

/// Largest distance from a point of `inner` to the nearest point of `outer`.
double max_distance_to(const LimitCloud& inner, const LimitCloud& outer);

LimitCloud apply(const Mobius<double>& m, const LimitCloud& cloud);

/// The body of the cloud JSON artifact, for embedding in other reports.
nlohmann::ordered_json cloud_payload(const LimitCloud& cloud);

void write_cloud_json(const LimitCloud& cloud, const std::string& path);
void write_cloud_svg(const LimitCloud& cloud, const std::string& path);
void write_counts_csv(const OrbitCounts& counts, const std::string& path);

}  // namespace limitlab
