#include "limitlab/limit_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "limitlab/artifacts.hpp"
#include "limitlab/presentation_io.hpp"

namespace limitlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void sort_and_merge(std::vector<double>& angles, std::vector<std::uint8_t>& lengths) {
  std::vector<std::size_t> order(angles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
    return angles[p] < angles[q] || (angles[p] == angles[q] && lengths[p] < lengths[q]);
  });
  std::vector<double> merged_angles;
  std::vector<std::uint8_t> merged_lengths;
  merged_angles.reserve(angles.size());
  merged_lengths.reserve(angles.size());
  for (std::size_t idx : order) {
    if (!merged_angles.empty() && angles[idx] - merged_angles.back() < kCloudResolution) {
      merged_lengths.back() = std::min(merged_lengths.back(), lengths[idx]);
      continue;
    }
    merged_angles.push_back(angles[idx]);
    merged_lengths.push_back(lengths[idx]);
  }
  // The circle closes up at 2pi.
  if (merged_angles.size() > 1 && merged_angles.back() + kCloudResolution > kTwoPi + merged_angles.front()) {
    merged_lengths.front() = std::min(merged_lengths.front(), merged_lengths.back());
    merged_angles.pop_back();
    merged_lengths.pop_back();
  }
  angles = std::move(merged_angles);
  lengths = std::move(merged_lengths);
}

// Disc-angles of the two fixed points of a loxodromic matrix; false otherwise.
bool fixed_point_angles(double a, double b, double c, double d, double& repelling, double& attracting) {
  const double tr = a + d;
  if (std::abs(tr) <= 2.0 + kClassifyTolerance) return false;
  const double root = std::sqrt(tr * tr - 4.0);
  const double big = tr > 0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
  auto angle_of = [&](double lambda) {
    const double u1 = b, v1 = lambda - a;
    const double u2 = lambda - d, v2 = c;
    const bool first = std::max(std::abs(u1), std::abs(v1)) >= std::max(std::abs(u2), std::abs(v2));
    return wrap_angle(-2.0 * (first ? std::atan2(v1, u1) : std::atan2(v2, u2)));
  };
  repelling = angle_of(1.0 / big);
  attracting = angle_of(big);
  return true;
}

}  // namespace

LimitCloud make_cloud(std::vector<double> angles, std::vector<std::uint8_t> word_lengths, std::string group_id,
                      std::string spec, int depth) {
  if (word_lengths.empty()) word_lengths.assign(angles.size(), 0);
  if (word_lengths.size() != angles.size()) throw Error(ErrorCode::InvalidInput, "cloud length mismatch");
  for (double& a : angles) {
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidInput, "non-finite cloud angle");
    a = wrap_angle(a);
  }
  sort_and_merge(angles, word_lengths);
  return LimitCloud{std::move(group_id), std::move(spec), depth, std::move(angles), std::move(word_lengths)};
}

LimitCloud limit_set_from_ball(const MarkedGroup& group, const Ball& ball, const SubgroupSpec& spec) {
  validate_spec(group, spec);
  std::vector<double> angles;
  std::vector<std::uint8_t> lengths;
  for (std::size_t i = 1; i < ball.size(); ++i) {
    const Mobius<double>& m = ball.matrix(i);
    double rep = 0.0, att = 0.0;
    if (!fixed_point_angles(m.a(), m.b(), m.c(), m.d(), rep, att)) continue;
    if (!std::holds_alternative<WholeGroup>(spec) && !is_member(group, spec, m, ball.exponent_sums(i))) continue;
    angles.push_back(rep);
    angles.push_back(att);
    lengths.push_back(static_cast<std::uint8_t>(ball.length(i)));
    lengths.push_back(static_cast<std::uint8_t>(ball.length(i)));
  }
  return make_cloud(std::move(angles), std::move(lengths), group.id(), describe(group, spec), ball.depth());
}

LimitCloud approximate_limit_set(const MarkedGroup& group, const SubgroupSpec& spec, int depth,
                                 const EnumerationLimits& limits) {
  return limit_set_from_ball(group, enumerate_ball(group, depth, limits), spec);
}

std::size_t BinnedCloud::bin_count() {
  return static_cast<std::size_t>(std::ceil(kTwoPi / kCloudResolution));
}

std::vector<double> BinnedCloud::centres() const {
  std::vector<double> out;
  out.reserve(occupied);
  for (std::size_t w = 0; w < bits.size(); ++w) {
    for (std::uint64_t word = bits[w]; word != 0; word &= word - 1) {
      const std::size_t bin = 64 * w + static_cast<std::size_t>(__builtin_ctzll(word));
      out.push_back((static_cast<double>(bin) + 0.5) * kCloudResolution);
    }
  }
  return out;
}

std::vector<BinnedCloud> stream_limit_bins(const MarkedGroup& group, const std::vector<SubgroupSpec>& specs,
                                           int depth) {
  if (depth < 0) throw Error(ErrorCode::InvalidInput, "depth must be nonnegative");
  const int cap = EnumerationLimits::from_environment().max_depth;
  if (depth > cap) throw Error(ErrorCode::DepthExceeded, "depth exceeds LIMITLAB_MAX_DEPTH");

  const int rank = group.rank();
  const int letters = 2 * rank;
  const std::size_t bins = BinnedCloud::bin_count();

  // Per spec, the character image of each letter and the sublattice test.
  struct Tracker {
    bool whole = true;
    Eigen::MatrixXi letter_images;
    Eigen::MatrixXi basis;
  };
  std::vector<Tracker> trackers;
  std::vector<BinnedCloud> clouds;
  for (const SubgroupSpec& spec : specs) {
    validate_spec(group, spec);
    Tracker t;
    if (const auto* kernel = std::get_if<CharacterKernel>(&spec)) {
      const Character& c = group.character(kernel->character);
      t.whole = false;
      t.basis = kernel->basis;
      t.letter_images.resize(c.dimension(), letters);
      for (int r = 0; r < letters; ++r) t.letter_images.col(r) = (r % 2 == 0 ? 1 : -1) * c.images.col(r / 2);
    } else if (!std::holds_alternative<WholeGroup>(spec)) {
      throw Error(ErrorCode::InvalidInput, "streamed clouds support whole-group and character-kernel specs");
    }
    trackers.push_back(std::move(t));
    BinnedCloud cloud;
    cloud.group_id = group.id();
    cloud.spec = describe(group, spec);
    cloud.depth = depth;
    cloud.bits.assign((bins + 63) / 64, 0);
    clouds.push_back(std::move(cloud));
  }

  std::vector<Eigen::Matrix2d> letter_matrices;
  for (int r = 0; r < letters; ++r) letter_matrices.push_back(group.letter_matrix({r / 2, r % 2 == 0 ? 1 : -1}).matrix());

  struct Frame {
    Eigen::Matrix2d m;
    int last = -1;
    int next = 0;
  };
  std::vector<Frame> stack(static_cast<std::size_t>(depth) + 1);
  std::vector<std::vector<Eigen::VectorXi>> images(trackers.size());
  for (std::size_t s = 0; s < trackers.size(); ++s) {
    images[s].assign(static_cast<std::size_t>(depth) + 1,
                     Eigen::VectorXi::Zero(trackers[s].whole ? 0 : trackers[s].letter_images.rows()));
  }
  stack[0].m.setIdentity();

  auto mark = [&](BinnedCloud& cloud, double angle) {
    const std::size_t bin = std::min(bins - 1, static_cast<std::size_t>(angle / kCloudResolution));
    std::uint64_t& word = cloud.bits[bin >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (bin & 63);
    if (!(word & bit)) {
      word |= bit;
      ++cloud.occupied;
    }
  };

  int level = 0;
  while (level >= 0) {
    Frame& frame = stack[static_cast<std::size_t>(level)];
    if (level == depth || frame.next >= letters) {
      --level;
      continue;
    }
    const int r = frame.next++;
    if (frame.last >= 0 && (r ^ 1) == frame.last) continue;
    Frame& child = stack[static_cast<std::size_t>(level) + 1];
    child.m.noalias() = frame.m * letter_matrices[static_cast<std::size_t>(r)];
    child.last = r;
    child.next = 0;
    for (std::size_t s = 0; s < trackers.size(); ++s) {
      if (!trackers[s].whole) {
        images[s][static_cast<std::size_t>(level) + 1] = images[s][static_cast<std::size_t>(level)] + trackers[s].letter_images.col(r);
      }
    }
    ++level;

    double rep = 0.0, att = 0.0;
    if (!fixed_point_angles(child.m(0, 0), child.m(0, 1), child.m(1, 0), child.m(1, 1), rep, att)) continue;
    for (std::size_t s = 0; s < trackers.size(); ++s) {
      if (!trackers[s].whole) {
        const Eigen::VectorXi& image = images[s][static_cast<std::size_t>(level)];
        const bool member = trackers[s].basis.cols() == 0 ? image.isZero() : fit_sublattice(trackers[s].basis, image).member;
        if (!member) continue;
      }
      mark(clouds[s], rep);
      mark(clouds[s], att);
    }
  }
  return clouds;
}

std::size_t OrbitCounts::count_within(double r) const {
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  if (it == radii.begin()) return 0;
  return counts[static_cast<std::size_t>(it - radii.begin()) - 1];
}

OrbitCounts orbit_counts_from_ball(const MarkedGroup& group, const Ball& ball, const SubgroupSpec& spec,
                                   const InteriorPoint<double>& z0) {
  validate_spec(group, spec);
  const bool at_i = z0.x == 0.0 && z0.y == 1.0;
  auto displacement = [&](const Mobius<double>& m) {
    return at_i ? displacement_at_i(m) : hyperbolic_distance(z0, apply(m, z0));
  };
  OrbitCounts out;
  out.basepoint = z0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (i > 0 && !std::holds_alternative<WholeGroup>(spec) && !is_member(group, spec, ball.matrix(i), ball.exponent_sums(i))) {
      continue;
    }
    out.radii.push_back(displacement(ball.matrix(i)));
  }
  std::sort(out.radii.begin(), out.radii.end());
  out.counts.resize(out.radii.size());
  for (std::size_t k = out.radii.size(); k > 0; --k) {
    const std::size_t idx = k - 1;
    out.counts[idx] = (idx + 1 < out.radii.size() && out.radii[idx + 1] == out.radii[idx]) ? out.counts[idx + 1] : idx + 1;
  }
  if (ball.depth() > 0) {
    const auto [begin, end] = ball.sphere(ball.depth());
    double trusted = std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i < end; ++i) trusted = std::min(trusted, displacement(ball.matrix(i)));
    out.trusted_radius = std::isfinite(trusted) ? trusted : 0.0;
  }
  return out;
}

OrbitCounts orbit_counts(const MarkedGroup& group, const SubgroupSpec& spec, int depth, const InteriorPoint<double>& z0,
                         const EnumerationLimits& limits) {
  return orbit_counts_from_ball(group, enumerate_ball(group, depth, limits), spec, z0);
}

namespace {

double pairwise_sum(const double* first, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += first[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(first, half) + pairwise_sum(first + half, n - half);
}

}  // namespace

double poincare_partial_sum(const OrbitCounts& counts, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidInput, "exponent s must be positive");
  std::vector<double> terms;
  terms.reserve(counts.radii.size());
  std::size_t previous = 0;
  for (std::size_t k = 0; k < counts.radii.size(); ++k) {
    const std::size_t multiplicity = counts.counts[k] >= previous ? counts.counts[k] - previous : 0;
    previous = std::max(previous, counts.counts[k]);
    if (multiplicity > 0) terms.push_back(static_cast<double>(multiplicity) * std::exp(-s * counts.radii[k]));
  }
  return pairwise_sum(terms.data(), terms.size());
}

DeltaEstimate estimate_delta(const OrbitCounts& counts) {
  if (counts.radii.empty()) throw Error(ErrorCode::InsufficientData, "no orbit counts");
  const std::size_t total = counts.counts.back();
  const std::size_t at_zero = counts.count_within(0.0);
  if (total - at_zero < 50) {
    throw Error(ErrorCode::InsufficientData, "need at least 50 elements at positive radius");
  }
  const double r_max = counts.trusted_radius > 0.0 ? counts.trusted_radius : counts.radii.back();
  DeltaEstimate est;
  est.r_lo = 0.4 * r_max;
  est.r_hi = 0.9 * r_max;
  constexpr int kSamples = 64;
  Eigen::MatrixXd design(kSamples, 2);
  Eigen::VectorXd target(kSamples);
  for (int k = 0; k < kSamples; ++k) {
    const double r = est.r_lo + (est.r_hi - est.r_lo) * k / (kSamples - 1);
    const std::size_t n = counts.count_within(r);
    if (n == 0) throw Error(ErrorCode::InsufficientData, "empty fit window");
    design(k, 0) = r;
    design(k, 1) = 1.0;
    target(k) = std::log(static_cast<double>(n));
  }
  const Eigen::Vector2d fit = design.colPivHouseholderQr().solve(target);
  est.delta_hat = fit(0);
  est.residual = std::sqrt((design * fit - target).squaredNorm() / kSamples);
  return est;
}

double box_dimension(const LimitCloud& cloud, const std::vector<double>& scales) {
  if (cloud.size() < 200) throw Error(ErrorCode::InsufficientData, "box dimension needs at least 200 points");
  if (scales.size() < 3) throw Error(ErrorCode::InsufficientData, "box dimension needs at least 3 scales");
  for (double s : scales) {
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidInput, "scales must be positive");
  }
  const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
  if (std::log10(*hi / *lo) < 1.5) throw Error(ErrorCode::InsufficientData, "scales must span 1.5 decades");

  Eigen::MatrixXd design(static_cast<Eigen::Index>(scales.size()), 2);
  Eigen::VectorXd target(static_cast<Eigen::Index>(scales.size()));
  for (std::size_t k = 0; k < scales.size(); ++k) {
    std::size_t occupied = 0;
    long long last = -1;
    for (double a : cloud.angles) {
      const long long bin = static_cast<long long>(std::floor(a / scales[k]));
      if (bin != last) {
        ++occupied;
        last = bin;
      }
    }
    design(static_cast<Eigen::Index>(k), 0) = std::log(1.0 / scales[k]);
    design(static_cast<Eigen::Index>(k), 1) = 1.0;
    target(static_cast<Eigen::Index>(k)) = std::log(static_cast<double>(occupied));
  }
  return design.colPivHouseholderQr().solve(target)(0);
}

double max_distance_to(const LimitCloud& inner, const LimitCloud& outer) {
  if (inner.empty() || outer.empty()) throw Error(ErrorCode::EmptyCloud, "cloud is empty");
  double worst = 0.0;
  const auto& o = outer.angles;
  for (double a : inner.angles) {
    const auto it = std::lower_bound(o.begin(), o.end(), a);
    const double next = it == o.end() ? o.front() : *it;
    const double prev = it == o.begin() ? o.back() : *(it - 1);
    worst = std::max(worst, std::min(angular_distance(a, next), angular_distance(a, prev)));
  }
  return worst;
}

double cloud_hausdorff(const LimitCloud& a, const LimitCloud& b) {
  return std::max(max_distance_to(a, b), max_distance_to(b, a));
}

double max_angular_gap(const LimitCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "cloud is empty");
  double gap = kTwoPi - cloud.angles.back() + cloud.angles.front();
  for (std::size_t k = 1; k < cloud.size(); ++k) gap = std::max(gap, cloud.angles[k] - cloud.angles[k - 1]);
  return gap;
}

namespace {

std::size_t first_set(const BinnedCloud& cloud) {
  for (std::size_t w = 0; w < cloud.bits.size(); ++w) {
    if (cloud.bits[w]) return 64 * w + static_cast<std::size_t>(__builtin_ctzll(cloud.bits[w]));
  }
  return BinnedCloud::bin_count();
}

// Calls visit(bin) for every occupied bin of either cloud, walking the circle
// once starting at `start`, with flags telling which clouds hold the bin.
template <typename Visit>
void walk_bins(const BinnedCloud& a, const BinnedCloud& b, std::size_t start, Visit&& visit) {
  const std::size_t words = a.bits.size();
  for (std::size_t step = 0; step < words + 1; ++step) {
    const std::size_t w = (start / 64 + step) % words;
    std::uint64_t merged = a.bits[w] | b.bits[w];
    for (; merged != 0; merged &= merged - 1) {
      const std::size_t bin = 64 * w + static_cast<std::size_t>(__builtin_ctzll(merged));
      // Bins of the starting word before `start` belong to the final lap.
      if ((step == 0 && bin < start) || (step == words && bin >= start)) continue;
      visit(bin, a.test(bin), b.test(bin));
    }
  }
}

double directed_bins(const BinnedCloud& from, const BinnedCloud& to) {
  const std::size_t n = BinnedCloud::bin_count();
  const std::size_t start = first_set(to);
  if (start >= n || from.occupied == 0) throw Error(ErrorCode::EmptyCloud, "cloud is empty");
  std::size_t worst = 0;
  std::size_t last_to = start;
  std::vector<std::size_t> pending;
  auto close_gap = [&](std::size_t next_to) {
    const std::size_t span = (next_to + n - last_to) % n == 0 ? n : (next_to + n - last_to) % n;
    for (std::size_t x : pending) {
      const std::size_t left = (x + n - last_to) % n;
      worst = std::max(worst, std::min(left, span - left));
    }
    pending.clear();
  };
  walk_bins(from, to, start, [&](std::size_t bin, bool in_from, bool in_to) {
    if (in_to) {
      if (bin != start) close_gap(bin);
      last_to = bin;
    } else if (in_from) {
      pending.push_back(bin);
    }
  });
  close_gap(start);
  return static_cast<double>(worst) * kCloudResolution;
}

}  // namespace

double cloud_hausdorff(const BinnedCloud& a, const BinnedCloud& b) {
  if (a.bits.size() != b.bits.size()) throw Error(ErrorCode::InvalidInput, "binned clouds differ in resolution");
  return std::max(directed_bins(a, b), directed_bins(b, a));
}

double max_angular_gap(const BinnedCloud& cloud) {
  const std::size_t n = BinnedCloud::bin_count();
  const std::size_t start = first_set(cloud);
  if (start >= n) throw Error(ErrorCode::EmptyCloud, "cloud is empty");
  std::size_t last = start;
  std::size_t widest = 0;
  walk_bins(cloud, cloud, start, [&](std::size_t bin, bool, bool) {
    if (bin == start) return;
    widest = std::max(widest, (bin + n - last) % n);
    last = bin;
  });
  widest = std::max(widest, (start + n - last) % n == 0 ? n : (start + n - last) % n);
  return static_cast<double>(widest) * kCloudResolution;
}

LimitCloud apply(const Mobius<double>& m, const LimitCloud& cloud) {
  std::vector<double> angles;
  angles.reserve(cloud.size());
  for (double a : cloud.angles) angles.push_back(apply(m, BoundaryPoint<double>::from_angle(a)).angle());
  return make_cloud(std::move(angles), cloud.word_lengths, cloud.group_id, cloud.spec, cloud.depth);
}

nlohmann::ordered_json cloud_payload(const LimitCloud& cloud) {
  nlohmann::ordered_json doc;
  doc["kind"] = "limit_cloud";
  doc["group"] = cloud.group_id;
  doc["spec"] = cloud.spec;
  doc["depth"] = cloud.depth;
  doc["count"] = cloud.size();
  doc["angles"] = cloud.angles;
  doc["word_lengths"] = cloud.word_lengths;
  return doc;
}

void write_cloud_json(const LimitCloud& cloud, const std::string& path) {
  std::string out;
  out.reserve(cloud.size() * 24 + 256);
  out += "{\n  \"schema_version\": \"";
  out += kSchemaVersion;
  out += "\",\n  \"kind\": \"limit_cloud\",\n  \"group\": " + nlohmann::json(cloud.group_id).dump();
  out += ",\n  \"spec\": " + nlohmann::json(cloud.spec).dump();
  out += ",\n  \"depth\": " + std::to_string(cloud.depth);
  out += ",\n  \"count\": " + std::to_string(cloud.size());
  out += ",\n  \"angles\": [";
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    if (k) out += ',';
    out += format_double(cloud.angles[k]);
  }
  out += "],\n  \"word_lengths\": [";
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(cloud.word_lengths[k]);
  }
  out += "]\n}\n";
  write_text_file(path, out);
}

void write_cloud_svg(const LimitCloud& cloud, const std::string& path) {
  constexpr std::size_t kMaxDots = 20000;
  SvgCanvas canvas;
  canvas.boundary_circle();
  const std::size_t stride = std::max<std::size_t>(1, (cloud.size() + kMaxDots - 1) / kMaxDots);
  int longest = 1;
  for (std::uint8_t len : cloud.word_lengths) longest = std::max<int>(longest, len);
  for (std::size_t k = 0; k < cloud.size(); k += stride) {
    // Shorter witnesses are drawn larger.
    const double radius = 1.0 + 3.0 * (1.0 - static_cast<double>(cloud.word_lengths[k]) / (longest + 1));
    canvas.dot(std::cos(cloud.angles[k]), std::sin(cloud.angles[k]), radius, "#1f4e9c");
  }
  write_text_file(path, canvas.str());
}

void write_counts_csv(const OrbitCounts& counts, const std::string& path) {
  std::string out = "R,N\n";
  for (std::size_t k = 0; k < counts.radii.size(); ++k) {
    out += format_double(counts.radii[k]);
    out += ',';
    out += std::to_string(counts.counts[k]);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace limitlab
