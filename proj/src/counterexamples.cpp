#include "limitlab/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "limitlab/artifacts.hpp"
#include "limitlab/ball.hpp"
#include "limitlab/presentation_io.hpp"
#include "limitlab/susskind_lab.hpp"

namespace limitlab {

int SpiralProgram::unit_steps() const {
  int total = 0;
  for (const SpiralRun& run : runs) total += run.length;
  return total;
}

LatticePoint unit_vector(const SpiralRun& run) {
  return run.direction == Direction::A ? LatticePoint{run.sign, 0} : LatticePoint{0, run.sign};
}

SpiralProgram program_from_runs(std::vector<SpiralRun> runs) {
  SpiralProgram program;
  program.vertices.push_back({0, 0});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const SpiralRun& run = runs[i];
    if (run.length < 1 || (run.sign != 1 && run.sign != -1)) {
      throw Error(ErrorCode::InvalidInput, "spiral runs need positive length and sign +-1");
    }
    const LatticePoint v = unit_vector(run);
    if (i > 0) {
      const LatticePoint u = unit_vector(runs[i - 1]);
      const int cross = u[0] * v[1] - u[1] * v[0];
      if (cross == 0) throw Error(ErrorCode::InvalidInput, "consecutive spiral runs must turn");
      program.turns.push_back(cross);
    }
    const LatticePoint& last = program.vertices.back();
    program.vertices.push_back({last[0] + run.length * v[0], last[1] + run.length * v[1]});
  }
  program.runs = std::move(runs);
  return program;
}

SpiralProgram spiral_program(int loops) {
  if (loops < 1) throw Error(ErrorCode::InvalidInput, "loops must be positive");
  std::vector<SpiralRun> runs;
  for (int i = 1; i <= 2 * loops; ++i) {
    const int sign = (i % 4 == 0 || i % 4 == 1) ? 1 : -1;
    runs.push_back({i % 2 == 1 ? Direction::B : Direction::A, sign, (i + 1) / 2});
  }
  return program_from_runs(std::move(runs));
}

Word spiral_word(const MarkedGroup& group, const SpiralProgram& program) {
  const auto names = group.generator_names();
  auto index_of = [&](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorCode::InvalidInput, "spiral word needs a generator named " + name);
    return static_cast<int>(it - names.begin());
  };
  const int a = index_of("a1");
  const int b = index_of("a2");
  std::vector<Letter> letters;
  for (const SpiralRun& run : program.runs) {
    for (int k = 0; k < run.length; ++k) letters.push_back({run.direction == Direction::A ? a : b, run.sign});
  }
  return Word(std::move(letters));
}

BoundaryPoint<Precise> spiral_target(const MarkedGroup& group, const SpiralProgram& program) {
  const Mobius<Precise> w = group.evaluate_precise(spiral_word(group, program));
  const InteriorPoint<Precise> i = InteriorPoint<Precise>::i();
  return ray_endpoint(i, apply(w, i));
}

double PiecewisePath::total_length() const {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) total += to_double(hyperbolic_distance(vertices[k], vertices[k + 1]));
  return total;
}

namespace {

// Unsigned angle at `corner` between the geodesics toward p and q.
double corner_angle(const InteriorPoint<Precise>& corner, const InteriorPoint<Precise>& p,
                    const InteriorPoint<Precise>& q) {
  const Mobius<Precise> to_i = move_to_i(corner);
  const auto [px, py] = to_disc(apply(to_i, p));
  const auto [qx, qy] = to_disc(apply(to_i, q));
  const double a = to_double(atan2(py, px));
  const double b = to_double(atan2(qy, qx));
  return angular_distance(a, b);
}

}  // namespace

PiecewisePath build_spiral_path(const SpiralProgram& program, double L, std::size_t max_segments) {
  if (!(L >= 2.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidLength, "segment length must be at least 2");
  PiecewisePath path;
  path.segment_length = L;
  const Mobius<Precise> step = axis_translation(Precise(L));
  const Precise quarter = pi<Precise>() / 2;
  std::vector<bool> turn_at;
  Mobius<Precise> frame;
  for (std::size_t r = 0; r < program.runs.size(); ++r) {
    if (r > 0) frame = frame * disc_rotation(Precise(program.turns[r - 1]) * quarter);
    for (int k = 0; k < program.runs[r].length; ++k) {
      turn_at.push_back(r > 0 && k == 0);
      path.frames.push_back(frame);
      frame = frame * step;
    }
  }
  path.frames.push_back(frame);
  turn_at.push_back(false);
  if (max_segments > 0 && max_segments + 1 < path.frames.size()) path.frames.resize(max_segments + 1);
  for (const auto& f : path.frames) path.vertices.push_back(apply(f, InteriorPoint<Precise>::i()));
  for (std::size_t k = 1; k + 1 < path.vertices.size(); ++k) {
    if (turn_at[k]) path.corner_angles.push_back(corner_angle(path.vertices[k], path.vertices[k - 1], path.vertices[k + 1]));
  }
  return path;
}

namespace {

// acosh(1 + e) without cancellation for small e.
double acosh1p(double e) { return std::log1p(e + std::sqrt(e * (e + 2.0))); }

// Distance from q to the segment {i s : 1 <= s <= top} of the imaginary axis.
double distance_to_axis_segment(const InteriorPoint<Precise>& q, const Precise& top) {
  const Precise r2 = q.x * q.x + q.y * q.y;
  if (r2 < 1) return acosh1p(to_double((q.x * q.x + (q.y - 1) * (q.y - 1)) / (2 * q.y)));
  if (r2 > top * top) return acosh1p(to_double((q.x * q.x + (q.y - top) * (q.y - top)) / (2 * q.y * top)));
  return std::asinh(to_double(abs(q.x) / q.y));
}

}  // namespace

DeviationReport quasigeodesic_gap(const PiecewisePath& path) {
  if (path.vertices.size() < 2) throw Error(ErrorCode::InvalidInput, "path needs at least two vertices");
  const std::size_t segments = path.segments();
  const int per_segment = static_cast<int>(std::ceil(path.segment_length / 0.05 - 1e-12));
  DeviationReport report;
  report.sample_spacing = path.segment_length / per_segment;

  std::vector<Precise> heights;
  for (int s = 0; s <= per_segment; ++s) heights.push_back(exp(Precise(path.segment_length) * s / per_segment));
  std::vector<InteriorPoint<Precise>> samples;
  samples.reserve(segments * static_cast<std::size_t>(per_segment) + 1);
  for (std::size_t k = 0; k < segments; ++k) {
    for (int s = (k == 0 ? 0 : 1); s <= per_segment; ++s) {
      samples.push_back(apply(path.frames[k], InteriorPoint<Precise>{Precise(0), heights[static_cast<std::size_t>(s)]}));
    }
  }

  const InteriorPoint<Precise>& start = path.vertices.front();
  for (std::size_t j = 1; j <= segments; ++j) {
    const Mobius<Precise> frame = segment_frame(start, path.vertices[j]);
    const Precise top = apply(frame, path.vertices[j]).y;
    const std::size_t count = j * static_cast<std::size_t>(per_segment) + 1;
    double worst = 0.0;
    for (std::size_t s = 0; s < count; ++s) worst = std::max(worst, distance_to_axis_segment(apply(frame, samples[s]), top));
    report.prefix_deviations.push_back(worst);
    report.endpoint_angles.push_back(to_double(ray_endpoint(start, path.vertices[j]).angle()));
  }
  report.max_deviation = *std::max_element(report.prefix_deviations.begin(), report.prefix_deviations.end());
  const std::size_t tail = std::min<std::size_t>(5, report.endpoint_angles.size());
  for (std::size_t p = report.endpoint_angles.size() - tail; p < report.endpoint_angles.size(); ++p) {
    for (std::size_t q = p + 1; q < report.endpoint_angles.size(); ++q) {
      report.endpoint_cauchy_gap =
          std::max(report.endpoint_cauchy_gap, angular_distance(report.endpoint_angles[p], report.endpoint_angles[q]));
    }
  }
  return report;
}

SymbolicReport symbolic_recurrence_report(const SpiralProgram& program) {
  if (program.loops() < 2) throw Error(ErrorCode::InvalidInput, "symbolic report needs at least two loops");
  SymbolicReport report;
  report.loops = program.loops();
  std::vector<int> loop_of_step{0};
  report.steps.push_back({0, 0});
  for (std::size_t r = 0; r < program.runs.size(); ++r) {
    const LatticePoint v = unit_vector(program.runs[r]);
    for (int k = 0; k < program.runs[r].length; ++k) {
      const LatticePoint& last = report.steps.back();
      report.steps.push_back({last[0] + v[0], last[1] + v[1]});
      loop_of_step.push_back(static_cast<int>(r / 2));
    }
  }
  auto norm = [](const LatticePoint& p) { return std::max(std::abs(p[0]), std::abs(p[1])); };

  const std::size_t n = report.steps.size();
  report.suffix_min_norm.assign(n, 0);
  int running = norm(report.steps.back());
  for (std::size_t k = n; k-- > 0;) {
    running = std::min(running, norm(report.steps[k]));
    report.suffix_min_norm[k] = running;
  }

  const auto loops = static_cast<std::size_t>(report.loops);
  report.loop_max_norm.assign(loops, 0);
  report.loop_start_suffix_min.assign(loops, 0);
  report.m_zero_by_loop.assign(loops, 0);
  report.n_zero_by_loop.assign(loops, 0);
  std::vector<bool> started(loops, false);
  for (std::size_t k = 1; k < n; ++k) {
    const auto loop = static_cast<std::size_t>(loop_of_step[k]);
    if (!started[loop]) {
      started[loop] = true;
      report.loop_start_suffix_min[loop] = report.suffix_min_norm[k - 1];
    }
    report.loop_max_norm[loop] = std::max(report.loop_max_norm[loop], norm(report.steps[k]));
    if (report.steps[k][1] == 0) ++report.m_zero_returns;
    if (report.steps[k][0] == 0) ++report.n_zero_returns;
    report.m_zero_by_loop[loop] = report.m_zero_returns;
    report.n_zero_by_loop[loop] = report.n_zero_returns;
  }

  bool monotone = std::is_sorted(report.suffix_min_norm.begin(), report.suffix_min_norm.end());
  bool growing = true;
  for (std::size_t k = 0; k < loops; ++k) growing = growing && report.loop_start_suffix_min[k] >= static_cast<int>((k + 1) / 2);
  report.escape_certified = monotone && growing;
  report.returns_certified = true;
  for (std::size_t k = 1; k < loops; ++k) {
    report.returns_certified = report.returns_certified && report.m_zero_by_loop[k] >= static_cast<int>(k) &&
                               report.n_zero_by_loop[k] >= static_cast<int>(k);
  }
  return report;
}

namespace {

const Character& commutator_character(const MarkedGroup& group) {
  const Character& ab = group.character("ab4");
  return ab;
}

bool in_commutator(const Character& ab, const std::vector<int>& sums) {
  const Eigen::Map<const Eigen::VectorXi> v(sums.data(), static_cast<Eigen::Index>(sums.size()));
  return (ab.images * v).isZero();
}

Geodesic<double> checked_axis(const MarkedGroup& group, const Word& gamma) {
  const GroupElement e = group.element(gamma);
  if (classify_isometry(e.matrix).kind != IsometryKind::loxodromic) {
    throw Error(ErrorCode::NotLoxodromic, "gamma must be loxodromic");
  }
  const Character& ab = commutator_character(group);
  if (e.character_images.at(ab.name).isZero()) {
    throw Error(ErrorCode::NotApplicable, "gamma lies in the commutator subgroup, which then contains its powers");
  }
  return axis_of(e.matrix);
}

}  // namespace

Prop31Invariance prop31_precise_invariance(const MarkedGroup& group, const Word& gamma, int depth) {
  const Geodesic<double> axis = checked_axis(group, gamma);
  const double x = axis.from().angle();
  const double y = axis.to().angle();
  const Character& ab = commutator_character(group);
  const Ball ball = enumerate_ball(group, depth);

  Prop31Invariance report;
  report.gamma = group.format_word(gamma);
  report.depth = depth;
  report.min_endpoint_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ball.size(); ++i) {
    if (!in_commutator(ab, ball.exponent_sums(i))) continue;
    ++report.elements_checked;
    const Mobius<double>& mu = ball.matrix(i);
    const double mx = apply(mu, axis.from()).angle();
    const double my = apply(mu, axis.to()).angle();
    for (double p : {mx, my}) {
      for (double q : {x, y}) report.min_endpoint_separation = std::min(report.min_endpoint_separation, angular_distance(p, q));
    }
    const CrossingKind kind = geodesics_cross_angles(mx, my, x, y);
    if (kind == CrossingKind::disjoint) continue;
    if (kind == CrossingKind::cross) ++report.crossings;
    else ++report.shared_endpoints;
    if (report.violations.size() < 64) {
      report.violations.push_back(std::string(to_string(kind)) + ": " + group.format_word(ball.word(i)));
    }
  }
  return report;
}

namespace {

// Translate of the axis: endpoints in projective form, oriented so that the
// "inside" is the side away from i, plus its shorter boundary arc for lookup.
struct Wall {
  double arc_start = 0.0;
  double arc_length = 0.0;
  double u1 = 0.0, v1 = 0.0, u2 = 0.0, v2 = 0.0;
  double orientation = 1.0;
  double span = 0.0;
};

double wall_form(const Wall& w, double x, double y) {
  return (w.v1 * x - w.u1) * (w.v2 * x - w.u2) + w.v1 * w.v2 * y * y;
}

Wall make_wall(const BoundaryPoint<double>& p, const BoundaryPoint<double>& q) {
  Wall w;
  const double a = p.angle();
  const double b = q.angle();
  w.arc_start = a;
  w.arc_length = wrap_angle(b - a);
  if (w.arc_length > pi<double>()) {
    w.arc_start = b;
    w.arc_length = 2.0 * pi<double>() - w.arc_length;
  }
  w.u1 = p.u();
  w.v1 = p.v();
  w.u2 = q.u();
  w.v2 = q.v();
  w.orientation = wall_form(w, 0.0, 1.0) < 0.0 ? -1.0 : 1.0;
  w.span = std::abs(w.u1 * w.v2 - w.u2 * w.v1);
  return w;
}

constexpr double kWideArc = 0.5;
constexpr double kArcMargin = 1e-9;
// Points closer than this hyperbolic distance to a wall are not assigned.
constexpr double kAmbiguous = 1e-9;

class WallIndex {
 public:
  explicit WallIndex(std::vector<Wall> walls) : walls_(std::move(walls)) {
    for (std::uint32_t k = 0; k < walls_.size(); ++k) {
      if (walls_[k].arc_length > kWideArc) wide_.push_back(k);
      else narrow_.push_back(k);
    }
    std::sort(narrow_.begin(), narrow_.end(),
              [&](std::uint32_t p, std::uint32_t q) { return walls_[p].arc_start < walls_[q].arc_start; });
  }

  std::size_t size() const { return walls_.size(); }

  // Sorted indices of walls separating z from i; false if z sits on a wall.
  bool inside(const InteriorPoint<double>& z, std::vector<std::uint32_t>& out) const {
    out.clear();
    bool clean = true;
    auto test = [&](std::uint32_t k) {
      const Wall& w = walls_[k];
      const double f = w.orientation * wall_form(w, z.x, z.y);
      // sinh of the distance from z to the wall.
      if (std::abs(f) < kAmbiguous * z.y * w.span) clean = false;
      if (f < 0.0) out.push_back(k);
    };
    for (std::uint32_t k : wide_) test(k);
    const auto [cx, cy] = to_disc(z);
    const double phi = wrap_angle(std::atan2(cy, cx));
    const double two_pi = 2.0 * pi<double>();
    auto scan = [&](double lo, double hi) {
      auto it = std::lower_bound(narrow_.begin(), narrow_.end(), lo,
                                 [&](std::uint32_t k, double v) { return walls_[k].arc_start < v; });
      for (; it != narrow_.end() && walls_[*it].arc_start <= hi; ++it) test(*it);
    };
    const double lo = phi - kWideArc - kArcMargin;
    const double hi = phi + kArcMargin;
    if (lo < 0.0) {
      scan(0.0, hi);
      scan(lo + two_pi, two_pi);
    } else if (hi >= two_pi) {
      scan(lo, two_pi);
      scan(0.0, hi - two_pi);
    } else {
      scan(lo, hi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return clean;
  }

 private:
  std::vector<Wall> walls_;
  std::vector<std::uint32_t> wide_;
  std::vector<std::uint32_t> narrow_;
};


}  // namespace

Prop31Sides prop31_side_split(const MarkedGroup& group, const Word& gamma, int depth) {
  const Geodesic<double> axis = checked_axis(group, gamma);
  const Character& ab = commutator_character(group);
  const Ball ball = enumerate_ball(group, depth);

  Prop31Sides report;
  report.gamma = group.format_word(gamma);
  report.depth = depth;
  report.x = axis.from().angle();
  report.y = axis.to().angle();

  std::vector<std::uint32_t> members;
  std::vector<Wall> walls{make_wall(axis.from(), axis.to())};
  for (std::size_t i = 1; i < ball.size(); ++i) {
    if (!in_commutator(ab, ball.exponent_sums(i))) continue;
    members.push_back(static_cast<std::uint32_t>(i));
    const Mobius<double>& mu = ball.matrix(i);
    walls.push_back(make_wall(apply(mu, axis.from()), apply(mu, axis.to())));
  }
  const WallIndex index(std::move(walls));
  report.translates = index.size();

  // Probes at distance 0.25 on either side of the axis, over the foot of i.
  const Mobius<double> frame = axis_frame(axis);
  const Mobius<double> unframe = frame.inverse();
  const InteriorPoint<double> w = apply(frame, InteriorPoint<double>::i());
  const double foot = std::hypot(w.x, w.y);
  const double offset = 0.25;
  std::array<InteriorPoint<double>, 2> probes{};
  std::array<std::vector<std::uint32_t>, 2> probe_walls;
  for (int k = 0; k < 2; ++k) {
    const double sx = (k == 0 ? 1.0 : -1.0) * foot * std::tanh(offset);
    probes[static_cast<std::size_t>(k)] = apply(unframe, InteriorPoint<double>{sx, foot / std::cosh(offset)});
    if (!index.inside(probes[static_cast<std::size_t>(k)], probe_walls[static_cast<std::size_t>(k)])) {
      throw Error(ErrorCode::SideAmbiguous, "probe point lies on a translate of the axis");
    }
  }

  // Side 0 is the arc with positive real part in the frame.
  auto side_of = [&](const BoundaryPoint<double>& b) {
    const BoundaryPoint<double> f = apply(frame, b);
    return f.u() * f.v() > 0.0 ? 0 : 1;
  };

  std::array<std::vector<double>, 2> angles;
  std::array<std::vector<std::uint8_t>, 2> lengths;
  std::vector<std::uint32_t> found;
  for (std::uint32_t i : members) {
    const Mobius<double>& mu = ball.matrix(i);
    const Geodesic<double> mu_axis = axis_of(mu);
    const CrossingKind kind = geodesics_cross_angles(mu_axis.from().angle(), mu_axis.to().angle(), report.x, report.y);
    if (kind != CrossingKind::disjoint) continue;
    ++report.candidates;
    int assigned = -1;
    bool ambiguous = false;
    for (int k = 0; k < 2; ++k) {
      if (!index.inside(apply(mu, probes[static_cast<std::size_t>(k)]), found)) {
        ambiguous = true;
        break;
      }
      if (found == probe_walls[static_cast<std::size_t>(k)]) {
        if (assigned >= 0) {
          ++report.both_sides;
          assigned = 2;
        } else {
          assigned = k;
        }
      }
    }
    if (ambiguous) {
      ++report.ambiguous;
      continue;
    }
    if (assigned < 0) {
      ++report.unassigned;
      continue;
    }
    if (assigned == 2) continue;
    const auto side = static_cast<std::size_t>(assigned);
    report.side_words[side].push_back(ball.word(i));
    for (const BoundaryPoint<double>* p : {&mu_axis.from(), &mu_axis.to()}) {
      angles[side].push_back(p->angle());
      lengths[side].push_back(static_cast<std::uint8_t>(ball.length(i)));
      const bool at_end = angular_distance(p->angle(), report.x) < kBoundaryTolerance ||
                          angular_distance(p->angle(), report.y) < kBoundaryTolerance;
      if (!at_end && side_of(*p) != assigned) ++report.misplaced[side];
    }
  }

  for (std::size_t k = 0; k < 2; ++k) {
    report.clouds[k] = make_cloud(std::move(angles[k]), std::move(lengths[k]), group.id(),
                                  "side-" + std::to_string(k) + "(" + report.gamma + ")", depth);
    for (std::size_t e = 0; e < 2; ++e) {
      const double target = e == 0 ? report.x : report.y;
      double best = std::numeric_limits<double>::infinity();
      for (double a : report.clouds[k].angles) best = std::min(best, angular_distance(a, target));
      report.accumulation[k][e] = best;
    }
  }
  report.common_elements = find_common_elements(group, WordList{report.side_words[0]}, WordList{report.side_words[1]},
                                                depth)
                               .size();
  return report;
}

namespace {

nlohmann::ordered_json program_payload(const SpiralProgram& program) {
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const SpiralRun& run : program.runs) {
    runs.push_back({{"direction", run.direction == Direction::A ? "A" : "B"}, {"sign", run.sign}, {"length", run.length}});
  }
  nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
  for (const LatticePoint& v : program.vertices) vertices.push_back({v[0], v[1]});
  nlohmann::ordered_json doc;
  doc["loops"] = program.loops();
  doc["runs"] = std::move(runs);
  doc["vertices"] = std::move(vertices);
  doc["turns"] = program.turns;
  return doc;
}

std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string program_to_json(const SpiralProgram& program) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "spiral_program";
  doc.update(program_payload(program));
  return dump(doc);
}

std::string grid_report_to_json(const SpiralProgram& program, const PiecewisePath& path,
                                const DeviationReport& deviation, const SymbolicReport& symbolic) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "grid_example";
  doc["program"] = program_payload(program);

  nlohmann::ordered_json p;
  p["segment_length"] = path.segment_length;
  p["segments"] = path.segments();
  p["total_length"] = path.total_length();
  p["corner_angles"] = path.corner_angles;
  nlohmann::ordered_json disc = nlohmann::ordered_json::array();
  for (const auto& v : path.vertices) {
    const auto [cx, cy] = to_disc(v);
    disc.push_back({to_double(cx), to_double(cy)});
  }
  p["disc_vertices"] = std::move(disc);
  doc["path"] = std::move(p);

  nlohmann::ordered_json d;
  d["max_deviation"] = deviation.max_deviation;
  d["sample_spacing"] = deviation.sample_spacing;
  d["prefix_deviations"] = deviation.prefix_deviations;
  d["endpoint_angles"] = deviation.endpoint_angles;
  d["endpoint_cauchy_gap"] = deviation.endpoint_cauchy_gap;
  doc["deviation"] = std::move(d);

  nlohmann::ordered_json s;
  s["loops"] = symbolic.loops;
  s["steps"] = symbolic.steps.size();
  s["m_zero_returns"] = symbolic.m_zero_returns;
  s["n_zero_returns"] = symbolic.n_zero_returns;
  s["m_zero_by_loop"] = symbolic.m_zero_by_loop;
  s["n_zero_by_loop"] = symbolic.n_zero_by_loop;
  s["loop_max_norm"] = symbolic.loop_max_norm;
  s["loop_start_suffix_min"] = symbolic.loop_start_suffix_min;
  s["escape_certified"] = symbolic.escape_certified;
  s["returns_certified"] = symbolic.returns_certified;
  doc["symbolic"] = std::move(s);
  return dump(doc);
}

std::string path_svg(const PiecewisePath& path, const DeviationReport& deviation) {
  SvgCanvas canvas;
  canvas.boundary_circle();
  if (path.vertices.size() < 2) return canvas.str();

  // Path itself, sampled densely so segments show as arcs.
  const int per_segment = 24;
  std::vector<std::pair<double, double>> line;
  for (std::size_t k = 0; k < path.segments(); ++k) {
    for (int s = 0; s <= per_segment; ++s) {
      const Precise h = exp(Precise(path.segment_length) * s / per_segment);
      const auto [cx, cy] = to_disc(apply(path.frames[k], InteriorPoint<Precise>{Precise(0), h}));
      line.emplace_back(to_double(cx), to_double(cy));
    }
  }
  canvas.polyline(line, "#1f4e9c", 1.5);

  // Chord of the full path and the envelope at the maximal deviation.
  const Mobius<Precise> frame = segment_frame(path.vertices.front(), path.vertices.back());
  const Mobius<Precise> unframe = frame.inverse();
  const Precise top = apply(frame, path.vertices.back()).y;
  const Precise c = deviation.max_deviation;
  const int samples = 400;
  std::array<std::vector<std::pair<double, double>>, 3> curves;
  for (int s = 0; s <= samples; ++s) {
    const Precise r = exp(log(top) * s / samples);
    for (int side = 0; side < 3; ++side) {
      const Precise x = side == 0 ? Precise(0) : (side == 1 ? 1 : -1) * r * tanh(c);
      const Precise y = side == 0 ? r : r / cosh(c);
      const auto [cx, cy] = to_disc(apply(unframe, InteriorPoint<Precise>{x, y}));
      curves[static_cast<std::size_t>(side)].emplace_back(to_double(cx), to_double(cy));
    }
  }
  canvas.polyline(curves[0], "#b22222", 1.0);
  canvas.polyline(curves[1], "#999999", 0.75);
  canvas.polyline(curves[2], "#999999", 0.75);
  return canvas.str();
}

std::string prop31_to_json(const MarkedGroup& group, const Prop31Invariance& invariance, const Prop31Sides& sides) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "prop31";
  doc["group"] = group.id();
  doc["gamma"] = invariance.gamma;
  doc["depth"] = invariance.depth;

  nlohmann::ordered_json inv;
  inv["elements_checked"] = invariance.elements_checked;
  inv["crossings"] = invariance.crossings;
  inv["shared_endpoints"] = invariance.shared_endpoints;
  inv["min_endpoint_separation"] = invariance.min_endpoint_separation;
  inv["violations"] = invariance.violations;
  doc["precise_invariance"] = std::move(inv);

  nlohmann::ordered_json split;
  split["fixed_points"] = {sides.x, sides.y};
  split["translates"] = sides.translates;
  split["candidates"] = sides.candidates;
  split["unassigned"] = sides.unassigned;
  split["ambiguous"] = sides.ambiguous;
  split["both_sides"] = sides.both_sides;
  split["arc_separated"] = sides.arc_separated();
  split["common_elements"] = sides.common_elements;
  nlohmann::ordered_json per_side = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < 2; ++k) {
    nlohmann::ordered_json side;
    side["elements"] = sides.side_words[k].size();
    side["misplaced"] = sides.misplaced[k];
    side["distance_to_x"] = sides.accumulation[k][0];
    side["distance_to_y"] = sides.accumulation[k][1];
    std::vector<std::string> words;
    for (const Word& w : sides.side_words[k]) words.push_back(group.format_word(w));
    side["words"] = std::move(words);
    side["cloud"] = cloud_payload(sides.clouds[k]);
    per_side.push_back(std::move(side));
  }
  split["sides"] = std::move(per_side);
  doc["side_split"] = std::move(split);
  return dump(doc);
}

std::string prop31_svg(const Prop31Sides& sides) {
  SvgCanvas canvas;
  canvas.boundary_circle();
  const std::array<const char*, 2> colours{"#c0392b", "#2471a3"};
  for (std::size_t k = 0; k < 2; ++k) {
    for (double a : sides.clouds[k].angles) canvas.dot(std::cos(a), std::sin(a), 1.5, colours[k]);
  }
  // The axis, sampled from the frame where it is the imaginary axis.
  const Geodesic<double> axis(BoundaryPoint<double>::from_angle(sides.x), BoundaryPoint<double>::from_angle(sides.y));
  const Mobius<double> unframe = axis_frame(axis).inverse();
  std::vector<std::pair<double, double>> arc;
  for (int s = -200; s <= 200; ++s) arc.push_back(to_disc(apply(unframe, InteriorPoint<double>{0.0, std::exp(s / 20.0)})));
  canvas.polyline(arc, "#222222", 1.0);
  canvas.dot(std::cos(sides.x), std::sin(sides.x), 4.0, "#000000");
  canvas.dot(std::cos(sides.y), std::sin(sides.y), 4.0, "#000000");
  return canvas.str();
}

}  // namespace limitlab
