#pragma once

#include <array>
#include <string>
#include <vector>

#include "limitlab/limit_analysis.hpp"
#include "limitlab/marked_group.hpp"

namespace limitlab {

// Grid spiral

enum class Direction { A, B };

struct SpiralRun {
  Direction direction = Direction::B;
  int sign = 1;
  int length = 1;
};

using LatticePoint = std::array<int, 2>;

struct SpiralProgram {
  std::vector<SpiralRun> runs;
  /// Prefix sums of the runs, starting at the origin.
  std::vector<LatticePoint> vertices;
  /// +1 for a left turn, -1 for a right turn, one entry per run after the first.
  std::vector<int> turns;

  int loops() const { return static_cast<int>(runs.size() / 2); }
  int unit_steps() const;
};

/// Runs 1..2*loops: run i has length ceil(i/2), direction B for odd i and A
/// for even i, and sign + when i mod 4 is 0 or 1.
SpiralProgram spiral_program(int loops);
SpiralProgram program_from_runs(std::vector<SpiralRun> runs);

LatticePoint unit_vector(const SpiralRun& run);

/// The lattice path as a word: A steps are a1^(+-1), B steps a2^(+-1).
Word spiral_word(const MarkedGroup& group, const SpiralProgram& program);

/// Endpoint of the ray from i through w(i), w the spiral word.
BoundaryPoint<Precise> spiral_target(const MarkedGroup& group, const SpiralProgram& program);

/// Piecewise geodesic in H^2, one segment of length L per unit lattice step.
/// frames[k] sends i to vertices[k] with the segment direction pointing up.
struct PiecewisePath {
  double segment_length = 0.0;
  std::vector<Mobius<Precise>> frames;
  std::vector<InteriorPoint<Precise>> vertices;
  /// Angle at every vertex where the direction changes.
  std::vector<double> corner_angles;

  std::size_t segments() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  double total_length() const;
};

/// `max_segments` truncates the path (0 keeps every unit step).
PiecewisePath build_spiral_path(const SpiralProgram& program, double L, std::size_t max_segments = 0);

struct DeviationReport {
  double max_deviation = 0.0;
  /// Entry j-1 belongs to the prefix with j segments.
  std::vector<double> prefix_deviations;
  std::vector<double> endpoint_angles;
  double endpoint_cauchy_gap = 0.0;
  double sample_spacing = 0.0;
};

DeviationReport quasigeodesic_gap(const PiecewisePath& path);

struct SymbolicReport {
  int loops = 0;
  std::vector<LatticePoint> steps;
  /// Entry k: min of the sup norm over steps k, k+1, ...
  std::vector<int> suffix_min_norm;
  /// Per loop (two runs each), indexed from 0 for loop 1.
  std::vector<int> loop_max_norm;
  std::vector<int> loop_start_suffix_min;
  std::vector<int> m_zero_by_loop;
  std::vector<int> n_zero_by_loop;
  int m_zero_returns = 0;
  int n_zero_returns = 0;
  bool escape_certified = false;
  bool returns_certified = false;
};

SymbolicReport symbolic_recurrence_report(const SpiralProgram& program);

// Commutator-subgroup construction

struct Prop31Invariance {
  std::string gamma;
  int depth = 0;
  std::size_t elements_checked = 0;
  std::size_t crossings = 0;
  std::size_t shared_endpoints = 0;
  double min_endpoint_separation = 0.0;
  std::vector<std::string> violations;

  bool ok() const { return crossings == 0 && shared_endpoints == 0; }
};

/// Checks every nonidentity element of the ab4-kernel ball against axis(gamma).
/// Throws NotApplicable when gamma itself lies in the kernel.
Prop31Invariance prop31_precise_invariance(const MarkedGroup& group, const Word& gamma, int depth);

struct Prop31Sides {
  std::string gamma;
  int depth = 0;
  double x = 0.0;
  double y = 0.0;
  std::size_t translates = 0;
  std::size_t candidates = 0;
  std::size_t unassigned = 0;
  std::size_t ambiguous = 0;
  std::size_t both_sides = 0;
  std::array<std::vector<Word>, 2> side_words;
  std::array<LimitCloud, 2> clouds;
  /// Points of side k's cloud lying in the open arc of the other side.
  std::array<std::size_t, 2> misplaced{};
  /// accumulation[k][0]: distance from cloud k to x, [k][1] to y.
  std::array<std::array<double, 2>, 2> accumulation{};
  std::size_t common_elements = 0;

  bool arc_separated() const { return misplaced[0] == 0 && misplaced[1] == 0; }
};

/// Splits kernel elements whose axes miss axis(gamma) by the component of
/// H^2 minus the translates of the axis that they preserve, using probe points
/// at distance 0.25 on either side.
Prop31Sides prop31_side_split(const MarkedGroup& group, const Word& gamma, int depth);

std::string program_to_json(const SpiralProgram& program);
std::string grid_report_to_json(const SpiralProgram& program, const PiecewisePath& path,
                                const DeviationReport& deviation, const SymbolicReport& symbolic);
std::string path_svg(const PiecewisePath& path, const DeviationReport& deviation);
std::string prop31_to_json(const MarkedGroup& group, const Prop31Invariance& invariance, const Prop31Sides& sides);
std::string prop31_svg(const Prop31Sides& sides);

}  // namespace limitlab
