#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "limitlab/marked_group.hpp"

namespace limitlab {

inline constexpr double kDefaultStep = 0.25;
inline constexpr double kDefaultHorizon = 100.0;
inline constexpr double kDefaultBound = 2.5;

/// Result of greedy reduction: `element` maps the input point to `point`.
template <typename Scalar>
struct Reduction {
  InteriorPoint<Scalar> point;
  Word word;
  Mobius<Scalar> matrix;
  Scalar distance;
};

/// Steepest descent toward i over the generators and their inverses, stopping
/// when no letter shortens the distance by more than 1e-12. `start` seeds the
/// descent with a known element (identity by default).
template <typename Scalar>
Reduction<Scalar> reduce_point(const MarkedGroup& group, const InteriorPoint<Scalar>& p,
                               const Word& start = Word());

/// Double-precision reduction with all characters evaluated on the element.
struct DomainReduction {
  InteriorPoint<double> point;
  GroupElement element;
};
DomainReduction reduce_to_domain(const MarkedGroup& group, const InteriorPoint<double>& p);

struct RaySample {
  double t = 0.0;
  InteriorPoint<double> reduced;
  Word word;
  std::map<std::string, Eigen::VectorXi> coset;
  double reduced_distance = 0.0;
  double raw_distance = 0.0;
};

struct RayTrace {
  std::string group_id;
  BoundaryPoint<Precise> target;
  InteriorPoint<double> basepoint;
  double step = kDefaultStep;
  double horizon = kDefaultHorizon;
  std::vector<RaySample> samples;
};

/// Samples the ray from z0 toward `target` every `step` up to `horizon` and
/// reduces each sample, carrying the previous element forward. Points are
/// generated in extended precision since the geodesic flow is chaotic.
RayTrace trace_ray(const MarkedGroup& group, const BoundaryPoint<Precise>& target,
                   const InteriorPoint<double>& z0 = InteriorPoint<double>::i(), double step = kDefaultStep,
                   double horizon = kDefaultHorizon);

/// Attracting fixed point of a word, computed in extended precision.
BoundaryPoint<Precise> attracting_fixed_point(const MarkedGroup& group, const Word& word);

enum class RecurrenceTag { bounded, recurrent, transient, inconclusive };
std::string_view to_string(RecurrenceTag tag);

struct RecurrenceClass {
  RecurrenceTag tag = RecurrenceTag::inconclusive;
  double horizon = 0.0;
  double bound = kDefaultBound;
  int return_count = 0;
  int excursion_count = 0;
  double max_proxy = 0.0;
  double final_quarter_min = 0.0;
  double previous_quarter_min = 0.0;
  bool transient_pattern = false;
  bool recurrent_pattern = false;
  std::string spec;
};

/// Quotient-distance proxy per sample: reduced distance plus the sublattice
/// residual of the coset coordinate, weighted by the shortest translation
/// length of a generator the character sees. Whole-group and character-kernel
/// specs only.
std::vector<double> quotient_proxy(const MarkedGroup& group, const RayTrace& trace, const SubgroupSpec& spec);

/// bounded: every proxy <= B. transient: the final quarter stays above 2B and
/// its minimum is no lower than the previous quarter's. recurrent: at least
/// three excursions above 2B each followed by a return below B. Anything else,
/// or both of the last two, is inconclusive.
RecurrenceClass classify_recurrence(const MarkedGroup& group, const RayTrace& trace, const SubgroupSpec& spec,
                                    double bound = kDefaultBound);

/// Traces the axis of `e` from its point nearest i, reducing by powers of e
/// alone. The bound is the translation length of e.
RecurrenceClass certify_uniform_conical_axis(const MarkedGroup& group, const Word& e,
                                             double horizon = kDefaultHorizon, double step = kDefaultStep);

struct MembershipEvidence {
  std::string spec;
  std::string method;
  bool member = false;
};

struct IntersectionWitness {
  GroupElement element;
  std::vector<MembershipEvidence> evidence;
};

MembershipEvidence membership_evidence(const MarkedGroup& group, const SubgroupSpec& spec, const GroupElement& e);

/// Nonidentity elements of the depth-ball in both subgroups, shortest first.
std::vector<IntersectionWitness> find_common_elements(const MarkedGroup& group, const SubgroupSpec& a,
                                                      const SubgroupSpec& b, int depth);

/// theta^-1 (phi theta phi^-1) when nontrivial; otherwise the common power
/// phi^q = theta^(+-p) of the shared primitive element.
IntersectionWitness normal_intersection_witness(const MarkedGroup& group, const Word& phi, const Word& theta,
                                                const SubgroupSpec& spec_phi, const SubgroupSpec& spec_theta);

/// Smallest m in [1, max_m] with gamma^m in the subgroup.
std::optional<int> power_in_subgroup(const MarkedGroup& group, const Word& gamma, const SubgroupSpec& spec, int max_m);

std::string trace_to_jsonl(const MarkedGroup& group, const RayTrace& trace);
std::string trace_to_csv(const MarkedGroup& group, const RayTrace& trace);
std::string recurrence_to_json(const RecurrenceClass& verdict);

}  // namespace limitlab
