#include "limitlab/susskind_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "limitlab/artifacts.hpp"
#include "limitlab/ball.hpp"
#include "limitlab/presentation_io.hpp"

namespace limitlab {

namespace {

template <typename Scalar>
const Mobius<Scalar>& letter_matrix_as(const MarkedGroup& group, const Letter& letter) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return group.letter_matrix(letter);
  } else {
    return group.letter_matrix_precise(letter);
  }
}

template <typename Scalar>
Mobius<Scalar> evaluate_as(const MarkedGroup& group, const Word& word) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return group.evaluate(word);
  } else {
    return group.evaluate_precise(word);
  }
}

template <typename Scalar>
Scalar cosh_from_i(const InteriorPoint<Scalar>& p) {
  return (p.x * p.x + p.y * p.y + Scalar(1)) / (Scalar(2) * p.y);
}

template <typename Scalar>
Reduction<Scalar> reduce_from(const MarkedGroup& group, const InteriorPoint<Scalar>& p, Word word,
                              Mobius<Scalar> matrix) {
  using std::sqrt;
  InteriorPoint<Scalar> q = apply(matrix, p);
  Scalar c = cosh_from_i(q);
  const double d0 = std::acosh(std::max(1.0, to_double(c)));
  const long limit = 10L * static_cast<long>(std::ceil(d0 / group.shortest_translation_length())) + 64;
  const int letters = 2 * group.rank();
  for (long steps = 0;; ++steps) {
    int best = -1;
    Scalar best_c = c;
    InteriorPoint<Scalar> best_q = q;
    for (int r = 0; r < letters; ++r) {
      const InteriorPoint<Scalar> candidate = apply(letter_matrix_as<Scalar>(group, {r / 2, r % 2 == 0 ? 1 : -1}), q);
      const Scalar cc = cosh_from_i(candidate);
      if (cc < best_c) {
        best = r;
        best_c = cc;
        best_q = candidate;
      }
    }
    // A drop in distance of delta changes cosh by about sinh(d) * delta.
    if (best < 0 || !(c - best_c > Scalar(1e-12) * sqrt(c * c - Scalar(1)))) break;
    if (steps >= limit) {
      throw Error(ErrorCode::ReductionStalled, "greedy reduction exceeded " + std::to_string(limit) + " steps");
    }
    const Letter letter{best / 2, best % 2 == 0 ? 1 : -1};
    matrix = letter_matrix_as<Scalar>(group, letter) * matrix;
    word = Word::generator(letter.generator, letter.exponent) * word;
    q = best_q;
    c = best_c;
  }
  using std::max;
  return {q, std::move(word), std::move(matrix), acosh_of<Scalar>(max(c, Scalar(1)))};
}

double reduced_distance_of(const InteriorPoint<Precise>& q) {
  // Reduced points sit near i, where double precision is ample.
  return distance_from_i(q.cast<double>());
}

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

template <typename Scalar>
Reduction<Scalar> reduce_point(const MarkedGroup& group, const InteriorPoint<Scalar>& p, const Word& start) {
  return reduce_from<Scalar>(group, p, start, evaluate_as<Scalar>(group, start));
}

template Reduction<double> reduce_point<double>(const MarkedGroup&, const InteriorPoint<double>&, const Word&);
template Reduction<Precise> reduce_point<Precise>(const MarkedGroup&, const InteriorPoint<Precise>&, const Word&);

DomainReduction reduce_to_domain(const MarkedGroup& group, const InteriorPoint<double>& p) {
  const Reduction<double> r = reduce_point<double>(group, p);
  GroupElement e = group.element(r.word);
  e.matrix = r.matrix;
  return {r.point, std::move(e)};
}

BoundaryPoint<Precise> attracting_fixed_point(const MarkedGroup& group, const Word& word) {
  return axis_of(group.evaluate_precise(word)).to();
}

RayTrace trace_ray(const MarkedGroup& group, const BoundaryPoint<Precise>& target, const InteriorPoint<double>& z0,
                   double step, double horizon) {
  if (!(step >= 0.05 && step <= 1.0)) throw Error(ErrorCode::InvalidInput, "step must lie in [0.05, 1]");
  if (!(horizon >= 0.0 && horizon <= 200.0)) throw Error(ErrorCode::InvalidInput, "horizon must lie in [0, 200]");
  InteriorPoint<double>::checked(z0.x, z0.y);

  RayTrace trace;
  trace.group_id = group.id();
  trace.target = target;
  trace.basepoint = z0;
  trace.step = step;
  trace.horizon = horizon;

  const InteriorPoint<Precise> start = z0.cast<Precise>();
  const auto count = static_cast<std::size_t>(std::floor(horizon / step + 1e-9)) + 1;
  Word word;
  Mobius<Precise> matrix;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * step;
    const InteriorPoint<Precise> raw = k == 0 ? start : point_along_ray(start, target, Precise(t));
    Reduction<Precise> r = reduce_from<Precise>(group, raw, word, matrix);
    RaySample sample;
    sample.t = t;
    sample.reduced = r.point.cast<double>();
    sample.word = r.word;
    for (const Character& c : group.characters()) sample.coset[c.name] = character_image(group, c.name, r.word);
    sample.reduced_distance = reduced_distance_of(r.point);
    sample.raw_distance = to_double(distance_from_i(raw));
    trace.samples.push_back(std::move(sample));
    word = std::move(r.word);
    matrix = std::move(r.matrix);
  }
  return trace;
}

std::string_view to_string(RecurrenceTag tag) {
  switch (tag) {
    case RecurrenceTag::bounded: return "bounded";
    case RecurrenceTag::recurrent: return "recurrent";
    case RecurrenceTag::transient: return "transient";
    case RecurrenceTag::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<double> quotient_proxy(const MarkedGroup& group, const RayTrace& trace, const SubgroupSpec& spec) {
  validate_spec(group, spec);
  std::vector<double> proxy;
  proxy.reserve(trace.samples.size());
  if (std::holds_alternative<WholeGroup>(spec)) {
    for (const RaySample& s : trace.samples) proxy.push_back(s.reduced_distance);
    return proxy;
  }
  const auto* kernel = std::get_if<CharacterKernel>(&spec);
  if (!kernel) throw Error(ErrorCode::InvalidInput, "recurrence needs a whole-group or character-kernel spec");
  const Character& character = group.character(kernel->character);
  double weight = std::numeric_limits<double>::infinity();
  for (int g = 0; g < group.rank(); ++g) {
    if (!character.images.col(g).isZero()) {
      weight = std::min(weight, classify_isometry(group.generators()[static_cast<std::size_t>(g)].matrix).translation_length);
    }
  }
  if (!std::isfinite(weight)) weight = 0.0;
  for (const RaySample& s : trace.samples) {
    const auto it = s.coset.find(kernel->character);
    const Eigen::VectorXi image = it != s.coset.end() ? it->second : character_image(group, kernel->character, s.word);
    proxy.push_back(s.reduced_distance + weight * fit_sublattice(kernel->basis, image).residual_norm);
  }
  return proxy;
}

namespace {

RecurrenceClass classify_proxy(const std::vector<double>& proxy, double bound, double horizon) {
  RecurrenceClass out;
  out.bound = bound;
  out.horizon = horizon;
  out.max_proxy = *std::max_element(proxy.begin(), proxy.end());

  bool high = false;
  for (double v : proxy) {
    if (!high && v > 2.0 * bound) {
      high = true;
      ++out.excursion_count;
    } else if (high && v < bound) {
      high = false;
      ++out.return_count;
    }
  }
  const std::size_t n = proxy.size();
  const std::size_t quarter = (n + 3) / 4;
  const auto final_begin = proxy.end() - static_cast<std::ptrdiff_t>(quarter);
  const auto previous_begin = final_begin - static_cast<std::ptrdiff_t>(std::min(quarter, n - quarter));
  out.final_quarter_min = *std::min_element(final_begin, proxy.end());
  out.previous_quarter_min =
      previous_begin < final_begin ? *std::min_element(previous_begin, final_begin) : out.final_quarter_min;
  out.transient_pattern =
      out.final_quarter_min > 2.0 * bound && out.final_quarter_min >= out.previous_quarter_min;
  out.recurrent_pattern = out.return_count >= 3;

  if (out.max_proxy <= bound) {
    out.tag = RecurrenceTag::bounded;
  } else if (out.transient_pattern != out.recurrent_pattern) {
    out.tag = out.transient_pattern ? RecurrenceTag::transient : RecurrenceTag::recurrent;
  } else {
    out.tag = RecurrenceTag::inconclusive;
  }
  return out;
}

}  // namespace

RecurrenceClass classify_recurrence(const MarkedGroup& group, const RayTrace& trace, const SubgroupSpec& spec,
                                    double bound) {
  if (trace.samples.size() < 100) throw Error(ErrorCode::PreconditionFailed, "classification needs >= 100 samples");
  if (!(bound > 0.0)) throw Error(ErrorCode::InvalidInput, "bound must be positive");
  RecurrenceClass out = classify_proxy(quotient_proxy(group, trace, spec), bound, trace.horizon);
  out.spec = describe(group, spec);
  return out;
}

RecurrenceClass certify_uniform_conical_axis(const MarkedGroup& group, const Word& e, double horizon, double step) {
  const Mobius<Precise> m = group.evaluate_precise(e);
  const IsometryClass cls = classify_isometry(group.evaluate(e));
  if (cls.kind != IsometryKind::loxodromic) throw Error(ErrorCode::NotLoxodromic, "element is not loxodromic");
  const Geodesic<Precise> axis = axis_of(m);

  const Mobius<Precise> frame = axis_frame(axis);
  const Mobius<Precise> unframe = frame.inverse();

  const InteriorPoint<Precise> w = apply(frame, InteriorPoint<Precise>::i());
  const Precise foot = sqrt(w.x * w.x + w.y * w.y);
  const InteriorPoint<Precise> z0 = apply(unframe, InteriorPoint<Precise>{Precise(0), foot});

  const double ell = cls.translation_length;
  const auto count = static_cast<std::size_t>(std::floor(horizon / step + 1e-9)) + 1;
  std::vector<double> proxy;
  proxy.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * step;
    const InteriorPoint<Precise> p = apply(unframe, InteriorPoint<Precise>{Precise(0), foot * exp(Precise(t))});
    const int base = static_cast<int>(std::lround(t / ell));
    double best = std::numeric_limits<double>::infinity();
    for (int j = std::max(0, base - 1); j <= base + 1; ++j) {
      best = std::min(best, to_double(hyperbolic_distance(apply(power(m, -j), p), z0)));
    }
    proxy.push_back(best);
  }
  RecurrenceClass out = classify_proxy(proxy, ell, horizon);
  out.spec = "cyclic(" + group.format_word(e) + ")";
  return out;
}

MembershipEvidence membership_evidence(const MarkedGroup& group, const SubgroupSpec& spec, const GroupElement& e) {
  MembershipEvidence ev;
  ev.spec = describe(group, spec);
  ev.method = std::visit(Overloaded{
                             [](const WholeGroup&) { return std::string("whole-group"); },
                             [](const CharacterKernel&) { return std::string("character-image-in-sublattice"); },
                             [](const CyclicSubgroup&) { return std::string("matrix-matches-power"); },
                             [](const WordList&) { return std::string("matrix-matches-listed-word"); },
                         },
                         spec);
  ev.member = is_member(group, spec, e);
  return ev;
}

namespace {

// Two explicit finite sets: match matrices directly instead of walking the ball.
std::vector<IntersectionWitness> common_listed_elements(const MarkedGroup& group, const WordList& a,
                                                        const WordList& b, int depth, const SubgroupSpec& spec_a,
                                                        const SubgroupSpec& spec_b) {
  struct Entry {
    Mobius<double> matrix;
    const Word* word;
  };
  auto collect = [&](const WordList& list) {
    std::vector<Entry> out;
    for (const Word& w : list.words) {
      if (w.length() == 0 || w.length() > static_cast<std::size_t>(depth)) continue;
      const Mobius<double> m = group.evaluate(w);
      if (matrix_distance(m, Mobius<double>::identity()) <= kDuplicateTolerance) continue;
      out.push_back({m, &w});
    }
    return out;
  };
  const std::vector<Entry> left = collect(a);
  std::vector<Entry> right = collect(b);
  // Sort by |a| so that both sign representatives fall in one window.
  std::sort(right.begin(), right.end(),
            [](const Entry& p, const Entry& q) { return std::abs(p.matrix.a()) < std::abs(q.matrix.a()); });
  std::vector<Word> found;
  for (const Entry& e : left) {
    const double key = std::abs(e.matrix.a());
    auto it = std::lower_bound(right.begin(), right.end(), key - kDuplicateTolerance,
                               [](const Entry& p, double v) { return std::abs(p.matrix.a()) < v; });
    for (; it != right.end() && std::abs(it->matrix.a()) <= key + kDuplicateTolerance; ++it) {
      if (matrix_distance(e.matrix, it->matrix) <= kDuplicateTolerance) {
        found.push_back(std::min(*e.word, *it->word));
        break;
      }
    }
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  std::vector<IntersectionWitness> out;
  for (const Word& w : found) {
    const GroupElement e = group.element(w);
    out.push_back({e, {membership_evidence(group, spec_a, e), membership_evidence(group, spec_b, e)}});
  }
  return out;
}

}  // namespace

std::vector<IntersectionWitness> find_common_elements(const MarkedGroup& group, const SubgroupSpec& a,
                                                      const SubgroupSpec& b, int depth) {
  validate_spec(group, a);
  validate_spec(group, b);
  const auto* list_a = std::get_if<WordList>(&a);
  const auto* list_b = std::get_if<WordList>(&b);
  if (list_a && list_b) return common_listed_elements(group, *list_a, *list_b, depth, a, b);
  const Ball ball = enumerate_ball(group, depth);
  std::vector<IntersectionWitness> out;
  for (std::size_t i = 1; i < ball.size(); ++i) {
    const auto sums = ball.exponent_sums(i);
    if (!is_member(group, a, ball.matrix(i), sums) || !is_member(group, b, ball.matrix(i), sums)) continue;
    const GroupElement e = ball.element(i, group);
    out.push_back({e, {membership_evidence(group, a, e), membership_evidence(group, b, e)}});
  }
  return out;
}

IntersectionWitness normal_intersection_witness(const MarkedGroup& group, const Word& phi, const Word& theta,
                                                const SubgroupSpec& spec_phi, const SubgroupSpec& spec_theta) {
  if (!std::holds_alternative<CharacterKernel>(spec_phi) || !std::holds_alternative<CharacterKernel>(spec_theta)) {
    throw Error(ErrorCode::NotNormalSpec, "both subgroups must be character kernels");
  }
  validate_spec(group, spec_phi);
  validate_spec(group, spec_theta);
  const GroupElement phi_e = group.element(phi);
  const GroupElement theta_e = group.element(theta);
  if (!is_member(group, spec_phi, phi_e)) throw Error(ErrorCode::PreconditionFailed, "phi is not in its subgroup");
  if (!is_member(group, spec_theta, theta_e)) throw Error(ErrorCode::PreconditionFailed, "theta is not in its subgroup");

  auto verified = [&](const Word& w) -> std::optional<IntersectionWitness> {
    const GroupElement e = group.element(w);
    if (matrix_distance(e.matrix, Mobius<double>::identity()) <= kDuplicateTolerance) return std::nullopt;
    IntersectionWitness witness{e, {membership_evidence(group, spec_phi, e), membership_evidence(group, spec_theta, e)}};
    if (!witness.evidence[0].member || !witness.evidence[1].member) return std::nullopt;
    return witness;
  };

  if (auto w = verified(theta.inverse() * phi * theta * phi.inverse())) return *w;

  // Commuting branch: phi and theta are powers of one primitive element, so
  // q * len(phi) = p * len(theta) for coprime p, q and phi^q = theta^(+-p).
  const double len_phi = classify_isometry(phi_e.matrix).translation_length;
  const double len_theta = classify_isometry(theta_e.matrix).translation_length;
  if (len_phi > 0.0 && len_theta > 0.0) {
    for (int q = 1; q <= 64; ++q) {
      const int p = static_cast<int>(std::lround(q * len_phi / len_theta));
      if (p < 1 || std::abs(q * len_phi - p * len_theta) > 1e-6 * q * len_phi) continue;
      const Mobius<double> lhs = power(phi_e.matrix, q);
      if (matrix_distance(lhs, power(theta_e.matrix, p)) > kDuplicateTolerance &&
          matrix_distance(lhs, power(theta_e.matrix, -p)) > kDuplicateTolerance) {
        continue;
      }
      if (auto w = verified(phi.power(q))) return *w;
    }
  }
  throw Error(ErrorCode::WitnessTrivial, "no nontrivial witness from either branch");
}

std::optional<int> power_in_subgroup(const MarkedGroup& group, const Word& gamma, const SubgroupSpec& spec, int max_m) {
  validate_spec(group, spec);
  if (classify_isometry(group.evaluate(gamma)).kind != IsometryKind::loxodromic) {
    throw Error(ErrorCode::NotLoxodromic, "gamma must be loxodromic");
  }
  if (max_m < 1) throw Error(ErrorCode::InvalidInput, "max_m must be >= 1");
  for (int m = 1; m <= max_m; ++m) {
    if (is_member(group, spec, group.element(gamma.power(m)))) return m;
  }
  return std::nullopt;
}

namespace {

nlohmann::ordered_json int_vector(const Eigen::VectorXi& v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

}  // namespace

std::string trace_to_jsonl(const MarkedGroup& group, const RayTrace& trace) {
  std::string out;
  for (const RaySample& s : trace.samples) {
    nlohmann::ordered_json line;
    line["t"] = s.t;
    line["point"] = {s.reduced.x, s.reduced.y};
    nlohmann::ordered_json coset;
    for (const auto& [name, v] : s.coset) coset[name] = int_vector(v);
    line["coset"] = coset;
    line["reduced_distance"] = s.reduced_distance;
    line["raw_distance"] = s.raw_distance;
    line["word_length"] = s.word.length();
    out += line.dump() + "\n";
  }
  (void)group;
  return out;
}

std::string trace_to_csv(const MarkedGroup& group, const RayTrace& trace) {
  std::string out = "t,x,y,reduced_distance,raw_distance";
  for (const Character& c : group.characters()) {
    for (int k = 0; k < c.dimension(); ++k) out += "," + c.name + "_" + std::to_string(k);
  }
  out += "\n";
  for (const RaySample& s : trace.samples) {
    out += format_double(s.t) + "," + format_double(s.reduced.x) + "," + format_double(s.reduced.y) + "," +
           format_double(s.reduced_distance) + "," + format_double(s.raw_distance);
    for (const Character& c : group.characters()) {
      const Eigen::VectorXi& v = s.coset.at(c.name);
      for (Eigen::Index k = 0; k < v.size(); ++k) out += "," + std::to_string(v(k));
    }
    out += "\n";
  }
  return out;
}

std::string recurrence_to_json(const RecurrenceClass& verdict) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "recurrence_verdict";
  doc["verdict"] = std::string(to_string(verdict.tag));
  doc["spec"] = verdict.spec;
  doc["horizon"] = verdict.horizon;
  doc["bound"] = verdict.bound;
  doc["return_count"] = verdict.return_count;
  doc["excursion_count"] = verdict.excursion_count;
  doc["max_proxy"] = verdict.max_proxy;
  doc["final_quarter_min"] = verdict.final_quarter_min;
  doc["previous_quarter_min"] = verdict.previous_quarter_min;
  doc["transient_pattern"] = verdict.transient_pattern;
  doc["recurrent_pattern"] = verdict.recurrent_pattern;
  doc["evidence_note"] = "finite-horizon evidence, not a proof";
  return doc.dump(2) + "\n";
}

}  // namespace limitlab
