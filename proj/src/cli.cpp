#include "limitlab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "limitlab/artifacts.hpp"
#include "limitlab/ball.hpp"
#include "limitlab/counterexamples.hpp"
#include "limitlab/limit_analysis.hpp"
#include "limitlab/presentation_io.hpp"
#include "limitlab/susskind_lab.hpp"

namespace limitlab::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// "name(body)" -> body, or nullopt if text has a different shape.
std::optional<std::string> call_argument(const std::string& text, const std::string& name) {
  if (text.size() < name.size() + 2 || text.compare(0, name.size() + 1, name + "(") != 0 || text.back() != ')') {
    return std::nullopt;
  }
  return trim(std::string_view(text).substr(name.size() + 1, text.size() - name.size() - 2));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorCode::ConfigError, "not a number: '" + text + "'");
  return value;
}

Eigen::MatrixXi parse_columns(const MarkedGroup& group, const std::string& character, const std::string& text) {
  const Eigen::Index dim = group.character(character).images.rows();
  const auto columns = split(text, ';');
  Eigen::MatrixXi basis(dim, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto entries = split(columns[c], ',');
    if (static_cast<Eigen::Index>(entries.size()) != dim) {
      throw Error(ErrorCode::ConfigError, "basis column '" + columns[c] + "' needs " + std::to_string(dim) + " entries");
    }
    for (std::size_t r = 0; r < entries.size(); ++r) {
      const double v = parse_number(entries[r]);
      if (v != std::floor(v)) throw Error(ErrorCode::ConfigError, "basis entries must be integers");
      basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<int>(v);
    }
  }
  return basis;
}

}  // namespace

MarkedGroup resolve_group(const std::string& source, double lambda) {
  if (source == "genus2") return build_genus2_group();
  if (source == "schottky") return build_schottky_group(lambda);
  if (!std::filesystem::exists(source)) {
    throw Error(ErrorCode::ConfigError, "unknown group '" + source + "' (genus2, schottky or a presentation file)");
  }
  return load_group(source);
}

SubgroupSpec parse_spec(const MarkedGroup& group, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "whole") return WholeGroup{};
  if (text == "xi") return CharacterKernel{"grid", {}};
  if (text == "xiA") return CharacterKernel{"grid", parse_columns(group, "grid", "1,0")};
  if (text == "xiB") return CharacterKernel{"grid", parse_columns(group, "grid", "0,1")};
  if (auto body = call_argument(text, "cyclic")) return CyclicSubgroup{group.parse_word(*body)};
  if (auto body = call_argument(text, "words")) {
    WordList list;
    for (const std::string& w : split(*body, ',')) list.words.push_back(group.parse_word(w));
    return list;
  }
  const std::string suffix = "-kernel";
  if (text.size() > suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
    const std::string name = text.substr(0, text.size() - suffix.size());
    if (!group.has_character(name)) throw Error(ErrorCode::UnknownCharacter, "no character '" + name + "'");
    return CharacterKernel{name, {}};
  }
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const std::string name = trim(text.substr(0, colon));
    if (!group.has_character(name)) throw Error(ErrorCode::UnknownCharacter, "no character '" + name + "'");
    return CharacterKernel{name, parse_columns(group, name, text.substr(colon + 1))};
  }
  throw Error(ErrorCode::ConfigError, "cannot parse subgroup spec '" + text + "'");
}

BoundaryPoint<Precise> parse_target(const MarkedGroup& group, const std::string& raw) {
  const std::string text = trim(raw);
  if (auto body = call_argument(text, "fix")) return attracting_fixed_point(group, group.parse_word(*body));
  if (auto body = call_argument(text, "repel")) {
    return attracting_fixed_point(group, group.parse_word(*body).inverse());
  }
  if (auto body = call_argument(text, "spiral")) {
    const double loops = parse_number(*body);
    if (loops < 1 || loops != std::floor(loops)) throw Error(ErrorCode::ConfigError, "spiral loops must be a positive integer");
    return spiral_target(group, spiral_program(static_cast<int>(loops)));
  }
  if (auto body = call_argument(text, "angle")) return BoundaryPoint<Precise>::from_angle(Precise(*body));
  if (auto body = call_argument(text, "real")) return BoundaryPoint<Precise>::from_real(Precise(*body));
  throw Error(ErrorCode::ConfigError, "cannot parse target '" + text + "'");
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(number) + ": empty key");
    pairs.emplace_back(std::move(key), std::move(value));
  }
  return pairs;
}

namespace {

struct Options {
  std::string group = "genus2";
  double lambda = 3.0;
  std::string out = "limitlab-out";
  std::string config;
  int depth = 8;
  std::string spec = "whole";
  std::string spec_a = "ab4-kernel";
  std::string spec_b = "grid-kernel";
  std::string target = "fix(a1)";
  double step = kDefaultStep;
  double horizon = kDefaultHorizon;
  double bound = kDefaultBound;
  std::vector<std::string> elements;
  std::string element = "a1";
  std::string phi = "a1 b1 a1^-1 b1^-1";
  std::string theta = "b1";
  int max_power = 50;
  int loops = 10;
  double L = 3.0;
  std::vector<double> lengths{2.0, 3.0, 5.0};
  int segments = 40;
  std::string gamma = "a1";
  std::vector<double> scales{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
};

// Output directory, the files written into it, and the outcome summary.
class Run {
 public:
  Run(std::string name, const Options& options) : name_(std::move(name)), dir_(options.out) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& file, const std::string& contents) {
    write_text_file((std::filesystem::path(dir_) / file).string(), contents);
    files_.push_back(file);
  }

  void cloud(const std::string& file, const LimitCloud& c) {
    write_cloud_json(c, (std::filesystem::path(dir_) / file).string());
    files_.push_back(file);
  }

  void cloud_svg(const std::string& file, const LimitCloud& c) {
    write_cloud_svg(c, (std::filesystem::path(dir_) / file).string());
    files_.push_back(file);
  }

  void counts_csv(const std::string& file, const OrbitCounts& c) {
    write_counts_csv(c, (std::filesystem::path(dir_) / file).string());
    files_.push_back(file);
  }

  void set_outcome(std::string outcome) { outcome_ = std::move(outcome); }

  void manifest(const nlohmann::ordered_json& config, int status) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "manifest";
    doc["subcommand"] = name_;
    doc["config"] = config;
    doc["outcome"] = outcome_;
    doc["exit_code"] = status;
    files_.push_back("manifest.json");
    doc["files"] = files_;
    write_text_file((std::filesystem::path(dir_) / "manifest.json").string(), doc.dump(2) + "\n");
  }

 private:
  std::string name_;
  std::string dir_;
  std::vector<std::string> files_;
  std::string outcome_ = "ok";
};

std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

nlohmann::ordered_json header(const std::string& kind, const MarkedGroup& group) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = kind;
  doc["group"] = group.id();
  return doc;
}

nlohmann::ordered_json element_json(const MarkedGroup& group, const GroupElement& e) {
  nlohmann::ordered_json doc;
  doc["word"] = group.format_word(e.word);
  doc["length"] = e.word.length();
  doc["matrix"] = {e.matrix.a(), e.matrix.b(), e.matrix.c(), e.matrix.d()};
  nlohmann::ordered_json images;
  for (const auto& [name, v] : e.character_images) images[name] = std::vector<int>(v.data(), v.data() + v.size());
  doc["character_images"] = std::move(images);
  doc["distance_from_identity"] = matrix_distance(e.matrix, Mobius<double>::identity());
  return doc;
}

nlohmann::ordered_json witness_json(const MarkedGroup& group, const IntersectionWitness& w) {
  nlohmann::ordered_json doc = element_json(group, w.element);
  nlohmann::ordered_json evidence = nlohmann::ordered_json::array();
  for (const MembershipEvidence& ev : w.evidence) {
    evidence.push_back({{"spec", ev.spec}, {"method", ev.method}, {"member", ev.member}});
  }
  doc["evidence"] = std::move(evidence);
  return doc;
}

int render_limitset(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  const LimitCloud cloud = approximate_limit_set(group, parse_spec(group, o.spec), o.depth);
  run.cloud("limitset.json", cloud);
  run.cloud_svg("limitset.svg", cloud);
  if (cloud.empty()) {
    run.set_outcome("empty cloud");
    return kExitNegative;
  }
  return kExitOk;
}

int estimate_delta_cmd(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  const SubgroupSpec spec = parse_spec(group, o.spec);
  validate_spec(group, spec);
  const Ball ball = enumerate_ball(group, o.depth, EnumerationLimits::from_environment());
  const OrbitCounts counts = orbit_counts_from_ball(group, ball, spec);
  const LimitCloud cloud = limit_set_from_ball(group, ball, spec);
  run.counts_csv("counts.csv", counts);

  nlohmann::ordered_json doc = header("delta_estimate", group);
  doc["spec"] = describe(group, spec);
  doc["depth"] = o.depth;
  doc["elements"] = counts.radii.size();
  doc["trusted_radius"] = counts.trusted_radius;
  int status = kExitOk;
  try {
    const DeltaEstimate d = estimate_delta(counts);
    doc["delta_hat"] = d.delta_hat;
    doc["residual"] = d.residual;
    doc["window"] = {d.r_lo, d.r_hi};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    doc["delta_hat"] = nullptr;
    doc["delta_error"] = e.what();
    status = kExitNegative;
  }
  doc["cloud_points"] = cloud.size();
  doc["box_scales"] = o.scales;
  try {
    doc["box_dimension"] = box_dimension(cloud, o.scales);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    doc["box_dimension"] = nullptr;
    doc["box_error"] = e.what();
    status = kExitNegative;
  }
  if (doc["delta_hat"].is_number() && doc["box_dimension"].is_number()) {
    doc["difference"] = std::abs(doc["delta_hat"].get<double>() - doc["box_dimension"].get<double>());
  }
  run.write("delta.json", dump(doc));
  if (status != kExitOk) run.set_outcome("insufficient data");
  return status;
}

int trace_ray_cmd(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  const SubgroupSpec spec = parse_spec(group, o.spec);
  validate_spec(group, spec);
  const RayTrace trace = trace_ray(group, parse_target(group, o.target), InteriorPoint<double>::i(), o.step, o.horizon);
  run.write("trace.jsonl", trace_to_jsonl(group, trace));
  run.write("trace.csv", trace_to_csv(group, trace));
  const RecurrenceClass verdict = classify_recurrence(group, trace, spec, o.bound);
  run.write("verdict.json", recurrence_to_json(verdict));
  run.set_outcome(std::string(to_string(verdict.tag)));
  std::cout << o.target << " " << verdict.spec << ": " << to_string(verdict.tag) << "\n";
  const bool positive = verdict.tag == RecurrenceTag::bounded || verdict.tag == RecurrenceTag::recurrent;
  return positive ? kExitOk : kExitNegative;
}

int classify_cmd(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  std::vector<std::string> words = o.elements;
  if (words.empty()) words = group.generator_names();
  nlohmann::ordered_json doc = header("axis_certificates", group);
  doc["horizon"] = o.horizon;
  doc["step"] = o.step;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  bool all = true;
  for (const std::string& w : words) {
    const Word word = group.parse_word(w);
    const RecurrenceClass v = certify_uniform_conical_axis(group, word, o.horizon, o.step);
    const double length = classify_isometry(group.evaluate(word)).translation_length;
    const bool ok = v.tag == RecurrenceTag::bounded && v.bound <= length + 1e-12;
    all = all && ok;
    list.push_back({{"element", group.format_word(word)},
                    {"verdict", std::string(to_string(v.tag))},
                    {"bound", v.bound},
                    {"translation_length", length},
                    {"max_proxy", v.max_proxy},
                    {"certified", ok}});
    std::cout << group.format_word(word) << ": " << to_string(v.tag) << "\n";
  }
  doc["certificates"] = std::move(list);
  doc["all_certified"] = all;
  run.write("axis-certificates.json", dump(doc));
  if (!all) run.set_outcome("not certified");
  return all ? kExitOk : kExitNegative;
}

int intersect_cmd(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  const SubgroupSpec a = parse_spec(group, o.spec_a);
  const SubgroupSpec b = parse_spec(group, o.spec_b);
  const auto common = find_common_elements(group, a, b, o.depth);
  nlohmann::ordered_json doc = header("intersection", group);
  doc["spec_a"] = describe(group, a);
  doc["spec_b"] = describe(group, b);
  doc["depth"] = o.depth;
  doc["count"] = common.size();
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  constexpr std::size_t kListed = 1000;
  for (std::size_t k = 0; k < std::min(kListed, common.size()); ++k) list.push_back(witness_json(group, common[k]));
  doc["elements"] = std::move(list);
  doc["truncated"] = common.size() > kListed;
  run.write("intersection.json", dump(doc));
  std::cout << common.size() << " common elements\n";
  if (common.empty()) {
    run.set_outcome("empty");
    return kExitNegative;
  }
  return kExitOk;
}

int normal_witness_cmd(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  const SubgroupSpec a = parse_spec(group, o.spec_a);
  const SubgroupSpec b = parse_spec(group, o.spec_b);
  nlohmann::ordered_json doc = header("normal_witness", group);
  doc["phi"] = group.format_word(group.parse_word(o.phi));
  doc["theta"] = group.format_word(group.parse_word(o.theta));
  doc["spec_a"] = describe(group, a);
  doc["spec_b"] = describe(group, b);
  int status = kExitOk;
  try {
    const IntersectionWitness w = normal_intersection_witness(group, group.parse_word(o.phi), group.parse_word(o.theta), a, b);
    doc["witness"] = witness_json(group, w);
    std::cout << "witness " << group.format_word(w.element.word) << "\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::WitnessTrivial) throw;
    doc["witness"] = nullptr;
    doc["error"] = e.what();
    run.set_outcome("trivial");
    status = kExitNegative;
  }
  run.write("witness.json", dump(doc));
  return status;
}

int power_search_cmd(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  const SubgroupSpec spec = parse_spec(group, o.spec);
  const Word gamma = group.parse_word(o.element);
  const auto m = power_in_subgroup(group, gamma, spec, o.max_power);
  nlohmann::ordered_json doc = header("power_search", group);
  doc["element"] = group.format_word(gamma);
  doc["spec"] = describe(group, spec);
  doc["max_power"] = o.max_power;
  if (m) doc["power"] = *m;
  else doc["power"] = nullptr;
  doc["result"] = m ? "found" : "none-found";
  run.write("power.json", dump(doc));
  std::cout << (m ? "power " + std::to_string(*m) : std::string("none-found")) << "\n";
  if (!m) {
    run.set_outcome("none-found");
    return kExitNegative;
  }
  return kExitOk;
}

int loops_for(int segments) {
  int loops = 1;
  while (loops * (loops + 1) < segments) ++loops;
  return loops;
}

// Deviation samples live in the frame of a chord whose far end sits at
// distance up to segments * L; 128 digits cover about 290 units.
void check_precision_budget(int segments, double L) {
  if (segments < 1) throw Error(ErrorCode::ConfigError, "segments must be positive");
  if (segments * L > 250.0) {
    throw Error(ErrorCode::ConfigError, "segments * L must stay below 250 for the extended-precision path");
  }
}

int grid_example_cmd(const Options& o, Run& run) {
  const SpiralProgram program = spiral_program(o.loops);
  const int segments = std::min(o.segments, program.unit_steps());
  check_precision_budget(segments, o.L);
  const PiecewisePath path = build_spiral_path(program, o.L, static_cast<std::size_t>(segments));
  const DeviationReport deviation = quasigeodesic_gap(path);
  const SymbolicReport symbolic = symbolic_recurrence_report(program);
  run.write("spiral.json", program_to_json(program));
  run.write("grid-report.json", grid_report_to_json(program, path, deviation, symbolic));
  run.write("grid-path.svg", path_svg(path, deviation));
  std::cout << "max deviation " << format_double(deviation.max_deviation) << ", endpoint gap "
            << format_double(deviation.endpoint_cauchy_gap) << "\n";
  if (!symbolic.escape_certified || !symbolic.returns_certified) {
    run.set_outcome("symbolic certificate failed");
    return kExitNegative;
  }
  return kExitOk;
}

int prop31_cmd(const Options& o, Run& run) {
  const MarkedGroup group = resolve_group(o.group, o.lambda);
  const Word gamma = group.parse_word(o.gamma);
  Prop31Invariance invariance;
  Prop31Sides sides;
  try {
    invariance = prop31_precise_invariance(group, gamma, o.depth);
    sides = prop31_side_split(group, gamma, o.depth);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotApplicable) throw;
    nlohmann::ordered_json doc = header("prop31", group);
    doc["gamma"] = group.format_word(gamma);
    doc["applicable"] = false;
    doc["error"] = e.what();
    run.write("prop31.json", dump(doc));
    run.set_outcome("not applicable");
    return kExitNegative;
  }
  run.write("prop31.json", prop31_to_json(group, invariance, sides));
  run.write("prop31.svg", prop31_svg(sides));
  const bool ok = invariance.ok() && sides.arc_separated() && !sides.clouds[0].empty() && !sides.clouds[1].empty() &&
                  sides.common_elements == 0;
  std::cout << "crossings " << invariance.crossings << ", sides " << sides.side_words[0].size() << "/"
            << sides.side_words[1].size() << ", " << (ok ? "consistent" : "violation") << "\n";
  if (!ok) {
    run.set_outcome("violation");
    return kExitNegative;
  }
  return kExitOk;
}

int lemma31_cmd(const Options& o, Run& run) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "lemma31_check";
  doc["segments"] = o.segments;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  bool all = true;
  const SpiralProgram program = spiral_program(loops_for(o.segments));
  for (double L : o.lengths) {
    check_precision_budget(o.segments, L);
    const PiecewisePath path = build_spiral_path(program, L, static_cast<std::size_t>(o.segments));
    const DeviationReport d = quasigeodesic_gap(path);
    const auto at = [&](int j) { return d.prefix_deviations[static_cast<std::size_t>(std::min(j, o.segments) - 1)]; };
    const double full = at(o.segments);
    const double half = at(o.segments / 2 > 0 ? o.segments / 2 : 1);
    const double quarter = at(o.segments / 4 > 0 ? o.segments / 4 : 1);
    const bool monotone = std::is_sorted(d.prefix_deviations.begin(), d.prefix_deviations.end());
    const bool bounded = full < 2.0 * quarter;
    const bool stable = std::abs(full - half) <= 0.1 * half;
    const bool cauchy = d.endpoint_cauchy_gap < 1e-3;
    const bool right_angles = std::all_of(path.corner_angles.begin(), path.corner_angles.end(),
                                          [](double a) { return std::abs(a - pi<double>() / 2) < 1e-9; });
    const bool ok = monotone && bounded && stable && cauchy && right_angles;
    all = all && ok;
    list.push_back({{"L", L},
                    {"deviation_quarter", quarter},
                    {"deviation_half", half},
                    {"deviation_full", full},
                    {"max_deviation", d.max_deviation},
                    {"endpoint_cauchy_gap", d.endpoint_cauchy_gap},
                    {"monotone", monotone},
                    {"bounded", bounded},
                    {"stable", stable},
                    {"cauchy", cauchy},
                    {"right_angles", right_angles}});
    std::cout << "L=" << format_double(L) << ": deviation " << format_double(full) << (ok ? "" : " (check failed)") << "\n";
  }
  doc["runs"] = std::move(list);
  doc["all_passed"] = all;
  run.write("lemma31.json", dump(doc));
  if (!all) run.set_outcome("check failed");
  return all ? kExitOk : kExitNegative;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::InvalidLength:
    case ErrorCode::UnknownCharacter:
    case ErrorCode::ConfigError:
    case ErrorCode::DepthExceeded:
    case ErrorCode::NotNormalSpec:
    case ErrorCode::PreconditionFailed:
    case ErrorCode::NotLoxodromic:
    case ErrorCode::CirclesOverlap:
      return kExitConfig;
    case ErrorCode::NotApplicable:
    case ErrorCode::WitnessTrivial:
    case ErrorCode::InsufficientData:
    case ErrorCode::EmptyCloud:
    case ErrorCode::SideAmbiguous:
      return kExitNegative;
    default:
      return kExitFailure;
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "," : "") + items[k];
  return out;
}

}  // namespace

int run(int argc, const char* const* argv) {
  Options o;
  CLI::App app{"Limit sets, orbit growth and ray recurrence for Fuchsian groups", "limitlab"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "limitlab 1.0");

  using Handler = std::function<int(const Options&, Run&)>;
  std::map<std::string, Handler> handlers;
  std::vector<CLI::App*> subs;

  auto add = [&](const std::string& name, const std::string& about, Handler handler) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--config", o.config, "Flat key = value file; flags on the command line win");
    handlers[name] = std::move(handler);
    subs.push_back(sub);
    return sub;
  };
  auto group_options = [&](CLI::App* sub) {
    sub->add_option("--group", o.group, "genus2, schottky or a presentation JSON file");
    sub->add_option("--lambda", o.lambda, "Schottky multiplier");
  };

  auto* render = add("render-limitset", "Limit-set cloud as JSON and SVG", render_limitset);
  group_options(render);
  render->add_option("--depth", o.depth, "Word length");
  render->add_option("--spec", o.spec, "Subgroup");

  auto* delta = add("estimate-delta", "Critical exponent and box dimension", estimate_delta_cmd);
  group_options(delta);
  delta->add_option("--depth", o.depth, "Word length");
  delta->add_option("--spec", o.spec, "Subgroup");
  delta->add_option("--scales", o.scales, "Box-counting scales");

  auto* trace = add("trace-ray", "Trace a ray and classify its recurrence", trace_ray_cmd);
  group_options(trace);
  trace->add_option("--target", o.target, "fix(w), repel(w), spiral(n), angle(t) or real(x)");
  trace->add_option("--spec", o.spec, "Subgroup");
  trace->add_option("--step", o.step, "Arclength step");
  trace->add_option("--horizon", o.horizon, "Arclength horizon");
  trace->add_option("--bound", o.bound, "Recurrence bound B");

  auto* classify = add("classify", "Certify axes as uniformly conical", classify_cmd);
  group_options(classify);
  classify->add_option("--elements", o.elements, "Words (default: the generators)");
  classify->add_option("--step", o.step, "Arclength step");
  classify->add_option("--horizon", o.horizon, "Arclength horizon");

  auto* intersect = add("intersect", "Common elements of two subgroups in a ball", intersect_cmd);
  group_options(intersect);
  intersect->add_option("--spec-a", o.spec_a, "First subgroup");
  intersect->add_option("--spec-b", o.spec_b, "Second subgroup");
  intersect->add_option("--depth", o.depth, "Word length");

  auto* witness = add("normal-witness", "Nontrivial element of an intersection of normal subgroups", normal_witness_cmd);
  group_options(witness);
  witness->add_option("--phi", o.phi, "Element of the first subgroup");
  witness->add_option("--theta", o.theta, "Element of the second subgroup");
  witness->add_option("--spec-a", o.spec_a, "First subgroup");
  witness->add_option("--spec-b", o.spec_b, "Second subgroup");

  auto* power = add("power-search", "Smallest power of an element inside a subgroup", power_search_cmd);
  group_options(power);
  power->add_option("--element", o.element, "Word");
  power->add_option("--spec", o.spec, "Subgroup");
  power->add_option("--max", o.max_power, "Largest exponent tried");

  auto* grid = add("grid-example", "Grid spiral, its H^2 path and symbolic returns", grid_example_cmd);
  grid->add_option("--loops", o.loops, "Spiral loops (two runs each)");
  grid->add_option("--L", o.L, "Segment length");
  grid->add_option("--segments", o.segments, "Unit steps of the path to build");

  auto* prop = add("prop31", "Commutator-subgroup sharpness checks", prop31_cmd);
  group_options(prop);
  prop->add_option("--gamma", o.gamma, "Nonseparating element");
  prop->add_option("--depth", o.depth, "Word length");

  auto* lemma = add("lemma31-check", "Quasigeodesic stabilization of the spiral path", lemma31_cmd);
  lemma->add_option("--L", o.lengths, "Segment lengths");
  lemma->add_option("--segments", o.segments, "Unit steps");

  std::vector<std::string> args(argv, argv + argc);
  auto parse = [&](const std::vector<std::string>& tokens) {
    std::vector<const char*> raw;
    for (const std::string& t : tokens) raw.push_back(t.c_str());
    app.clear();
    app.parse(static_cast<int>(raw.size()), raw.data());
  };

  CLI::App* active = nullptr;
  try {
    parse(args);
    for (CLI::App* sub : subs) {
      if (sub->parsed()) active = sub;
    }
    if (!o.config.empty()) {
      std::vector<std::string> extra;
      for (const auto& [key, value] : read_config_file(o.config)) {
        const CLI::Option* opt = active->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") {
          throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "' for " + active->get_name());
        }
        if (opt->count() > 0) continue;
        extra.push_back("--" + key);
        if (opt->get_expected_max() > 1) {
          for (const std::string& v : split(value, ',')) extra.push_back(v);
        } else {
          extra.push_back(value);
        }
      }
      if (!extra.empty()) {
        std::vector<std::string> merged = args;
        merged.insert(merged.end(), extra.begin(), extra.end());
        parse(merged);
      }
    }
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "limitlab: " << e.what() << "\n";
    return kExitConfig;
  }

  nlohmann::ordered_json config;
  for (const CLI::Option* opt : active->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    config[name] = opt->count() > 0 ? join(opt->results()) : opt->get_default_str();
  }

  // A failed run still gets a manifest listing whatever it wrote.
  std::optional<Run> run;
  auto fail = [&](const std::string& outcome, int status) {
    if (run) {
      try {
        run->set_outcome(outcome);
        run->manifest(config, status);
      } catch (const std::exception&) {
      }
    }
    return status;
  };
  try {
    run.emplace(active->get_name(), o);
    const int status = handlers.at(active->get_name())(o, *run);
    run->manifest(config, status);
    return status;
  } catch (const Error& e) {
    std::cerr << "limitlab: " << e.what() << "\n";
    return fail(std::string(to_string(e.code())), exit_code_for(e.code()));
  } catch (const std::exception& e) {
    std::cerr << "limitlab: unexpected failure: " << e.what() << "\n";
    return fail("failure", kExitFailure + 1);
  }
}

}  // namespace limitlab::cli
