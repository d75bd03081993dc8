#include "crowd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

#include "json.hpp"

#include "crowd/errors.hpp"
#include "crowd/prediction.hpp"

namespace crowd {

using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kOutputDigits, x);
  return buf;
}

json rounded(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(round_significant(x));
  return arr;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed ") + what + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw InputError(std::string(what) + " is missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + " field '" + key + "': " + e.what());
  }
}

TruthRecord parse_truth_record(const std::string& id, const json& j) {
  TruthRecord rec;
  if (j.is_number_integer() || j.is_number_unsigned()) {
    rec.kind = TruthKind::label;
    rec.label = std::to_string(j.get<long long>());
    rec.value = j.get<double>();
  } else if (j.is_string()) {
    rec.kind = TruthKind::label;
    rec.label = j.get<std::string>();
    double v;
    if (parse_number(rec.label, v)) rec.value = v;
  } else if (j.is_number_float()) {
    rec.kind = TruthKind::value;
    rec.value = j.get<double>();
  } else if (j.is_array()) {
    rec.kind = TruthKind::distribution;
    for (const auto& x : j) {
      if (!x.is_number()) throw ValidationError("truth for '" + id + "' has a non-numeric entry");
      rec.distribution.push_back(x.get<double>());
    }
    if (!is_simplex(rec.distribution, 1e-6)) {
      throw ValidationError("truth for '" + id + "' is not a probability vector");
    }
  } else {
    throw ValidationError("truth for '" + id + "' has an unsupported shape");
  }
  return rec;
}

// Orders `values` (keyed by id) to match `ids`; the two id sets must agree.
template <typename T>
std::vector<const T*> align(const std::vector<std::string>& ids, const std::vector<std::pair<std::string, T>>& values,
                            const char* what) {
  std::unordered_map<std::string, const T*> by_id;
  for (const auto& [id, v] : values) by_id.emplace(id, &v);
  if (by_id.size() != ids.size()) {
    throw InputError(std::string(what) + " ids differ between prediction and truth");
  }
  std::vector<const T*> out;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError(std::string(what) + " '" + id + "' has no truth record");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw InputError("failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot replace '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedAnnotations parse_annotations_csv(std::istream& in, const std::optional<LabelSpace>& space) {
  static const std::regex kId("[A-Za-z0-9_.-]+");
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<LabelTriple> triples;
  std::vector<std::size_t> lines;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    if (!header_seen) {
      if (fields != std::vector<std::string>{"object_id", "annotator_id", "label"}) {
        throw ParseError(line_no, "expected header 'object_id,annotator_id,label'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    if (!std::regex_match(fields[0], kId)) throw ParseError(line_no, "bad object id '" + fields[0] + "'");
    if (!std::regex_match(fields[1], kId)) throw ParseError(line_no, "bad annotator id '" + fields[1] + "'");
    if (fields[2].empty()) throw ParseError(line_no, "empty label");
    if (space && !space->contains(fields[2])) throw ParseError(line_no, "unknown label '" + fields[2] + "'");
    triples.push_back({fields[0], fields[1], fields[2]});
    lines.push_back(line_no);
  }
  if (!header_seen) throw InputError("annotations file is empty");
  if (triples.empty()) throw InputError("annotations file has no rows");

  std::optional<LabelSpace> resolved = space;
  if (!resolved) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& t : triples) {
      if (seen.insert(t.label).second) names.push_back(t.label);
    }
    std::map<std::string, double> numeric;
    for (const auto& n : names) {
      double v;
      if (parse_number(n, v)) numeric.emplace(n, v);
    }
    if (numeric.size() == names.size()) {
      std::stable_sort(names.begin(), names.end(),
                       [&](const std::string& a, const std::string& b) { return numeric.at(a) < numeric.at(b); });
    } else {
      std::sort(names.begin(), names.end());
    }
    if (names.size() < 2) {
      throw InputError("only one distinct label in the file; pass the label space explicitly");
    }
    resolved.emplace(std::move(names));
  }
  auto data = build_annotation_set(triples, *resolved);
  return {std::move(data), std::move(*resolved)};
}

LoadedAnnotations load_annotations_csv(const std::filesystem::path& path, const std::optional<LabelSpace>& space) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_annotations_csv(in, space);
}

std::string annotations_to_csv(const AnnotationSet& data, const LabelSpace& space) {
  std::string out = "object_id,annotator_id,label\n";
  for (const auto& a : data.annotations()) {
    out += data.object_names()[static_cast<std::size_t>(a.object)];
    out += ',';
    out += data.annotator_names()[static_cast<std::size_t>(a.annotator)];
    out += ',';
    out += space.name_of(a.label);
    out += '\n';
  }
  return out;
}

TruthFile parse_truth_json(std::string_view text) {
  const auto j = parse_json(text, "truth file");
  if (!j.is_object()) throw InputError("truth file must be a JSON object");

  const bool structured = j.contains("objects") && j.at("objects").is_object() &&
                          std::all_of(j.items().begin(), j.items().end(), [](const auto& kv) {
                            return kv.key() == "objects" || kv.key() == "annotators" || kv.key() == "meta";
                          });
  TruthFile truth;
  const json& objects = structured ? j.at("objects") : j;
  for (const auto& [id, rec] : objects.items()) truth.objects.emplace_back(id, parse_truth_record(id, rec));

  if (structured && j.contains("annotators")) {
    for (const auto& [id, rec] : j.at("annotators").items()) {
      const json& eps = rec.is_object() ? rec.at("epsilon") : rec;
      if (!eps.is_number()) throw ValidationError("annotator '" + id + "' reliability is not a number");
      const double v = eps.get<double>();
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("annotator '" + id + "' reliability outside [0,1]");
      truth.annotator_epsilons.emplace_back(id, v);
    }
  }
  return truth;
}

TruthFile load_truth_file(const std::filesystem::path& path) { return parse_truth_json(read_file(path)); }

std::string truth_to_json(const SimulatedWorld& world) {
  json objects = json::object();
  const auto& names = world.annotations.object_names();
  for (std::size_t e = 0; e < names.size(); ++e) {
    if (!world.truths.empty()) {
      objects[names[e]] = rounded(world.truths[e]);
    } else {
      // Values are written as floats so they read back as continuous truths.
      objects[names[e]] = static_cast<double>(round_significant(world.true_values[e]));
    }
  }
  json annotators = json::object();
  const auto& ann = world.annotations.annotator_names();
  for (std::size_t s = 0; s < ann.size(); ++s) annotators[ann[s]] = round_significant(world.population.epsilons[s]);
  json root;
  root["objects"] = std::move(objects);
  root["annotators"] = std::move(annotators);
  root["meta"] = json::parse(simulation_config_to_json(world.config));
  return root.dump(2) + "\n";
}

FitOutput make_fit_output(const FitResult& result, const AnnotationSet& data, const LabelSpace& space,
                          const FitConfig& config, double spammer_threshold) {
  FitOutput out;
  out.labels = space.names();
  out.pi_mode = to_string(config.pi_mode);
  out.spammer_threshold = spammer_threshold;
  out.iterations = result.iterations;
  out.converged = result.converged;
  out.log_likelihood = result.log_likelihood_trace.empty() ? log_likelihood(result.state, data)
                                                           : result.log_likelihood_trace.back();
  const auto flags = classify_spammers(std::span<const AnnotatorProfile>(result.state.profiles), spammer_threshold);
  out.spamminess_ratio = spamminess_ratio(flags);
  for (const auto& p : predict_all(result.state)) {
    const auto& row = result.state.theta[static_cast<std::size_t>(p.object)];
    out.objects.push_back({data.object_names()[static_cast<std::size_t>(p.object)], row, space.name_of(p.mode_label),
                           p.expectation, p.entropy_nats});
  }
  for (std::size_t s = 0; s < result.state.profiles.size(); ++s) {
    const auto& prof = result.state.profiles[s];
    out.annotators.push_back({data.annotator_names()[s], prof.epsilon, prof.pi, flags[s]});
  }
  return out;
}

std::string fit_output_to_json(const FitOutput& out) {
  json root;
  root["labels"] = out.labels;
  root["pi_mode"] = out.pi_mode;
  root["spammer_threshold"] = round_significant(out.spammer_threshold);
  root["iterations"] = out.iterations;
  root["converged"] = out.converged;
  root["log_likelihood"] = round_significant(out.log_likelihood);
  root["spamminess_ratio"] = round_significant(out.spamminess_ratio);
  json objects = json::array();
  for (const auto& o : out.objects) {
    objects.push_back({{"id", o.id},
                       {"theta", rounded(o.theta)},
                       {"mode", o.mode},
                       {"expectation", round_significant(o.expectation)},
                       {"entropy", round_significant(o.entropy)}});
  }
  root["objects"] = std::move(objects);
  json annotators = json::array();
  for (const auto& a : out.annotators) {
    annotators.push_back(
        {{"id", a.id}, {"epsilon", round_significant(a.epsilon)}, {"pi", rounded(a.pi)}, {"spammer", a.spammer}});
  }
  root["annotators"] = std::move(annotators);
  return root.dump(2) + "\n";
}

FitOutput parse_fit_output(std::string_view text) {
  const auto j = parse_json(text, "fit output");
  if (!j.is_object()) throw InputError("fit output must be a JSON object");
  constexpr const char* what = "fit output";
  FitOutput out;
  out.labels = field<std::vector<std::string>>(j, "labels", what);
  out.pi_mode = field<std::string>(j, "pi_mode", what);
  out.spammer_threshold = field<double>(j, "spammer_threshold", what);
  out.iterations = field<int>(j, "iterations", what);
  out.converged = field<bool>(j, "converged", what);
  out.log_likelihood = field<double>(j, "log_likelihood", what);
  out.spamminess_ratio = field<double>(j, "spamminess_ratio", what);
  for (const auto& o : field<json>(j, "objects", what)) {
    out.objects.push_back({field<std::string>(o, "id", "object"), field<std::vector<double>>(o, "theta", "object"),
                           field<std::string>(o, "mode", "object"), field<double>(o, "expectation", "object"),
                           field<double>(o, "entropy", "object")});
  }
  for (const auto& a : field<json>(j, "annotators", what)) {
    out.annotators.push_back({field<std::string>(a, "id", "annotator"), field<double>(a, "epsilon", "annotator"),
                              field<std::vector<double>>(a, "pi", "annotator"), field<bool>(a, "spammer", "annotator")});
  }
  return out;
}

std::vector<std::pair<std::string, double>> evaluate(const FitOutput& fit, const TruthFile& truth,
                                                     const std::vector<std::string>& metrics, F1Average average) {
  static const std::set<std::string> kObjectMetrics = {"accuracy", "f1", "plcc", "srocc", "rmse", "hellinger"};
  static const std::set<std::string> kAnnotatorMetrics = {"spammer_f1", "epsilon_plcc", "epsilon_srocc",
                                                          "epsilon_rmse"};
  if (metrics.empty()) throw InputError("no metrics requested");
  for (const auto& m : metrics) {
    if (!kObjectMetrics.count(m) && !kAnnotatorMetrics.count(m)) throw InputError("unknown metric '" + m + "'");
  }
  const bool need_objects = std::any_of(metrics.begin(), metrics.end(), [](const auto& m) { return kObjectMetrics.count(m) > 0; });
  const bool need_annotators = std::any_of(metrics.begin(), metrics.end(), [](const auto& m) { return kAnnotatorMetrics.count(m) > 0; });

  const LabelSpace space(fit.labels);
  const int n_labels = space.size();

  std::vector<const TruthRecord*> obj_truth;
  TruthKind kind = TruthKind::label;
  if (need_objects) {
    std::vector<std::string> ids;
    for (const auto& o : fit.objects) ids.push_back(o.id);
    obj_truth = align(ids, truth.objects, "object");
    kind = obj_truth.front()->kind;
    for (const auto* r : obj_truth) {
      if (r->kind != kind) throw InputError("truth file mixes record kinds");
    }
  }
  std::vector<const double*> ann_truth;
  if (need_annotators) {
    if (truth.annotator_epsilons.empty()) throw InputError("truth file has no annotator reliabilities");
    std::vector<std::string> ids;
    for (const auto& a : fit.annotators) ids.push_back(a.id);
    ann_truth = align(ids, truth.annotator_epsilons, "annotator");
  }

  auto require = [&](bool ok, const std::string& metric) {
    if (!ok) throw InputError("metric '" + metric + "' does not apply to this truth kind");
  };

  std::vector<std::pair<std::string, double>> out;
  for (const auto& m : metrics) {
    double value = 0.0;
    if (m == "accuracy" || m == "f1") {
      require(kind == TruthKind::label, m);
      std::vector<int> t, p;
      for (std::size_t e = 0; e < fit.objects.size(); ++e) {
        t.push_back(space.index_of(obj_truth[e]->label));
        p.push_back(space.index_of(fit.objects[e].mode));
      }
      value = m == "accuracy" ? classification_accuracy(t, p) : f1_multiclass(t, p, n_labels, average);
    } else if (m == "hellinger" || (m == "rmse" && kind == TruthKind::distribution)) {
      require(kind == TruthKind::distribution, m);
      std::vector<std::vector<double>> t, p;
      for (std::size_t e = 0; e < fit.objects.size(); ++e) {
        if (obj_truth[e]->distribution.size() != fit.objects[e].theta.size()) {
          throw InputError("truth distribution for '" + fit.objects[e].id + "' has the wrong length");
        }
        t.push_back(obj_truth[e]->distribution);
        p.push_back(fit.objects[e].theta);
      }
      value = m == "hellinger" ? mean_hellinger(t, p) : flattened_rmse(t, p);
    } else if (m == "plcc" || m == "srocc" || m == "rmse") {
      require(kind != TruthKind::distribution, m);
      std::vector<double> t, p;
      for (std::size_t e = 0; e < fit.objects.size(); ++e) {
        t.push_back(kind == TruthKind::label ? space.index_of(obj_truth[e]->label) : obj_truth[e]->value);
        p.push_back(fit.objects[e].expectation);
      }
      value = m == "plcc" ? plcc(t, p) : m == "srocc" ? srocc(t, p) : rmse(t, p);
    } else {
      std::vector<double> t, p;
      for (std::size_t s = 0; s < fit.annotators.size(); ++s) {
        t.push_back(*ann_truth[s]);
        p.push_back(fit.annotators[s].epsilon);
      }
      if (m == "spammer_f1") {
        std::vector<bool> predicted;
        for (const auto& a : fit.annotators) predicted.push_back(a.spammer);
        value = f1_binary(classify_spammers(std::span<const double>(t), fit.spammer_threshold), predicted);
      } else if (m == "epsilon_plcc") {
        value = plcc(t, p);
      } else if (m == "epsilon_srocc") {
        value = srocc(t, p);
      } else {
        value = rmse(t, p);
      }
    }
    out.emplace_back(m, value);
  }
  return out;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "experiment,condition,metric,mean,std,reps,seed\n";
  for (const auto& c : report.cells) {
    out += report.experiment + "," + c.condition + "," + c.metric + "," + format_number(c.mean) + "," +
           format_number(c.std) + "," + std::to_string(report.repetitions) + "," + std::to_string(report.seed) + "\n";
  }
  return out;
}

std::string report_to_json(const ExperimentReport& report) {
  json root;
  root["experiment"] = report.experiment;
  root["repetitions"] = report.repetitions;
  root["seed"] = report.seed;
  root["seed_rule"] = report.seed_rule;
  root["notes"] = report.notes;
  json rows = json::array();
  for (const auto& c : report.cells) {
    rows.push_back({{"key", c.key},
                    {"condition", c.condition},
                    {"metric", c.metric},
                    {"mean", round_significant(c.mean)},
                    {"std", round_significant(c.std)}});
  }
  root["rows"] = std::move(rows);
  return root.dump(2) + "\n";
}

SimulationConfig parse_simulation_config(std::string_view text) {
  const auto j = parse_json(text, "simulation config");
  if (!j.is_object()) throw InputError("simulation config must be a JSON object");
  static const std::set<std::string> kKeys = {"n_objects",       "n_annotators",    "n_labels",
                                              "spamminess_ratio", "behavior",        "seed",
                                              "ground_truth_kind", "precision_shape", "precision_param",
                                              "gamma_parameterization"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw InputError("unknown simulation config key '" + key + "'");
  }
  constexpr const char* what = "simulation config";
  SimulationConfig c;
  if (j.contains("n_objects")) c.n_objects = field<int>(j, "n_objects", what);
  if (j.contains("n_annotators")) c.n_annotators = field<int>(j, "n_annotators", what);
  if (j.contains("n_labels")) c.n_labels = field<int>(j, "n_labels", what);
  if (j.contains("spamminess_ratio")) c.spamminess_ratio = field<double>(j, "spamminess_ratio", what);
  if (j.contains("behavior")) c.behavior = parse_behavior(field<std::string>(j, "behavior", what));
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed", what);
  if (j.contains("ground_truth_kind")) {
    c.ground_truth_kind = parse_ground_truth_kind(field<std::string>(j, "ground_truth_kind", what));
  }
  if (j.contains("precision_shape")) c.precision_shape = field<double>(j, "precision_shape", what);
  if (j.contains("precision_param")) c.precision_param = field<double>(j, "precision_param", what);
  if (j.contains("gamma_parameterization")) {
    c.gamma_parameterization = parse_gamma_parameterization(field<std::string>(j, "gamma_parameterization", what));
  }
  c.validate();
  return c;
}

std::string simulation_config_to_json(const SimulationConfig& c) {
  json j;
  j["n_objects"] = c.n_objects;
  j["n_annotators"] = c.n_annotators;
  j["n_labels"] = c.n_labels;
  j["spamminess_ratio"] = c.spamminess_ratio;
  j["behavior"] = to_string(c.behavior);
  j["seed"] = c.seed;
  j["ground_truth_kind"] = to_string(c.ground_truth_kind);
  j["precision_shape"] = c.precision_shape;
  j["precision_param"] = c.precision_param;
  j["gamma_parameterization"] = to_string(c.gamma_parameterization);
  return j.dump(2);
}

}  // namespace crowd
