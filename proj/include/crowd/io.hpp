#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crowd/em.hpp"
#include "crowd/experiments.hpp"
#include "crowd/label_domain.hpp"
#include "crowd/metrics.hpp"
#include "crowd/simulation.hpp"

namespace crowd {

// Numbers in every output file carry this many significant digits.
inline constexpr int kOutputDigits = 12;

double round_significant(double x, int digits = kOutputDigits);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// ---- annotations CSV -------------------------------------------------------
// Header `object_id,annotator_id,label`, one annotation per row.

struct LoadedAnnotations {
  AnnotationSet data;
  LabelSpace space;
};

// Without a label space the distinct labels are used, sorted numerically
// when every label parses as a number and lexicographically otherwise.
LoadedAnnotations parse_annotations_csv(std::istream& in, const std::optional<LabelSpace>& space = std::nullopt);
LoadedAnnotations load_annotations_csv(const std::filesystem::path& path,
                                       const std::optional<LabelSpace>& space = std::nullopt);

std::string annotations_to_csv(const AnnotationSet& data, const LabelSpace& space);

// ---- truth JSON ------------------------------------------------------------
// Either a flat mapping {object_id: record} or
// {"objects": {object_id: record}, "annotators": {annotator_id: epsilon}}.
// A record is an integer or string (label), a non-integer number (value) or
// an array (distribution).

enum class TruthKind { label, value, distribution };

struct TruthRecord {
  TruthKind kind = TruthKind::label;
  std::string label;
  double value = 0.0;
  std::vector<double> distribution;
};

struct TruthFile {
  std::vector<std::pair<std::string, TruthRecord>> objects;
  std::vector<std::pair<std::string, double>> annotator_epsilons;
};

TruthFile parse_truth_json(std::string_view text);
TruthFile load_truth_file(const std::filesystem::path& path);

// Truth file for a simulated world: distributions or values per object plus
// the true annotator reliabilities.
std::string truth_to_json(const SimulatedWorld& world);

// ---- fit output JSON -------------------------------------------------------

struct ObjectFit {
  std::string id;
  std::vector<double> theta;
  std::string mode;
  double expectation = 0.0;
  double entropy = 0.0;
};

struct AnnotatorFit {
  std::string id;
  double epsilon = 0.0;
  std::vector<double> pi;
  bool spammer = false;
};

struct FitOutput {
  std::vector<std::string> labels;
  std::string pi_mode;
  double spammer_threshold = 0.5;
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
  double spamminess_ratio = 0.0;
  std::vector<ObjectFit> objects;
  std::vector<AnnotatorFit> annotators;
};

FitOutput make_fit_output(const FitResult& result, const AnnotationSet& data, const LabelSpace& space,
                          const FitConfig& config, double spammer_threshold);
std::string fit_output_to_json(const FitOutput& out);
FitOutput parse_fit_output(std::string_view text);

// ---- evaluation ------------------------------------------------------------

// Metric names: accuracy, f1, plcc, srocc, rmse, hellinger (object level) and
// spammer_f1, epsilon_plcc, epsilon_srocc, epsilon_rmse (annotator level).
// rmse on distribution truths is the flattened per-bin RMSE; on label or
// value truths it compares the fitted expectation. Object and annotator id
// sets must match exactly.
std::vector<std::pair<std::string, double>> evaluate(const FitOutput& fit, const TruthFile& truth,
                                                     const std::vector<std::string>& metrics,
                                                     F1Average average = F1Average::macro);

// ---- experiment reports ----------------------------------------------------

// Columns experiment,condition,metric,mean,std,reps,seed.
std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);

// ---- simulation config -----------------------------------------------------

SimulationConfig parse_simulation_config(std::string_view text);
std::string simulation_config_to_json(const SimulationConfig& config);

}  // namespace crowd
