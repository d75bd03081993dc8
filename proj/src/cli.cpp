#include "crowd/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "crowd/em.hpp"
#include "crowd/errors.hpp"
#include "crowd/experiments.hpp"
#include "crowd/io.hpp"
#include "crowd/simulation.hpp"

namespace crowd {

namespace {

struct InferArgs {
  std::string input;
  std::string output;
  std::string pi_mode = "fixed_uniform";
  double threshold = 1e-4;
  int max_iter = 1000;
  double spammer_threshold = 0.5;
  std::string labels;
  int n_labels = 0;
};

struct SimulateArgs {
  std::string config;
  std::string out_labels;
  std::string out_truth;
  std::optional<std::uint64_t> seed;
};

struct EvaluateArgs {
  std::string pred;
  std::string truth;
  std::string metrics;
  std::string f1_average = "macro";
  std::string output;
};

struct ExperimentArgs {
  std::string id;
  int reps = 100;
  std::uint64_t seed = 0;
  std::string output = "csv";
  unsigned threads = 0;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void run_infer(const InferArgs& a, std::ostream& out) {
  std::optional<LabelSpace> space;
  if (!a.labels.empty() && a.n_labels > 0) throw InputError("--labels and --n-labels are mutually exclusive");
  if (!a.labels.empty()) space.emplace(split_list(a.labels));
  if (a.n_labels > 0) space = LabelSpace::ordinal(a.n_labels);

  auto loaded = load_annotations_csv(a.input, space);
  FitConfig config;
  config.pi_mode = parse_pi_mode(a.pi_mode);
  config.convergence_threshold = a.threshold;
  config.max_iterations = a.max_iter;
  if (!(a.spammer_threshold >= 0.0 && a.spammer_threshold <= 1.0)) {
    throw InputError("--spammer-threshold outside [0,1]");
  }
  const auto result = fit(loaded.data, config);
  const auto fit_out = make_fit_output(result, loaded.data, loaded.space, config, a.spammer_threshold);
  write_file_atomic(a.output, fit_output_to_json(fit_out));
  out << "objects=" << loaded.data.n_objects() << " annotators=" << loaded.data.n_annotators()
      << " labels=" << loaded.space.size() << " iterations=" << result.iterations
      << " converged=" << (result.converged ? "true" : "false") << "\n";
}

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  auto config = parse_simulation_config(read_file(a.config));
  if (a.seed) config.seed = *a.seed;
  const auto world = simulate(config);
  const auto space = LabelSpace::ordinal(config.n_labels);
  write_file_atomic(a.out_labels, annotations_to_csv(world.annotations, space));
  write_file_atomic(a.out_truth, truth_to_json(world));
  out << "annotations=" << world.annotations.size() << "\n";
}

void run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto fit_out = parse_fit_output(read_file(a.pred));
  const auto truth = load_truth_file(a.truth);
  F1Average average = F1Average::macro;
  if (a.f1_average == "micro") {
    average = F1Average::micro;
  } else if (a.f1_average != "macro") {
    throw InputError("--f1-average must be macro or micro");
  }
  const auto values = evaluate(fit_out, truth, split_list(a.metrics), average);
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, v] : values) j[name] = round_significant(v);
  const auto text = j.dump(2) + "\n";
  if (!a.output.empty()) write_file_atomic(a.output, text);
  out << text;
}

void run_experiment_cmd(const ExperimentArgs& a, std::ostream& out) {
  const auto report = run_experiment(a.id, a.reps, a.seed, a.threads);
  if (a.output == "csv" || a.output == "-") {
    out << report_to_csv(report);
  } else if (a.output == "json") {
    out << report_to_json(report);
  } else {
    write_file_atomic(a.output, ends_with(a.output, ".json") ? report_to_json(report) : report_to_csv(report));
  }
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crowd label truth inference and simulation", "crowdtruth"};
  app.require_subcommand(1);

  InferArgs infer_args;
  auto* infer = app.add_subcommand("infer", "Fit the distribution-behavior model to an annotations CSV");
  infer->add_option("--input", infer_args.input, "annotations CSV")->required();
  infer->add_option("--output", infer_args.output, "fit output JSON")->required();
  infer->add_option("--pi-mode", infer_args.pi_mode, "fixed_uniform | learned")
      ->check(CLI::IsMember({"fixed_uniform", "learned"}));
  infer->add_option("--threshold", infer_args.threshold, "convergence threshold on the change in Q");
  infer->add_option("--max-iter", infer_args.max_iter, "iteration cap");
  infer->add_option("--spammer-threshold", infer_args.spammer_threshold, "flag annotators with epsilon below this");
  infer->add_option("--labels", infer_args.labels, "comma-separated label space, in order");
  infer->add_option("--n-labels", infer_args.n_labels, "ordinal label space 1..N");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic crowd");
  sim->add_option("--config", sim_args.config, "simulation config JSON")->required();
  sim->add_option("--out-labels", sim_args.out_labels, "annotations CSV to write")->required();
  sim->add_option("--out-truth", sim_args.out_truth, "truth JSON to write")->required();
  sim->add_option("--seed", sim_args.seed, "overrides the config seed");

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "Score a fit output against a truth file");
  eval->add_option("--pred", eval_args.pred, "fit output JSON")->required();
  eval->add_option("--truth", eval_args.truth, "truth JSON")->required();
  eval->add_option("--metrics", eval_args.metrics, "comma-separated metric names")->required();
  eval->add_option("--f1-average", eval_args.f1_average, "macro | micro");
  eval->add_option("--output", eval_args.output, "also write the scores to this JSON file");

  ExperimentArgs exp_args;
  auto* exp = app.add_subcommand("experiment", "Run a simulation study");
  exp->add_option("--id", exp_args.id, "exp1a | exp1b | exp1c | exp1d")
      ->required()
      ->check(CLI::IsMember({"exp1a", "exp1b", "exp1c", "exp1d"}));
  exp->add_option("--reps", exp_args.reps, "repetitions per condition");
  exp->add_option("--seed", exp_args.seed, "base seed");
  exp->add_option("--output", exp_args.output, "csv, json (stdout) or a file path (.json for JSON)");
  exp->add_option("--threads", exp_args.threads, "worker threads, 0 = all cores");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*infer) run_infer(infer_args, out);
    else if (*sim) run_simulate(sim_args, out);
    else if (*eval) run_evaluate(eval_args, out);
    else if (*exp) run_experiment_cmd(exp_args, out);
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace crowd
