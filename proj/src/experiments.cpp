#include "crowd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "crowd/baselines.hpp"
#include "crowd/errors.hpp"
#include "crowd/io.hpp"
#include "crowd/metrics.hpp"
#include "crowd/prediction.hpp"

namespace crowd {

namespace {

constexpr const char* kSeedRule =
    "trial seed = splitmix64 chain over (base seed, FNV-1a(experiment id), condition index, trial index)";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fmt_ratio(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ratio);
  return buf;
}

std::string describe(const SimulationConfig& c) {
  return "E=" + std::to_string(c.n_objects) + ";S=" + std::to_string(c.n_annotators) +
         ";N=" + std::to_string(c.n_labels) + ";ratio=" + fmt_ratio(c.spamminess_ratio) +
         ";behavior=" + to_string(c.behavior) + ";truth=" + to_string(c.ground_truth_kind);
}

// Reliabilities as they appear in output files. Fitted values often pile up
// within 1e-12 of 1, and ranking on digits that never reach a file would make
// SROCC disagree with a simulate/infer/evaluate run of the same trial.
std::vector<double> reported(std::vector<double> values) {
  for (auto& v : values) v = round_significant(v);
  return values;
}

std::vector<double> epsilons_of(const ModelState& state) {
  std::vector<double> eps;
  for (const auto& p : state.profiles) eps.push_back(p.epsilon);
  return reported(std::move(eps));
}

SimulatedWorld simulate_seeded(SimulationConfig config, std::uint64_t seed) {
  config.seed = seed;
  return simulate(config);
}

std::vector<Measurement> distribution_errors(const SimulatedWorld& world, const std::string& key,
                                             const FitConfig& fit_config) {
  const auto result = fit(world.annotations, fit_config);
  const auto observed = observed_distribution(world.annotations);
  const auto cond = describe(world.config);
  return {
      {key, cond, "model_rmse", flattened_rmse(world.truths, result.state.theta)},
      {key, cond, "model_hellinger", mean_hellinger(world.truths, result.state.theta)},
      {key, cond, "observed_rmse", flattened_rmse(world.truths, observed)},
      {key, cond, "observed_hellinger", mean_hellinger(world.truths, observed)},
  };
}

using TrialFn = std::function<std::vector<Measurement>(int condition, std::uint64_t seed)>;

ExperimentReport run_grid(std::string id, int n_conditions, int repetitions, std::uint64_t seed, unsigned threads,
                          const TrialFn& trial) {
  if (repetitions < 1) throw InputError("repetitions must be at least 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const std::size_t total = static_cast<std::size_t>(n_conditions) * static_cast<std::size_t>(repetitions);
  std::vector<std::vector<Measurement>> results(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const int c = static_cast<int>(job / static_cast<std::size_t>(repetitions));
      const int t = static_cast<int>(job % static_cast<std::size_t>(repetitions));
      try {
        results[job] = trial(c, trial_seed(seed, id, c, t));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.experiment = std::move(id);
  report.repetitions = repetitions;
  report.seed = seed;
  report.seed_rule = kSeedRule;

  // Reduction in (condition, trial) order.
  for (int c = 0; c < n_conditions; ++c) {
    const auto base = static_cast<std::size_t>(c) * static_cast<std::size_t>(repetitions);
    const auto& layout = results[base];
    for (std::size_t m = 0; m < layout.size(); ++m) {
      double sum = 0.0;
      for (int t = 0; t < repetitions; ++t) sum += results[base + static_cast<std::size_t>(t)].at(m).value;
      const double mean = sum / repetitions;
      double sq = 0.0;
      for (int t = 0; t < repetitions; ++t) {
        const double d = results[base + static_cast<std::size_t>(t)][m].value - mean;
        sq += d * d;
      }
      const double sd = repetitions > 1 ? std::sqrt(sq / (repetitions - 1)) : 0.0;
      report.cells.push_back({layout[m].key, layout[m].condition, layout[m].metric, mean, sd});
    }
  }
  return report;
}

}  // namespace

const MetricCell& ExperimentReport::at(std::string_view key, std::string_view metric) const {
  for (const auto& c : cells) {
    if (c.key == key && c.metric == metric) return c;
  }
  throw std::out_of_range("no cell " + std::string(key) + "/" + std::string(metric));
}

std::uint64_t trial_seed(std::uint64_t base, std::string_view experiment, int condition, int trial) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ fnv1a(experiment));
  h = splitmix64(h ^ static_cast<std::uint64_t>(condition));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

SimulationConfig exp1a_config(BehaviorType behavior) {
  SimulationConfig c;
  c.spamminess_ratio = 0.2;
  c.behavior = behavior;
  return c;
}

SimulationConfig exp1b_config(double ratio) {
  SimulationConfig c;
  c.spamminess_ratio = ratio;
  c.behavior = BehaviorType::mixed;
  return c;
}

SimulationConfig exp1c_config(int n_annotators) {
  SimulationConfig c;
  c.n_annotators = n_annotators;
  c.spamminess_ratio = 0.2;
  c.behavior = BehaviorType::mixed;
  return c;
}

SimulationConfig exp1d_config() {
  SimulationConfig c;
  c.spamminess_ratio = 0.25;
  c.behavior = BehaviorType::mixed;
  c.ground_truth_kind = GroundTruthKind::gaussian_ordinal;
  return c;
}

const std::vector<BehaviorType>& exp1a_behaviors() {
  static const std::vector<BehaviorType> v = {BehaviorType::random, BehaviorType::repeated, BehaviorType::inverted,
                                              BehaviorType::mixed};
  return v;
}

const std::vector<double>& exp1b_ratios() {
  // 0 is an anchor row beyond the five published levels.
  static const std::vector<double> v = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25};
  return v;
}

const std::vector<int>& exp1c_annotator_counts() {
  static const std::vector<int> v = {10, 15, 20, 25, 30, 35, 40};
  return v;
}

std::vector<Measurement> exp1a_trial(BehaviorType behavior, std::uint64_t seed, const FitConfig& fit_config) {
  const auto world = simulate_seeded(exp1a_config(behavior), seed);
  const auto result = fit(world.annotations, fit_config);
  const auto estimated = epsilons_of(result.state);
  const auto truth = reported(world.population.epsilons);
  const auto key = to_string(behavior);
  const auto cond = describe(world.config);
  const auto true_flags = classify_spammers(std::span<const double>(truth));
  const auto est_flags = classify_spammers(std::span<const double>(estimated));
  std::vector<bool> true_reliable(true_flags.size()), est_reliable(est_flags.size());
  for (std::size_t s = 0; s < true_flags.size(); ++s) {
    true_reliable[s] = !true_flags[s];
    est_reliable[s] = !est_flags[s];
  }
  return {
      {key, cond, "f1", f1_binary(true_flags, est_flags)},
      {key, cond, "f1_reliable", f1_binary(true_reliable, est_reliable)},
      {key, cond, "plcc", plcc(truth, estimated)},
      {key, cond, "srocc", srocc(truth, estimated)},
      {key, cond, "rmse", rmse(truth, estimated)},
  };
}

std::vector<Measurement> exp1b_trial(double ratio, std::uint64_t seed, const FitConfig& fit_config) {
  return distribution_errors(simulate_seeded(exp1b_config(ratio), seed), "ratio=" + fmt_ratio(ratio), fit_config);
}

std::vector<Measurement> exp1c_trial(int n_annotators, std::uint64_t seed, const FitConfig& fit_config) {
  return distribution_errors(simulate_seeded(exp1c_config(n_annotators), seed), "S=" + std::to_string(n_annotators),
                             fit_config);
}

std::vector<Measurement> exp1d_trial(std::uint64_t seed, const FitConfig& fit_config) {
  const auto world = simulate_seeded(exp1d_config(), seed);
  const auto result = fit(world.annotations, fit_config);
  const auto& truth = world.true_values;
  const auto cond = describe(world.config);

  std::vector<double> proposed;
  for (const auto& row : result.state.theta) proposed.push_back(predict_continuous(row));
  const auto mean = mean_label(world.annotations);
  std::vector<double> majority;
  for (int label : majority_vote(world.annotations)) majority.push_back(label);

  std::vector<Measurement> out;
  for (const auto& [key, pred] : {std::pair<std::string, const std::vector<double>*>{"proposed", &proposed},
                                  {"mean", &mean},
                                  {"majority", &majority}}) {
    const auto c = cond + ";model=" + key;
    out.push_back({key, c, "plcc", plcc(truth, *pred)});
    out.push_back({key, c, "srocc", srocc(truth, *pred)});
    out.push_back({key, c, "rmse", rmse(truth, *pred)});
  }
  return out;
}

ExperimentReport run_exp1a(int repetitions, std::uint64_t seed, unsigned threads) {
  const auto& behaviors = exp1a_behaviors();
  auto report = run_grid("exp1a", static_cast<int>(behaviors.size()), repetitions, seed, threads,
                         [&](int c, std::uint64_t s) { return exp1a_trial(behaviors[static_cast<std::size_t>(c)], s); });
  report.notes.push_back("f1 treats spammer (epsilon < 0.5) as the positive class; f1_reliable the opposite");
  report.notes.push_back("plcc/srocc/rmse compare true and estimated annotator reliability");
  return report;
}

ExperimentReport run_exp1b(int repetitions, std::uint64_t seed, unsigned threads) {
  const auto& ratios = exp1b_ratios();
  auto report = run_grid("exp1b", static_cast<int>(ratios.size()), repetitions, seed, threads,
                         [&](int c, std::uint64_t s) { return exp1b_trial(ratios[static_cast<std::size_t>(c)], s); });
  report.notes.push_back("rmse is taken over per-bin probabilities flattened across objects");
  report.notes.push_back("hellinger is the per-object distance averaged over objects");
  return report;
}

ExperimentReport run_exp1c(int repetitions, std::uint64_t seed, unsigned threads) {
  const auto& counts = exp1c_annotator_counts();
  auto report = run_grid("exp1c", static_cast<int>(counts.size()), repetitions, seed, threads,
                         [&](int c, std::uint64_t s) { return exp1c_trial(counts[static_cast<std::size_t>(c)], s); });
  report.notes.push_back("rmse is taken over per-bin probabilities flattened across objects");
  report.notes.push_back("hellinger is the per-object distance averaged over objects");
  return report;
}

ExperimentReport run_exp1d(int repetitions, std::uint64_t seed, unsigned threads) {
  auto report = run_grid("exp1d", 1, repetitions, seed, threads,
                         [](int, std::uint64_t s) { return exp1d_trial(s); });
  report.notes.push_back("proposed predicts the expectation of the fitted distribution");
  report.notes.push_back("annotator precision ~ Gamma(shape 10, rate 5)");
  return report;
}

ExperimentReport run_experiment(std::string_view id, int repetitions, std::uint64_t seed, unsigned threads) {
  if (id == "exp1a") return run_exp1a(repetitions, seed, threads);
  if (id == "exp1b") return run_exp1b(repetitions, seed, threads);
  if (id == "exp1c") return run_exp1c(repetitions, seed, threads);
  if (id == "exp1d") return run_exp1d(repetitions, seed, threads);
  throw InputError("unknown experiment '" + std::string(id) + "'");
}

}  // namespace crowd
