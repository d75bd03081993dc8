#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crowd/em.hpp"
#include "crowd/simulation.hpp"

namespace crowd {

// One aggregated (condition, metric) cell. `key` is a short handle for
// lookups ("random", "ratio=0.20", "proposed"); `condition` spells out the
// full configuration of the trial so any single trial can be replayed.
struct MetricCell {
  std::string key;
  std::string condition;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  int repetitions = 0;
  std::uint64_t seed = 0;
  std::string seed_rule;
  std::vector<std::string> notes;
  std::vector<MetricCell> cells;

  // Throws std::out_of_range when absent.
  const MetricCell& at(std::string_view key, std::string_view metric) const;
};

struct Measurement {
  std::string key;
  std::string condition;
  std::string metric;
  double value = 0.0;
};

// splitmix64 over (base seed, FNV-1a of the experiment id, condition, trial).
std::uint64_t trial_seed(std::uint64_t base, std::string_view experiment, int condition, int trial);

// Configurations used by each experiment's conditions.
SimulationConfig exp1a_config(BehaviorType behavior);
SimulationConfig exp1b_config(double ratio);
SimulationConfig exp1c_config(int n_annotators);
SimulationConfig exp1d_config();

// Single trials, exposed so a trial can be replayed outside the runners.
std::vector<Measurement> exp1a_trial(BehaviorType behavior, std::uint64_t seed, const FitConfig& fit = {});
std::vector<Measurement> exp1b_trial(double ratio, std::uint64_t seed, const FitConfig& fit = {});
std::vector<Measurement> exp1c_trial(int n_annotators, std::uint64_t seed, const FitConfig& fit = {});
std::vector<Measurement> exp1d_trial(std::uint64_t seed, const FitConfig& fit = {});

const std::vector<BehaviorType>& exp1a_behaviors();
const std::vector<double>& exp1b_ratios();
const std::vector<int>& exp1c_annotator_counts();

// `threads` = 0 picks the hardware concurrency. Aggregates do not depend
// on the thread count.
ExperimentReport run_exp1a(int repetitions, std::uint64_t seed, unsigned threads = 1);
ExperimentReport run_exp1b(int repetitions, std::uint64_t seed, unsigned threads = 1);
ExperimentReport run_exp1c(int repetitions, std::uint64_t seed, unsigned threads = 1);
ExperimentReport run_exp1d(int repetitions, std::uint64_t seed, unsigned threads = 1);

ExperimentReport run_experiment(std::string_view id, int repetitions, std::uint64_t seed, unsigned threads = 1);

}  // namespace crowd
