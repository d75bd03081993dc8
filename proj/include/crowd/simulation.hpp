#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "crowd/label_domain.hpp"

namespace crowd {

using Rng = std::mt19937_64;

enum class BehaviorType { random, repeated, inverted, mixed };
enum class GroundTruthKind { beta_categorical, gaussian_ordinal };
// How the two Gamma parameters of the annotator precision are read.
enum class GammaParameterization { shape_rate, shape_scale };

std::string to_string(BehaviorType b);
std::string to_string(GroundTruthKind k);
std::string to_string(GammaParameterization g);
BehaviorType parse_behavior(std::string_view text);
GroundTruthKind parse_ground_truth_kind(std::string_view text);
GammaParameterization parse_gamma_parameterization(std::string_view text);

struct SimulationConfig {
  int n_objects = 150;
  int n_annotators = 25;
  int n_labels = 5;
  double spamminess_ratio = 0.2;
  BehaviorType behavior = BehaviorType::mixed;
  std::uint64_t seed = 0;
  GroundTruthKind ground_truth_kind = GroundTruthKind::beta_categorical;
  // Gamma(10, 5) on the annotator precision, gaussian_ordinal only.
  double precision_shape = 10.0;
  double precision_param = 5.0;
  GammaParameterization gamma_parameterization = GammaParameterization::shape_rate;

  void validate() const;
};

// Per-annotator generator parameters.
struct Population {
  std::vector<double> epsilons;
  std::vector<int> repeated_bias;
  // Empty unless gaussian_ordinal.
  std::vector<double> precisions;
};

// Record of one (object, annotator) draw. `truth_label` is drawn for every
// pair; `irregular_label` and `behavior_used` are meaningful only when
// `reliable` is false.
struct LatentDraw {
  bool reliable = true;
  int truth_label = 1;
  int irregular_label = 0;
  BehaviorType behavior_used = BehaviorType::random;
};

struct SimulatedWorld {
  SimulationConfig config;
  // beta_categorical: per-object true distribution. Empty otherwise.
  std::vector<GroundTruthDistribution> truths;
  // gaussian_ordinal: per-object continuous truth. Empty otherwise.
  std::vector<double> true_values;
  Population population;
  AnnotationSet annotations;
  // Aligned with annotations.annotations().
  std::vector<LatentDraw> latent_draws;
};

// Mass of a Beta(alpha, beta) density on N equal-width bins of [0,1].
GroundTruthDistribution beta_bin_masses(double alpha, double beta, int n_labels);

// alpha, beta ~ Uniform[1,10], then beta_bin_masses.
GroundTruthDistribution gen_beta_categorical(int n_labels, Rng& rng);

// round(ratio * S), halves away from zero.
int spammer_count(int n_annotators, double ratio);

// spammer_count annotators get epsilon ~ U[0, 0.5), the rest U[0.5, 1).
// Spammer positions are shuffled.
std::vector<double> gen_annotator_epsilons(int n_annotators, double ratio, Rng& rng);

struct IrregularDraw {
  int label = 1;
  BehaviorType behavior_used = BehaviorType::random;
};

IrregularDraw draw_irregular(BehaviorType behavior, int truth_label, int bias, int n_labels, Rng& rng);
int irregular_label(BehaviorType behavior, int truth_label, int bias, int n_labels, Rng& rng);

// Irregular label implied by a non-random behavior (used to replay draws).
int replay_irregular(BehaviorType behavior_used, int truth_label, int bias, int n_labels);

double sample_precision(const SimulationConfig& config, Rng& rng);

// round(Normal(value, variance 1/precision)), clipped to [1, N]. An infinite
// precision yields round(value) clipped.
int ordinal_label(double value, double precision, int n_labels, Rng& rng);

Population gen_population(const SimulationConfig& config, Rng& rng);

// Crossed design: every annotator labels every object. Exactly one of
// `truths` (categorical) or `true_values` (ordinal) is used, per the kind.
SimulatedWorld draw_labels(const SimulationConfig& config, std::vector<GroundTruthDistribution> truths,
                           std::vector<double> true_values, Population population, Rng& rng);

SimulatedWorld gen_gaussian_ordinal_world(const SimulationConfig& config, Rng& rng);

SimulatedWorld simulate(const SimulationConfig& config, Rng& rng);

// Seeds a fresh generator from config.seed.
SimulatedWorld simulate(const SimulationConfig& config);

std::string object_name(int e);
std::string annotator_name(int s);

}  // namespace crowd
