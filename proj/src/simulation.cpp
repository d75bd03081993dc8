#include "crowd/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "crowd/errors.hpp"

namespace crowd {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

int draw_categorical(const GroundTruthDistribution& theta, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cumulative = 0.0;
  int last_positive = 1;
  for (std::size_t n = 0; n < theta.size(); ++n) {
    if (theta[n] <= 0.0) continue;
    last_positive = static_cast<int>(n) + 1;
    cumulative += theta[n];
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

int uniform_label(int n_labels, Rng& rng) {
  return std::uniform_int_distribution<int>(1, n_labels)(rng);
}

}  // namespace

std::string to_string(BehaviorType b) {
  switch (b) {
    case BehaviorType::random: return "random";
    case BehaviorType::repeated: return "repeated";
    case BehaviorType::inverted: return "inverted";
    case BehaviorType::mixed: return "mixed";
  }
  return "unknown";
}

std::string to_string(GroundTruthKind k) {
  return k == GroundTruthKind::gaussian_ordinal ? "gaussian_ordinal" : "beta_categorical";
}

std::string to_string(GammaParameterization g) {
  return g == GammaParameterization::shape_scale ? "shape_scale" : "shape_rate";
}

BehaviorType parse_behavior(std::string_view text) {
  if (text == "random") return BehaviorType::random;
  if (text == "repeated") return BehaviorType::repeated;
  if (text == "inverted") return BehaviorType::inverted;
  if (text == "mixed") return BehaviorType::mixed;
  throw InputError("unknown behavior '" + std::string(text) + "'");
}

GroundTruthKind parse_ground_truth_kind(std::string_view text) {
  if (text == "beta_categorical") return GroundTruthKind::beta_categorical;
  if (text == "gaussian_ordinal") return GroundTruthKind::gaussian_ordinal;
  throw InputError("unknown ground truth kind '" + std::string(text) + "'");
}

GammaParameterization parse_gamma_parameterization(std::string_view text) {
  if (text == "shape_rate") return GammaParameterization::shape_rate;
  if (text == "shape_scale") return GammaParameterization::shape_scale;
  throw InputError("unknown gamma parameterization '" + std::string(text) + "'");
}

void SimulationConfig::validate() const {
  if (n_objects < 1 || n_annotators < 1) throw InputError("simulation sizes must be positive");
  if (n_labels < 2) throw InputError("simulation needs at least 2 labels");
  if (!(spamminess_ratio >= 0.0 && spamminess_ratio <= 1.0)) throw InputError("spamminess ratio outside [0,1]");
  if (!(precision_shape > 0.0 && precision_param > 0.0)) throw InputError("gamma parameters must be positive");
}

GroundTruthDistribution beta_bin_masses(double alpha, double beta, int n_labels) {
  if (n_labels < 2) throw InputError("need at least 2 labels");
  if (!(alpha > 0.0 && beta > 0.0)) throw InputError("beta parameters must be positive");
  GroundTruthDistribution theta(idx(n_labels));
  double previous = 0.0;
  for (int k = 1; k <= n_labels; ++k) {
    const double upper = k == n_labels ? 1.0 : boost::math::ibeta(alpha, beta, static_cast<double>(k) / n_labels);
    theta[idx(k - 1)] = std::max(upper - previous, 0.0);
    previous = upper;
  }
  double total = 0.0;
  for (double v : theta) total += v;
  for (double& v : theta) v /= total;
  return theta;
}

GroundTruthDistribution gen_beta_categorical(int n_labels, Rng& rng) {
  std::uniform_real_distribution<double> shape(1.0, 10.0);
  const double alpha = shape(rng);
  const double beta = shape(rng);
  return beta_bin_masses(alpha, beta, n_labels);
}

int spammer_count(int n_annotators, double ratio) {
  return static_cast<int>(std::lround(ratio * n_annotators));
}

std::vector<double> gen_annotator_epsilons(int n_annotators, double ratio, Rng& rng) {
  const int spammers = spammer_count(n_annotators, ratio);
  std::vector<double> eps(idx(n_annotators));
  std::uniform_real_distribution<double> low(0.0, 0.5), high(0.5, 1.0);
  for (int s = 0; s < n_annotators; ++s) eps[idx(s)] = s < spammers ? low(rng) : high(rng);
  std::shuffle(eps.begin(), eps.end(), rng);
  return eps;
}

IrregularDraw draw_irregular(BehaviorType behavior, int truth_label, int bias, int n_labels, Rng& rng) {
  if (behavior == BehaviorType::mixed) {
    static constexpr BehaviorType kParts[] = {BehaviorType::random, BehaviorType::repeated,
                                              BehaviorType::inverted};
    behavior = kParts[std::uniform_int_distribution<int>(0, 2)(rng)];
  }
  if (behavior == BehaviorType::random) return {uniform_label(n_labels, rng), behavior};
  return {replay_irregular(behavior, truth_label, bias, n_labels), behavior};
}

int irregular_label(BehaviorType behavior, int truth_label, int bias, int n_labels, Rng& rng) {
  return draw_irregular(behavior, truth_label, bias, n_labels, rng).label;
}

int replay_irregular(BehaviorType behavior_used, int truth_label, int bias, int n_labels) {
  switch (behavior_used) {
    case BehaviorType::repeated: return bias;
    case BehaviorType::inverted: return n_labels - truth_label + 1;
    default: throw InputError("behavior '" + to_string(behavior_used) + "' cannot be replayed deterministically");
  }
}

double sample_precision(const SimulationConfig& config, Rng& rng) {
  const double scale = config.gamma_parameterization == GammaParameterization::shape_rate
                           ? 1.0 / config.precision_param
                           : config.precision_param;
  return std::gamma_distribution<double>(config.precision_shape, scale)(rng);
}

int ordinal_label(double value, double precision, int n_labels, Rng& rng) {
  double draw = value;
  if (std::isfinite(precision)) {
    draw = std::normal_distribution<double>(value, 1.0 / std::sqrt(precision))(rng);
  }
  const long rounded = std::lround(draw);
  return static_cast<int>(std::clamp<long>(rounded, 1, n_labels));
}

Population gen_population(const SimulationConfig& config, Rng& rng) {
  Population pop;
  pop.epsilons = gen_annotator_epsilons(config.n_annotators, config.spamminess_ratio, rng);
  pop.repeated_bias.resize(idx(config.n_annotators));
  for (auto& b : pop.repeated_bias) b = uniform_label(config.n_labels, rng);
  if (config.ground_truth_kind == GroundTruthKind::gaussian_ordinal) {
    pop.precisions.resize(idx(config.n_annotators));
    for (auto& p : pop.precisions) p = sample_precision(config, rng);
  }
  return pop;
}

SimulatedWorld draw_labels(const SimulationConfig& config, std::vector<GroundTruthDistribution> truths,
                           std::vector<double> true_values, Population population, Rng& rng) {
  config.validate();
  const bool ordinal = config.ground_truth_kind == GroundTruthKind::gaussian_ordinal;
  const auto n_obj = idx(config.n_objects);
  const auto n_ann = idx(config.n_annotators);
  if ((ordinal ? true_values.size() : truths.size()) != n_obj) throw InputError("truth count != n_objects");
  if (population.epsilons.size() != n_ann || population.repeated_bias.size() != n_ann ||
      (ordinal && population.precisions.size() != n_ann)) {
    throw InputError("population size != n_annotators");
  }

  SimulatedWorld world;
  world.config = config;
  std::vector<Annotation> annotations;
  annotations.reserve(n_obj * n_ann);
  world.latent_draws.reserve(n_obj * n_ann);

  for (int e = 0; e < config.n_objects; ++e) {
    for (int s = 0; s < config.n_annotators; ++s) {
      LatentDraw draw;
      draw.reliable = std::bernoulli_distribution(population.epsilons[idx(s)])(rng);
      draw.truth_label = ordinal
                             ? ordinal_label(true_values[idx(e)], population.precisions[idx(s)], config.n_labels, rng)
                             : draw_categorical(truths[idx(e)], rng);
      int label = draw.truth_label;
      if (!draw.reliable) {
        const auto irregular =
            draw_irregular(config.behavior, draw.truth_label, population.repeated_bias[idx(s)], config.n_labels, rng);
        draw.irregular_label = irregular.label;
        draw.behavior_used = irregular.behavior_used;
        label = irregular.label;
      }
      annotations.push_back({e, s, label});
      world.latent_draws.push_back(draw);
    }
  }

  std::vector<std::string> objects, annotators;
  for (int e = 0; e < config.n_objects; ++e) objects.push_back(object_name(e));
  for (int s = 0; s < config.n_annotators; ++s) annotators.push_back(annotator_name(s));
  world.annotations = AnnotationSet(std::move(annotations), config.n_labels, std::move(objects), std::move(annotators));
  world.truths = std::move(truths);
  world.true_values = std::move(true_values);
  world.population = std::move(population);
  return world;
}

SimulatedWorld gen_gaussian_ordinal_world(const SimulationConfig& config, Rng& rng) {
  config.validate();
  if (config.ground_truth_kind != GroundTruthKind::gaussian_ordinal) {
    throw InputError("gen_gaussian_ordinal_world needs ground_truth_kind = gaussian_ordinal");
  }
  std::uniform_real_distribution<double> value(1.0, static_cast<double>(config.n_labels));
  std::vector<double> values(idx(config.n_objects));
  for (auto& v : values) v = value(rng);
  auto population = gen_population(config, rng);
  return draw_labels(config, {}, std::move(values), std::move(population), rng);
}

SimulatedWorld simulate(const SimulationConfig& config, Rng& rng) {
  config.validate();
  if (config.ground_truth_kind == GroundTruthKind::gaussian_ordinal) return gen_gaussian_ordinal_world(config, rng);
  std::vector<GroundTruthDistribution> truths;
  truths.reserve(idx(config.n_objects));
  for (int e = 0; e < config.n_objects; ++e) truths.push_back(gen_beta_categorical(config.n_labels, rng));
  auto population = gen_population(config, rng);
  return draw_labels(config, std::move(truths), {}, std::move(population), rng);
}

SimulatedWorld simulate(const SimulationConfig& config) {
  Rng rng(config.seed);
  return simulate(config, rng);
}

std::string object_name(int e) { return "o" + std::to_string(e + 1); }
std::string annotator_name(int s) { return "a" + std::to_string(s + 1); }

}  // namespace crowd
