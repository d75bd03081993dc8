#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowd/label_domain.hpp"

namespace crowd {

// Floor applied inside every log and every responsibility denominator.
inline constexpr double kProbabilityFloor = 1e-12;

enum class PiMode { fixed_uniform, learned };

std::string to_string(PiMode mode);
PiMode parse_pi_mode(std::string_view text);

struct FitConfig {
  double convergence_threshold = 1e-4;
  int max_iterations = 1000;
  PiMode pi_mode = PiMode::fixed_uniform;
  double epsilon_init = 0.5;
  // Reserved for restart strategies; initialization is deterministic.
  std::optional<std::uint64_t> rng_seed;

  void validate() const;
};

// Full parameter bundle: one theta row per object, one profile per annotator.
struct ModelState {
  int n_labels = 0;
  std::vector<GroundTruthDistribution> theta;
  std::vector<AnnotatorProfile> profiles;

  void validate() const;
};

struct EmIterationState {
  // One responsibility per annotation, aligned with AnnotationSet::annotations().
  std::vector<double> responsibilities;
  // Q evaluated at the state that produced the responsibilities.
  double q_value = 0.0;
  std::vector<double> lambda_e;
  std::vector<double> lambda_s;
};

struct FitResult {
  ModelState state;
  int iterations = 0;
  bool converged = false;
  // Marginal log-likelihood after each iteration.
  std::vector<double> log_likelihood_trace;
};

// Empirical label fractions for theta, epsilon_init for every annotator,
// uniform pi. Throws CoverageError if an object has no annotations.
ModelState initialize(const AnnotationSet& data, const FitConfig& config);

// Posterior probability that each annotation came from the ground-truth
// component: eps*theta_r / (eps*theta_r + (1-eps)*pi_r).
EmIterationState e_step(const ModelState& state, const AnnotationSet& data);

// Closed-form maximizer of Q for fixed responsibilities. An object whose
// responsibilities are all zero keeps its empirical label fractions; under
// learned pi an annotator with no irregular mass gets uniform pi.
ModelState m_step(const EmIterationState& iter, const AnnotationSet& data, const FitConfig& config);

double log_likelihood(const ModelState& state, const AnnotationSet& data);

// Expected complete-data log-likelihood of `candidate` under the
// responsibilities in `iter`.
double q_value(const ModelState& candidate, const EmIterationState& iter, const AnnotationSet& data);

FitResult fit(const AnnotationSet& data, const FitConfig& config = {});

}  // namespace crowd
