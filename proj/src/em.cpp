#include "crowd/em.hpp"

#include <algorithm>
#include <cmath>

#include "crowd/errors.hpp"

namespace crowd {

namespace {

double floored_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

GroundTruthDistribution empirical_fractions(const AnnotationSet& data, int e) {
  const auto counts = data.label_counts(e);
  const auto total = data.annotators_of(e).size();
  GroundTruthDistribution theta(counts.size());
  for (std::size_t n = 0; n < counts.size(); ++n) {
    theta[n] = static_cast<double>(counts[n]) / static_cast<double>(total);
  }
  return theta;
}

void require_coverage(const AnnotationSet& data) {
  if (data.empty()) throw CoverageError("no annotations");
  for (int e = 0; e < data.n_objects(); ++e) {
    if (data.annotators_of(e).empty()) {
      throw CoverageError("object '" + data.object_names()[idx(e)] + "' has no annotations");
    }
  }
}

}  // namespace

std::string to_string(PiMode mode) {
  return mode == PiMode::learned ? "learned" : "fixed_uniform";
}

PiMode parse_pi_mode(std::string_view text) {
  if (text == "fixed_uniform") return PiMode::fixed_uniform;
  if (text == "learned") return PiMode::learned;
  throw InputError("unknown pi mode '" + std::string(text) + "'");
}

void FitConfig::validate() const {
  if (!(convergence_threshold > 0.0)) throw InputError("convergence threshold must be positive");
  if (max_iterations < 1) throw InputError("max iterations must be positive");
  if (!(epsilon_init >= 0.0 && epsilon_init <= 1.0)) throw InputError("epsilon_init outside [0,1]");
}

void ModelState::validate() const {
  for (const auto& row : theta) {
    if (static_cast<int>(row.size()) != n_labels) throw ValidationError("theta row has wrong length");
    check_simplex(row, kSimplexTolerance, "theta row");
  }
  for (const auto& p : profiles) check_profile(p, n_labels);
}

ModelState initialize(const AnnotationSet& data, const FitConfig& config) {
  config.validate();
  require_coverage(data);
  const int n = data.n_labels();
  ModelState state;
  state.n_labels = n;
  state.theta.reserve(idx(data.n_objects()));
  for (int e = 0; e < data.n_objects(); ++e) state.theta.push_back(empirical_fractions(data, e));
  state.profiles.assign(idx(data.n_annotators()),
                        AnnotatorProfile{config.epsilon_init, std::vector<double>(idx(n), 1.0 / n)});
  return state;
}

EmIterationState e_step(const ModelState& state, const AnnotationSet& data) {
  EmIterationState iter;
  const auto annotations = data.annotations();
  iter.responsibilities.resize(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& a = annotations[i];
    const auto r = idx(a.label - 1);
    const auto& profile = state.profiles[idx(a.annotator)];
    const double truth = profile.epsilon * state.theta[idx(a.object)][r];
    const double irregular = (1.0 - profile.epsilon) * profile.pi[r];
    const double mu = truth / std::max(truth + irregular, kProbabilityFloor);
    iter.responsibilities[i] = std::clamp(mu, 0.0, 1.0);
  }

  iter.lambda_e.assign(idx(data.n_objects()), 0.0);
  iter.lambda_s.assign(idx(data.n_annotators()), 0.0);
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const double mu = iter.responsibilities[i];
    iter.lambda_e[idx(annotations[i].object)] -= mu;
    iter.lambda_s[idx(annotations[i].annotator)] -= 1.0 - mu;
  }
  iter.q_value = q_value(state, iter, data);
  return iter;
}

ModelState m_step(const EmIterationState& iter, const AnnotationSet& data, const FitConfig& config) {
  const int n = data.n_labels();
  const auto annotations = data.annotations();
  if (iter.responsibilities.size() != annotations.size()) {
    throw InputError("responsibilities do not match the annotation set");
  }
  const auto& mu = iter.responsibilities;

  ModelState next;
  next.n_labels = n;
  next.theta.resize(idx(data.n_objects()));
  for (int e = 0; e < data.n_objects(); ++e) {
    GroundTruthDistribution row(idx(n), 0.0);
    double total = 0.0;
    for (int entry : data.object_entries(e)) {
      const double m = mu[idx(entry)];
      row[idx(annotations[idx(entry)].label - 1)] += m;
      total += m;
    }
    if (total > 0.0) {
      for (double& v : row) v /= total;
    } else {
      row = empirical_fractions(data, e);
    }
    next.theta[idx(e)] = std::move(row);
  }

  next.profiles.resize(idx(data.n_annotators()));
  for (int s = 0; s < data.n_annotators(); ++s) {
    const auto entries = data.annotator_entries(s);
    auto& profile = next.profiles[idx(s)];
    profile.pi.assign(idx(n), 1.0 / n);
    if (entries.empty()) {
      profile.epsilon = config.epsilon_init;
      continue;
    }
    double reliable = 0.0;
    std::vector<double> irregular(idx(n), 0.0);
    double irregular_total = 0.0;
    for (int entry : entries) {
      const double m = mu[idx(entry)];
      reliable += m;
      irregular[idx(annotations[idx(entry)].label - 1)] += 1.0 - m;
      irregular_total += 1.0 - m;
    }
    profile.epsilon = std::clamp(reliable / static_cast<double>(entries.size()), 0.0, 1.0);
    if (config.pi_mode == PiMode::learned && irregular_total > 0.0) {
      for (std::size_t k = 0; k < irregular.size(); ++k) profile.pi[k] = irregular[k] / irregular_total;
    }
  }
  return next;
}

double log_likelihood(const ModelState& state, const AnnotationSet& data) {
  double total = 0.0;
  for (const auto& a : data.annotations()) {
    const auto r = idx(a.label - 1);
    const auto& profile = state.profiles[idx(a.annotator)];
    total += floored_log(profile.epsilon * state.theta[idx(a.object)][r] +
                         (1.0 - profile.epsilon) * profile.pi[r]);
  }
  return total;
}

double q_value(const ModelState& candidate, const EmIterationState& iter, const AnnotationSet& data) {
  const auto annotations = data.annotations();
  double total = 0.0;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& a = annotations[i];
    const auto r = idx(a.label - 1);
    const auto& profile = candidate.profiles[idx(a.annotator)];
    const double mu = iter.responsibilities[i];
    total += mu * (floored_log(profile.epsilon) + floored_log(candidate.theta[idx(a.object)][r]));
    total += (1.0 - mu) * (floored_log(1.0 - profile.epsilon) + floored_log(profile.pi[r]));
  }
  return total;
}

FitResult fit(const AnnotationSet& data, const FitConfig& config) {
  FitResult result;
  result.state = initialize(data, config);
  for (int i = 0; i < config.max_iterations; ++i) {
    const auto iter = e_step(result.state, data);
    result.state = m_step(iter, data, config);
    result.iterations = i + 1;
    result.log_likelihood_trace.push_back(log_likelihood(result.state, data));
    if (std::abs(q_value(result.state, iter, data) - iter.q_value) < config.convergence_threshold) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace crowd
