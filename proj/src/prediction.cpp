#include "crowd/prediction.hpp"

#include <algorithm>
#include <cmath>

#include "crowd/errors.hpp"

namespace crowd {

double predict_continuous(std::span<const double> theta) {
  double value = 0.0;
  for (std::size_t n = 0; n < theta.size(); ++n) value += static_cast<double>(n + 1) * theta[n];
  return value;
}

int predict_discrete(std::span<const double> theta) {
  if (theta.empty()) throw InputError("empty distribution");
  // max_element returns the first maximum.
  return static_cast<int>(std::max_element(theta.begin(), theta.end()) - theta.begin()) + 1;
}

double task_difficulty(std::span<const double> theta) {
  double h = 0.0;
  for (double p : theta) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

std::vector<bool> classify_spammers(std::span<const double> epsilons, double threshold) {
  std::vector<bool> flags(epsilons.size());
  for (std::size_t s = 0; s < epsilons.size(); ++s) flags[s] = epsilons[s] < threshold;
  return flags;
}

std::vector<bool> classify_spammers(std::span<const AnnotatorProfile> profiles, double threshold) {
  std::vector<double> eps;
  eps.reserve(profiles.size());
  for (const auto& p : profiles) eps.push_back(p.epsilon);
  return classify_spammers(std::span<const double>(eps), threshold);
}

double spamminess_ratio(const std::vector<bool>& flags) {
  if (flags.empty()) throw InputError("spamminess ratio of an empty annotator pool");
  const auto flagged = std::count(flags.begin(), flags.end(), true);
  return static_cast<double>(flagged) / static_cast<double>(flags.size());
}

std::vector<Prediction> predict_all(const ModelState& state) {
  std::vector<Prediction> out;
  out.reserve(state.theta.size());
  for (std::size_t e = 0; e < state.theta.size(); ++e) {
    const auto& row = state.theta[e];
    out.push_back({static_cast<int>(e), predict_discrete(row), predict_continuous(row), task_difficulty(row)});
  }
  return out;
}

}  // namespace crowd
