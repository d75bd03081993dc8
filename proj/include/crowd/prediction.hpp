#pragma once

#include <span>
#include <vector>

#include "crowd/em.hpp"
#include "crowd/label_domain.hpp"

namespace crowd {

struct Prediction {
  int object = 0;
  int mode_label = 1;
  double expectation = 1.0;
  double entropy_nats = 0.0;
};

// Sum of n * theta_n over ordinal labels 1..N.
double predict_continuous(std::span<const double> theta);

// Argmax of theta; ties go to the smallest label index.
int predict_discrete(std::span<const double> theta);

// Shannon entropy in nats, 0 ln 0 = 0.
double task_difficulty(std::span<const double> theta);

// An annotator is a spammer iff epsilon < threshold (strict).
std::vector<bool> classify_spammers(std::span<const AnnotatorProfile> profiles, double threshold = 0.5);
std::vector<bool> classify_spammers(std::span<const double> epsilons, double threshold = 0.5);

double spamminess_ratio(const std::vector<bool>& flags);

std::vector<Prediction> predict_all(const ModelState& state);

}  // namespace crowd
