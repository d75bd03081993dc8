#pragma once

#include <vector>

#include "crowd/label_domain.hpp"

namespace crowd {

// Per-object aggregators. All throw CoverageError on an unannotated object.

// Most frequent label, ties toward the smallest index.
std::vector<int> majority_vote(const AnnotationSet& data);

// Mean of the observed label indices.
std::vector<double> mean_label(const AnnotationSet& data);

// Median of the observed label indices; an even count averages the two
// central values.
std::vector<double> median_label(const AnnotationSet& data);

// Empirical label fractions.
std::vector<GroundTruthDistribution> observed_distribution(const AnnotationSet& data);

}  // namespace crowd
