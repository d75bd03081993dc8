#include "crowd/baselines.hpp"

#include <algorithm>

#include "crowd/errors.hpp"

namespace crowd {

namespace {

std::vector<int> labels_of(const AnnotationSet& data, int e) {
  const auto entries = data.object_entries(e);
  if (entries.empty()) {
    throw CoverageError("object '" + data.object_names()[static_cast<std::size_t>(e)] + "' has no annotations");
  }
  std::vector<int> labels;
  labels.reserve(entries.size());
  for (int entry : entries) labels.push_back(data[static_cast<std::size_t>(entry)].label);
  return labels;
}

}  // namespace

std::vector<int> majority_vote(const AnnotationSet& data) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(data.n_objects()));
  for (int e = 0; e < data.n_objects(); ++e) {
    labels_of(data, e);
    const auto counts = data.label_counts(e);
    out.push_back(static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin()) + 1);
  }
  return out;
}

std::vector<double> mean_label(const AnnotationSet& data) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(data.n_objects()));
  for (int e = 0; e < data.n_objects(); ++e) {
    const auto labels = labels_of(data, e);
    double sum = 0.0;
    for (int l : labels) sum += l;
    out.push_back(sum / static_cast<double>(labels.size()));
  }
  return out;
}

std::vector<double> median_label(const AnnotationSet& data) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(data.n_objects()));
  for (int e = 0; e < data.n_objects(); ++e) {
    auto labels = labels_of(data, e);
    std::sort(labels.begin(), labels.end());
    const std::size_t m = labels.size() / 2;
    out.push_back(labels.size() % 2 == 1 ? labels[m] : 0.5 * (labels[m - 1] + labels[m]));
  }
  return out;
}

std::vector<GroundTruthDistribution> observed_distribution(const AnnotationSet& data) {
  std::vector<GroundTruthDistribution> out;
  out.reserve(static_cast<std::size_t>(data.n_objects()));
  for (int e = 0; e < data.n_objects(); ++e) {
    const auto total = static_cast<double>(labels_of(data, e).size());
    GroundTruthDistribution row;
    for (int c : data.label_counts(e)) row.push_back(c / total);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace crowd
