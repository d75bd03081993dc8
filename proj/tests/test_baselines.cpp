#include "doctest.h"

#include <random>

#include "crowd/baselines.hpp"
#include "crowd/errors.hpp"
#include "crowd/prediction.hpp"
#include "test_support.hpp"

using namespace crowd;

namespace {

// One object, one annotation per label.
AnnotationSet one_object(const std::vector<int>& labels, int n_labels) {
  std::vector<Annotation> anns;
  std::vector<std::string> annotators;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    anns.push_back({0, static_cast<int>(i), labels[i]});
    annotators.push_back("a" + std::to_string(i));
  }
  return AnnotationSet(std::move(anns), n_labels, {"o1"}, annotators);
}

}  // namespace

TEST_CASE("majority_vote") {
  CHECK(majority_vote(one_object({1, 1, 2}, 3))[0] == 1);
  CHECK(majority_vote(one_object({1, 2}, 3))[0] == 1);
  CHECK(majority_vote(one_object({3, 3, 3}, 3))[0] == 3);
}

TEST_CASE("mean_label") {
  CHECK(mean_label(one_object({1, 2, 3}, 5))[0] == doctest::Approx(2.0));
  CHECK(mean_label(one_object({5, 5}, 5))[0] == doctest::Approx(5.0));
  CHECK(mean_label(one_object({1, 1, 2, 5}, 5))[0] == doctest::Approx(2.25));
}

TEST_CASE("median_label") {
  CHECK(median_label(one_object({1, 2, 9}, 9))[0] == doctest::Approx(2.0));
  CHECK(median_label(one_object({1, 2, 3, 4}, 4))[0] == doctest::Approx(2.5));
  CHECK(median_label(one_object({4, 4, 4, 4}, 4))[0] == doctest::Approx(4.0));
}

TEST_CASE("observed_distribution") {
  const auto d = observed_distribution(one_object({1, 1, 2}, 2))[0];
  CHECK(d[0] == doctest::Approx(2.0 / 3.0));
  CHECK(d[1] == doctest::Approx(1.0 / 3.0));
  CHECK(observed_distribution(one_object({2, 2}, 3))[0] == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(observed_distribution(one_object({3}, 5))[0] == std::vector<double>{0, 0, 1, 0, 0});
}

TEST_CASE("uncovered object") {
  const AnnotationSet data({{0, 0, 1}}, 2, {"o1", "o2"}, {"a1"});
  CHECK_THROWS_AS(majority_vote(data), CoverageError);
  CHECK_THROWS_AS(mean_label(data), CoverageError);
  CHECK_THROWS_AS(median_label(data), CoverageError);
  CHECK_THROWS_AS(observed_distribution(data), CoverageError);
}

TEST_CASE("baseline outputs stay in range and majority agrees with the observed mode") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto data = testing::random_instance(rng, 30, 7, n, 0.5);
    const auto maj = majority_vote(data);
    const auto mean = mean_label(data);
    const auto med = median_label(data);
    const auto obs = observed_distribution(data);
    for (int e = 0; e < data.n_objects(); ++e) {
      const auto i = static_cast<std::size_t>(e);
      CHECK(maj[i] == predict_discrete(obs[i]));
      CHECK(mean[i] >= 1.0);
      CHECK(mean[i] <= n);
      CHECK(med[i] >= 1.0);
      CHECK(med[i] <= n);
      CHECK(mean[i] == doctest::Approx(predict_continuous(obs[i])).epsilon(1e-12));
    }
  }
}
