#include "doctest.h"

#include <cmath>
#include <random>

#include "crowd/errors.hpp"
#include "crowd/prediction.hpp"

using namespace crowd;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (auto& v : p) sum += (v = ex(rng));
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace

TEST_CASE("predict_continuous") {
  CHECK(predict_continuous(std::vector<double>{0, 0, 0, 0, 1}) == doctest::Approx(5.0));
  CHECK(predict_continuous(std::vector<double>{0.5, 0, 0, 0, 0.5}) == doctest::Approx(3.0));
  CHECK(predict_continuous(std::vector<double>{0.1, 0.2, 0.3, 0.2, 0.2}) == doctest::Approx(3.2).epsilon(1e-12));
}

TEST_CASE("predict_discrete with tie-break") {
  CHECK(predict_discrete(std::vector<double>{0.1, 0.7, 0.2}) == 2);
  CHECK(predict_discrete(std::vector<double>{0.5, 0.5, 0.0}) == 1);
  CHECK(predict_discrete(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == 1);
}

TEST_CASE("classify_spammers") {
  const std::vector<double> eps = {0.9, 0.49, 0.5};
  CHECK(classify_spammers(std::span<const double>(eps)) == std::vector<bool>{false, true, false});
  const std::vector<double> ones(4, 1.0);
  CHECK(classify_spammers(std::span<const double>(ones)) == std::vector<bool>(4, false));
  const std::vector<AnnotatorProfile> profiles = {{0.5, {0.5, 0.5}}, {0.2, {0.5, 0.5}}};
  CHECK(classify_spammers(std::span<const AnnotatorProfile>(profiles)) == std::vector<bool>{false, true});
}

TEST_CASE("spamminess_ratio") {
  CHECK(spamminess_ratio({true, false, false, false, false}) == doctest::Approx(0.2));
  CHECK(spamminess_ratio({false, false}) == 0.0);
  std::vector<bool> flags(103, false);
  for (int i = 0; i < 27; ++i) flags[static_cast<std::size_t>(i)] = true;
  CHECK(spamminess_ratio(flags) == doctest::Approx(0.2621).epsilon(1e-4));
  CHECK_THROWS_AS(spamminess_ratio({}), InputError);
}

TEST_CASE("task_difficulty") {
  CHECK(task_difficulty(std::vector<double>{0, 1, 0}) == 0.0);
  CHECK(task_difficulty(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(task_difficulty(std::vector<double>{0.5, 0.5, 0, 0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("prediction bounds on random simplices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto theta = random_simplex(rng, n);
    const double v = predict_continuous(theta);
    CHECK(v >= 1.0);
    CHECK(v <= n);
    const int mode = predict_discrete(theta);
    for (double t : theta) CHECK(theta[static_cast<std::size_t>(mode - 1)] >= t);
    const double h = task_difficulty(theta);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(n) + 1e-12);
  }
}

TEST_CASE("point masses hit the bounds exactly") {
  for (int n = 2; n <= 6; ++n) {
    for (int k = 1; k <= n; ++k) {
      std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
      theta[static_cast<std::size_t>(k - 1)] = 1.0;
      CHECK(predict_continuous(theta) == doctest::Approx(k));
      CHECK(predict_discrete(theta) == k);
      CHECK(task_difficulty(theta) == 0.0);
    }
    CHECK(task_difficulty(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n)) ==
          doctest::Approx(std::log(n)).epsilon(1e-9));
  }
}

TEST_CASE("unique maximum placed by construction is returned") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    auto theta = random_simplex(rng, n);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    theta[static_cast<std::size_t>(k - 1)] += 1.0;
    for (auto& v : theta) v /= 2.0;
    CHECK(predict_discrete(theta) == k);
  }
}

TEST_CASE("raising the spammer threshold never unflags") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> eps(50);
  for (auto& e : eps) e = u(rng);
  for (double t = 0.0; t < 1.0; t += 0.05) {
    const auto lo = classify_spammers(std::span<const double>(eps), t);
    const auto hi = classify_spammers(std::span<const double>(eps), t + 0.05);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK((!lo[i] || hi[i]));
  }
}
