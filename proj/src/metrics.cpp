#include "crowd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "crowd/errors.hpp"

namespace crowd {

namespace {

template <typename A, typename B>
void require_same_length(const A& a, const B& b, std::size_t min_len) {
  if (a.size() != b.size()) {
    throw InputError("length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.size() < min_len) throw InputError("need at least " + std::to_string(min_len) + " values");
}

double f1_from_counts(double tp, double fp, double fn) {
  const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double classification_accuracy(std::span<const int> truth, std::span<const int> predicted) {
  require_same_length(truth, predicted, 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double f1_binary(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
  require_same_length(truth, predicted, 1);
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] && truth[i]) ++tp;
    else if (predicted[i]) ++fp;
    else if (truth[i]) ++fn;
  }
  return f1_from_counts(tp, fp, fn);
}

double f1_multiclass(std::span<const int> truth, std::span<const int> predicted, int n_labels,
                     F1Average average) {
  require_same_length(truth, predicted, 1);
  std::vector<double> tp(static_cast<std::size_t>(n_labels) + 1), fp(tp.size()), fn(tp.size());
  std::vector<bool> present(tp.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if (t < 1 || t > n_labels || p < 1 || p > n_labels) throw InputError("label outside 1..N");
    present[static_cast<std::size_t>(t)] = true;
    if (t == p) {
      ++tp[static_cast<std::size_t>(t)];
    } else {
      ++fn[static_cast<std::size_t>(t)];
      ++fp[static_cast<std::size_t>(p)];
    }
  }
  if (average == F1Average::micro) {
    const auto sum = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
    return f1_from_counts(sum(tp), sum(fp), sum(fn));
  }
  double total = 0.0;
  int classes = 0;
  for (std::size_t c = 1; c < tp.size(); ++c) {
    if (!present[c]) continue;
    total += f1_from_counts(tp[c], fp[c], fn[c]);
    ++classes;
  }
  return total / classes;
}

double f1_macro(std::span<const int> truth, std::span<const int> predicted, int n_labels) {
  return f1_multiclass(truth, predicted, n_labels, F1Average::macro);
}

double plcc(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 2);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("correlation of a constant sequence");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    // positions i..j (0-based) share rank mean(i+1..j+1)
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double srocc(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 2);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return plcc(rx, ry);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(sum / static_cast<double>(x.size()));
}

double hellinger(std::span<const double> p, std::span<const double> q) {
  require_same_length(p, q, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(std::max(p[i], 0.0)) - std::sqrt(std::max(q[i], 0.0));
    sum += d * d;
  }
  return std::min(std::sqrt(sum / 2.0), 1.0);
}

double mean_hellinger(const std::vector<std::vector<double>>& p, const std::vector<std::vector<double>>& q) {
  require_same_length(p, q, 1);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += hellinger(p[i], q[i]);
  return total / static_cast<double>(p.size());
}

double flattened_rmse(const std::vector<std::vector<double>>& p, const std::vector<std::vector<double>>& q) {
  require_same_length(p, q, 1);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < p.size(); ++i) {
    require_same_length(p[i], q[i], 1);
    a.insert(a.end(), p[i].begin(), p[i].end());
    b.insert(b.end(), q[i].begin(), q[i].end());
  }
  return rmse(a, b);
}

}  // namespace crowd
