#pragma once

#include <span>
#include <vector>

namespace crowd {

enum class F1Average { macro, micro };

double classification_accuracy(std::span<const int> truth, std::span<const int> predicted);

// Positive class is `true`. Returns 0 when precision + recall is 0.
double f1_binary(const std::vector<bool>& truth, const std::vector<bool>& predicted);

// Macro: unweighted mean of one-vs-rest F1 over the classes present in
// `truth`. Micro: pooled counts over all classes (equals accuracy for
// single-label data).
double f1_multiclass(std::span<const int> truth, std::span<const int> predicted, int n_labels,
                     F1Average average = F1Average::macro);
double f1_macro(std::span<const int> truth, std::span<const int> predicted, int n_labels);

// Pearson correlation. Throws UndefinedCorrelationError on constant input.
double plcc(std::span<const double> x, std::span<const double> y);

// Spearman: Pearson on average ranks.
double srocc(std::span<const double> x, std::span<const double> y);

// 1-based ranks; ties share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> x);

double rmse(std::span<const double> x, std::span<const double> y);

double hellinger(std::span<const double> p, std::span<const double> q);

// Mean per-row Hellinger distance between two equally-shaped row sets.
double mean_hellinger(const std::vector<std::vector<double>>& p, const std::vector<std::vector<double>>& q);

// RMSE over all entries of two equally-shaped row sets, flattened.
double flattened_rmse(const std::vector<std::vector<double>>& p, const std::vector<std::vector<double>>& q);

}  // namespace crowd
