#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "geoprobe/errors.hpp"

namespace geoprobe {

namespace metric_detail {

inline void check_sizes(std::size_t preds, std::size_t targets) {
  if (preds != targets) throw DimensionMismatch(targets, preds);
  if (targets == 0) throw EmptyInput("metric over no examples");
}

}  // namespace metric_detail

/// 100 * correct / total.
template <typename T>
double metric_accuracy(const std::vector<T>& preds, const std::vector<T>& targets) {
  metric_detail::check_sizes(preds.size(), targets.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == targets[i];
  return 100.0 * static_cast<double>(correct) / static_cast<double>(preds.size());
}

struct MapeResult {
  double value = 0.0;          // percent
  std::size_t used = 0;
  std::size_t excluded = 0;    // rows with a zero target
};

/// 100 * mean(|pred - y| / |y|) over rows with y != 0.
inline MapeResult metric_mape(const std::vector<double>& preds, const std::vector<double>& targets) {
  metric_detail::check_sizes(preds.size(), targets.size());
  MapeResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (targets[i] == 0.0) {
      ++r.excluded;
      continue;
    }
    sum += std::abs(preds[i] - targets[i]) / std::abs(targets[i]);
    ++r.used;
  }
  if (r.used == 0) throw EmptyInput("MAPE needs at least one non-zero target");
  r.value = 100.0 * sum / static_cast<double>(r.used);
  return r;
}

/// sqrt(mean((pred - y)^2)); multi-dimensional targets are passed flattened.
inline double metric_rmse(const std::vector<double>& preds, const std::vector<double>& targets) {
  metric_detail::check_sizes(preds.size(), targets.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += (preds[i] - targets[i]) * (preds[i] - targets[i]);
  return std::sqrt(sum / static_cast<double>(preds.size()));
}

/// |top-k ∩ relevant| / k for one query.
inline double precision_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& relevant,
                             std::size_t k) {
  if (k == 0) throw ConfigError("k must be positive");
  if (retrieved.size() < k) throw DataError("fewer than k retrieved items");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += relevant.count(retrieved[i]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

/// Mean P@k over queries.
inline double metric_precision_at_k(const std::vector<std::vector<std::string>>& retrieved,
                                    const std::vector<std::set<std::string>>& relevant, std::size_t k) {
  metric_detail::check_sizes(retrieved.size(), relevant.size());
  double sum = 0.0;
  for (std::size_t q = 0; q < retrieved.size(); ++q) sum += precision_at_k(retrieved[q], relevant[q], k);
  return sum / static_cast<double>(retrieved.size());
}

}  // namespace geoprobe
