#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pugraph/error.hpp"

namespace pugraph {

// estimated: reference labels are the observed s; defacto: the true y.
enum class MetricVariant { estimated, defacto };

inline const char* to_string(MetricVariant v) { return v == MetricVariant::estimated ? "estimated" : "defacto"; }

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double puf1 = 0.0;  // recall^2 / Pr(yhat = 1); 0 without positive predictions
  double positive_prediction_rate = 0.0;
  MetricVariant variant = MetricVariant::estimated;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  bool operator==(const MetricsReport&) const = default;
};

inline constexpr const char* kMetricNames[] = {"precision", "recall", "f1", "puf1"};

// Metric by name, in kMetricNames order.
inline double metric_value(const MetricsReport& r, std::size_t index) {
  switch (index) {
    case 0: return r.precision;
    case 1: return r.recall;
    case 2: return r.f1;
    case 3: return r.puf1;
  }
  throw ConfigError("metric", "unknown metric index " + std::to_string(index));
}

// Counts and ratios of `predictions` against `reference`. Precision is 0
// without positive predictions, recall is 0 without reference positives.
inline MetricsReport standard_metrics(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> reference,
                                      MetricVariant variant = MetricVariant::estimated) {
  if (predictions.size() != reference.size()) {
    throw DimensionError("predictions (" + std::to_string(predictions.size()) + ") and reference labels (" +
                         std::to_string(reference.size()) + ") differ in length");
  }
  MetricsReport r;
  r.variant = variant;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i] != 0, t = reference[i] != 0;
    if (p && t) ++r.tp;
    else if (p) ++r.fp;
    else if (t) ++r.fn;
    else ++r.tn;
  }
  const auto tp = static_cast<double>(r.tp);
  const double predicted = tp + static_cast<double>(r.fp);
  const double actual = tp + static_cast<double>(r.fn);
  r.precision = predicted > 0.0 ? tp / predicted : 0.0;
  r.recall = actual > 0.0 ? tp / actual : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  if (!predictions.empty()) r.positive_prediction_rate = predicted / static_cast<double>(predictions.size());
  // From counts with a single division, so fixtures like 0.8^2 / 0.4 come out exact.
  if (predicted > 0.0 && actual > 0.0) {
    r.puf1 = tp * tp * static_cast<double>(predictions.size()) / (actual * actual * predicted);
  }
  return r;
}

// PU-estimable F1 surrogate: recall measured on the labeled positives,
// squared, over the fraction of points predicted positive.
inline double puf1(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> s) {
  if (predictions.size() != s.size()) throw DimensionError("predictions and labels differ in length");
  if (predictions.empty()) throw UndefinedMetricError("PUF1 needs at least one prediction");
  std::size_t labeled = 0, hit = 0, predicted = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    labeled += s[i] != 0;
    hit += s[i] != 0 && predictions[i] != 0;
    predicted += predictions[i] != 0;
  }
  if (labeled == 0) throw UndefinedMetricError("PUF1 needs at least one labeled positive");
  if (predicted == 0) return 0.0;
  const auto h = static_cast<double>(hit), l = static_cast<double>(labeled);
  return h * h * static_cast<double>(s.size()) / (l * l * static_cast<double>(predicted));
}

// Same predictions scored against s (estimated) and against y (defacto).
inline std::pair<MetricsReport, MetricsReport> estimated_vs_defacto(std::span<const std::uint8_t> predictions,
                                                                    std::span<const std::uint8_t> s,
                                                                    const std::optional<std::vector<std::uint8_t>>& y) {
  if (!y) throw UndefinedMetricError("defacto metrics need true labels y");
  return {standard_metrics(predictions, s, MetricVariant::estimated),
          standard_metrics(predictions, *y, MetricVariant::defacto)};
}

}  // namespace pugraph
