#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"

#include "flightgb/csv.hpp"
#include "flightgb/error.hpp"

namespace flightgb {

/// Rows are the actual class, columns the predicted class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fn + fp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const std::uint8_t> y_true,
                                 std::span<const std::uint8_t> y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error(Errc::LengthMismatch, "truth and prediction lengths differ");
  if (y_true.empty()) throw Error(Errc::EmptyInput, "confusion matrix of zero samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool actual = y_true[i] != 0;
    const bool predicted = y_pred[i] != 0;
    if (actual && predicted) ++cm.tp;
    else if (actual) ++cm.fn;
    else if (predicted) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

/// num / den, or 0 with `degenerate` raised when den == 0.
inline double safe_ratio(double num, double den, bool& degenerate) noexcept {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;
};

inline ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp), m.degenerate);
  m.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn), m.degenerate);
  m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall, m.degenerate);
  return m;
}

/// Accuracy plus positive-class and support-weighted precision/recall/F1.
struct MetricsReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  bool degenerate = false;  // some ratio had a zero denominator

  nlohmann::json to_json() const {
    return {{"confusion", {{"tp", confusion.tp}, {"fn", confusion.fn}, {"fp", confusion.fp}, {"tn", confusion.tn}}},
            {"accuracy", accuracy},
            {"precision", precision},
            {"recall", recall},
            {"f1", f1},
            {"weighted_precision", weighted_precision},
            {"weighted_recall", weighted_recall},
            {"weighted_f1", weighted_f1},
            {"degenerate", degenerate}};
  }
};

inline MetricsReport summarize(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(Errc::EmptyInput, "cannot summarize an empty confusion matrix");
  MetricsReport r;
  r.confusion = cm;
  const double n = static_cast<double>(cm.total());
  r.accuracy = static_cast<double>(cm.tp + cm.tn) / n;

  const ClassMetrics pos = class_metrics(cm.tp, cm.fp, cm.fn);
  const ClassMetrics neg = class_metrics(cm.tn, cm.fn, cm.fp);
  r.precision = pos.precision;
  r.recall = pos.recall;
  r.f1 = pos.f1;
  r.degenerate = pos.degenerate;

  const double w_pos = static_cast<double>(cm.tp + cm.fn) / n;
  const double w_neg = static_cast<double>(cm.tn + cm.fp) / n;
  r.weighted_precision = w_pos * pos.precision + w_neg * neg.precision;
  r.weighted_recall = w_pos * pos.recall + w_neg * neg.recall;
  r.weighted_f1 = w_pos * pos.f1 + w_neg * neg.f1;
  return r;
}

// ---------------------------------------------------------------------------

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // predict positive iff score >= threshold; +inf for the origin
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auroc = 0.0;
};

/// ROC over the distinct scores, swept from the highest down. Tied scores
/// form one point; the area is the trapezoidal sum over the points.
inline RocCurve roc_auc(std::span<const std::uint8_t> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size())
    throw Error(Errc::LengthMismatch, "truth and score lengths differ");
  const std::size_t n = y_true.size();
  std::size_t P = 0;
  for (auto v : y_true) P += v ? 1 : 0;
  const std::size_t N = n - P;
  if (P == 0 || N == 0) throw Error(Errc::SingleClassInput, "ROC needs both classes present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  double area2 = 0.0;  // twice the area, in (fp, tp) count units
  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    const std::size_t tp0 = tp, fp0 = fp;
    for (; i < n && scores[order[i]] == s; ++i) (y_true[order[i]] ? tp : fp) += 1;
    area2 += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0);
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(N),
                            static_cast<double>(tp) / static_cast<double>(P), s});
  }
  curve.auroc = area2 / (2.0 * static_cast<double>(P) * static_cast<double>(N));
  return curve;
}

/// threshold,fpr,tpr per line after a header; the origin's threshold is "inf".
inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points)
    out << (std::isinf(p.threshold) ? std::string("inf") : format_number(p.threshold)) << ','
        << format_number(p.fpr) << ',' << format_number(p.tpr) << '\n';
}

}  // namespace flightgb
