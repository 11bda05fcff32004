#pragma once

// Binary gradient boosting with the logistic link.
//
// The raw score starts at the training log-odds f0 = log(p1 / (1 - p1)).
// Each iteration fits a regression tree to the residuals r = y - sigmoid(f)
// (the negative gradient of the binomial deviance), replaces every leaf value
// with the Newton step sum(r) / sum(p (1 - p)) over the leaf's rows, and adds
// learning_rate * leaf value to the score of each row in that leaf.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "flightgb/encode.hpp"
#include "flightgb/error.hpp"
#include "flightgb/matrix.hpp"
#include "flightgb/tree.hpp"

namespace flightgb {

/// Logistic function, evaluated without overflow for any finite score.
inline double sigmoid(double f) noexcept {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

/// -[y log p + (1 - y) log(1 - p)] with p = sigmoid(f), written as
/// softplus(f) - y f.
inline double binomial_deviance(std::uint8_t y, double f) noexcept {
  const double softplus = std::max(f, 0.0) + std::log1p(std::exp(-std::abs(f)));
  return softplus - (y ? f : 0.0);
}

/// Residual y - sigmoid(f): the negative derivative of the deviance in f.
inline double deviance_residual(std::uint8_t y, double f) noexcept {
  return static_cast<double>(y) - sigmoid(f);
}

constexpr double newton_denominator_floor = 1e-12;

/// One Newton step for a leaf: sum of residuals over sum of p (1 - p).
/// Leaves with a vanishing denominator contribute nothing.
inline double newton_leaf_value(double residual_sum, double hessian_sum) noexcept {
  return hessian_sum < newton_denominator_floor ? 0.0 : residual_sum / hessian_sum;
}

struct BoostParams {
  std::size_t estimators = 100;
  double learning_rate = 0.1;
  TreeParams tree{};
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw Error(Errc::InvalidArgument, "learning rate must lie in (0, 1]");
    tree.validate();
  }

  friend bool operator==(const BoostParams&, const BoostParams&) = default;
};

struct BoostedModel {
  double f0 = 0.0;
  double learning_rate = 0.1;
  std::size_t n_features = 0;
  std::vector<RegressionTree> trees;
  std::shared_ptr<const EncodingPlan> plan;

  /// Raw additive score f0 + v * sum of the first `stages` trees.
  double decision_function(std::span<const double> x, std::size_t stages) const {
    if (x.size() != n_features)
      throw Error(Errc::DimensionMismatch, "model expects " + std::to_string(n_features) +
                                               " features, got " + std::to_string(x.size()));
    double f = f0;
    const std::size_t m = std::min(stages, trees.size());
    for (std::size_t t = 0; t < m; ++t) f += learning_rate * trees[t].predict(x);
    return f;
  }

  double decision_function(std::span<const double> x) const {
    return decision_function(x, trees.size());
  }

  std::vector<double> decision_function(const Matrix& X) const {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = decision_function(X.row(i));
    return out;
  }

  double predict_proba(std::span<const double> x) const { return sigmoid(decision_function(x)); }

  /// 1 iff predict_proba(x) >= threshold. Compared on the score scale
  /// (score >= logit(threshold)) so that threshold 0.5 is exactly score >= 0.
  std::uint8_t predict_label(std::span<const double> x, double threshold = 0.5) const {
    return label_for_score(decision_function(x), threshold);
  }

  static std::uint8_t label_for_score(double score, double threshold = 0.5) {
    if (!(threshold > 0.0 && threshold < 1.0))
      throw Error(Errc::InvalidThreshold, "threshold must lie in (0, 1)");
    return score >= std::log(threshold / (1.0 - threshold)) ? 1 : 0;
  }

  friend bool operator==(const BoostedModel& a, const BoostedModel& b) {
    return a.f0 == b.f0 && a.learning_rate == b.learning_rate && a.n_features == b.n_features &&
           a.trees == b.trees;
  }
};

struct TrainingTrace {
  std::vector<double> deviance;  // mean deviance, index 0 = prior only
  std::vector<double> accuracy;
};

struct BoostFit {
  BoostedModel model;
  TrainingTrace trace;
};

inline double prior_log_odds(std::span<const std::uint8_t> y) {
  std::size_t pos = 0;
  for (auto v : y) pos += v ? 1 : 0;
  const std::size_t neg = y.size() - pos;
  if (pos == 0 || neg == 0)
    throw Error(Errc::SingleClassTraining, "training data must contain both classes");
  return std::log(static_cast<double>(pos) / static_cast<double>(neg));
}

inline BoostFit fit_gbc(const Matrix& X, std::span<const std::uint8_t> y, const BoostParams& params,
                        std::size_t threads = 1) {
  params.validate();
  const std::size_t n = X.rows();
  if (y.size() != n) throw Error(Errc::DimensionMismatch, "label count differs from row count");
  for (double v : X.data())
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteFeature, "training features must be finite");

  BoostFit fit;
  BoostedModel& model = fit.model;
  model.f0 = prior_log_odds(y);
  model.learning_rate = params.learning_rate;
  model.n_features = X.cols();
  model.trees.reserve(params.estimators);

  std::vector<double> f(n, model.f0);
  auto record = [&] {
    double dev = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dev += binomial_deviance(y[i], f[i]);
      correct += (f[i] >= 0.0 ? 1 : 0) == y[i] ? 1 : 0;
    }
    fit.trace.deviance.push_back(dev / static_cast<double>(n));
    fit.trace.accuracy.push_back(static_cast<double>(correct) / static_cast<double>(n));
  };
  record();
  if (params.estimators == 0) return fit;

  const SortedColumns sorted(X);
  std::vector<double> p(n), residual(n);
  for (std::size_t m = 1; m <= params.estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = sigmoid(f[i]);
      residual[i] = static_cast<double>(y[i]) - p[i];
    }
    RegressionTree tree = fit_tree(X, sorted, residual, params.tree, threads);
    for (std::size_t nd = 0; nd < tree.nodes().size(); ++nd) {
      if (!tree.nodes()[nd].is_leaf()) continue;
      double num = 0.0, den = 0.0;
      const auto rows = tree.samples(nd);
      for (auto i : rows) {
        num += residual[i];
        den += p[i] * (1.0 - p[i]);
      }
      const double gamma = newton_leaf_value(num, den);
      tree.set_leaf_value(nd, gamma);
      for (auto i : rows) f[i] += model.learning_rate * gamma;
    }
    tree.release_samples();
    model.trees.push_back(std::move(tree));
    record();
  }
  return fit;
}

inline BoostFit fit_gbc(const FeatureMatrix& train, const BoostParams& params,
                        std::size_t threads = 1) {
  if (train.labels.size() != train.rows())
    throw Error(Errc::MissingValue, "training matrix is unlabeled");
  BoostFit fit = fit_gbc(train.values, train.labels, params, threads);
  fit.model.plan = train.plan;
  return fit;
}

/// Mean deviance on `fm` using the first m trees, for m = 0..M.
inline std::vector<double> staged_deviance(const BoostedModel& model, const FeatureMatrix& fm) {
  if (fm.rows() == 0) throw Error(Errc::EmptyInput, "staged deviance needs at least one row");
  if (fm.labels.size() != fm.rows()) throw Error(Errc::MissingValue, "matrix is unlabeled");
  if (fm.cols() != model.n_features)
    throw Error(Errc::DimensionMismatch, "matrix width differs from the model's feature count");
  std::vector<double> sums(model.trees.size() + 1, 0.0);
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    const auto x = fm.values.row(i);
    double f = model.f0;
    sums[0] += binomial_deviance(fm.labels[i], f);
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
      f += model.learning_rate * model.trees[t].predict(x);
      sums[t + 1] += binomial_deviance(fm.labels[i], f);
    }
  }
  for (double& s : sums) s /= static_cast<double>(fm.rows());
  return sums;
}

}  // namespace flightgb
