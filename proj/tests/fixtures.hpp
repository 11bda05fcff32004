#pragma once

// Shared deterministic fixtures for the unit and acceptance suites.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flightgb/flightgb.hpp"

namespace flightgb::testing {

inline FeatureMatrix make_matrix(Matrix X, std::vector<std::uint8_t> labels) {
  FeatureMatrix fm;
  for (std::size_t c = 0; c < X.cols(); ++c) fm.column_names.push_back("x" + std::to_string(c));
  fm.values = std::move(X);
  fm.labels = std::move(labels);
  fm.label_name = "y";
  return fm;
}

/// 200 points uniform in the unit square, label 1 iff x0 + x1 > 1.
inline FeatureMatrix separable_fixture() {
  Rng rng(20240601);
  Matrix X(200, 2);
  std::vector<std::uint8_t> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    X(i, 0) = rng.uniform01();
    X(i, 1) = rng.uniform01();
    y[i] = X(i, 0) + X(i, 1) > 1.0 ? 1 : 0;
  }
  return make_matrix(std::move(X), std::move(y));
}

/// Noisy logistic data: d features in [-1, 1], P(y=1) = sigmoid(w . x).
inline FeatureMatrix noisy_fixture(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(d);
  for (auto& v : w) v = 4.0 * rng.uniform01() - 2.0;
  Matrix X(n, d);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      X(i, c) = 2.0 * rng.uniform01() - 1.0;
      s += w[c] * X(i, c);
    }
    y[i] = rng.uniform01() < sigmoid(s) ? 1 : 0;
  }
  if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
  if (std::count(y.begin(), y.end(), 0) == 0) y[0] = 0;
  return make_matrix(std::move(X), std::move(y));
}

/// Clean synthetic flight data encoded with the default one-hot columns.
inline FeatureMatrix encoded_synthetic(std::size_t rows, double ratio, std::uint64_t seed) {
  const Dataset ds = generate_synthetic({rows, ratio, seed});
  auto plan = std::make_shared<const EncodingPlan>(fit_encoding(ds, default_one_hot_columns()));
  return apply_encoding(ds, plan);
}

}  // namespace flightgb::testing
