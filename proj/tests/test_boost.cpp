#include <gtest/gtest.h>

#include <chrono>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "flightgb/boost.hpp"

namespace fg = flightgb;

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(fg::sigmoid(0.0), 0.5);
  EXPECT_EQ(fg::sigmoid(-800.0), 0.0);
  EXPECT_EQ(fg::sigmoid(800.0), 1.0);
  EXPECT_TRUE(std::isfinite(fg::binomial_deviance(1, -800.0)));
  EXPECT_NEAR(fg::binomial_deviance(1, -800.0), 800.0, 1e-9);
}

TEST(Deviance, MatchesLogLossAndReferenceValue) {
  // p = 0.25 -> f = log(1/3)
  EXPECT_NEAR(fg::binomial_deviance(1, std::log(1.0 / 3.0)) * 0.25 +
                  fg::binomial_deviance(0, std::log(1.0 / 3.0)) * 0.75,
              0.5623351446188083, 1e-15);
  fg::Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double f = 3.0 * rng.normal();  // the naive oracle cancels badly for large |f|
    for (std::uint8_t y : {0, 1}) EXPECT_NEAR(fg::binomial_deviance(y, f), fg::oracle::log_loss(y, f), 1e-9);
  }
}

TEST(Deviance, ResidualIsNegativeGradient) {
  fg::Rng rng(17);
  const double h = 1e-5;
  for (int v = 0; v < 100; ++v) {
    for (int i = 0; i < 10; ++i) {
      const double f = 4.0 * rng.normal();
      const std::uint8_t y = rng.below(2) ? 1 : 0;
      const double fd = (fg::binomial_deviance(y, f + h) - fg::binomial_deviance(y, f - h)) / (2 * h);
      EXPECT_NEAR(fg::deviance_residual(y, f), -fd, 1e-6);
    }
  }
}

TEST(PriorLogOdds, AirlineClassCounts) {
  std::vector<std::uint8_t> y(95758, 0);
  std::fill(y.begin(), y.begin() + 19668, 1);
  EXPECT_NEAR(fg::prior_log_odds(y), -1.3529239006387384, 1e-12);
  const std::vector<std::uint8_t> even{0, 1};
  EXPECT_EQ(fg::prior_log_odds(even), 0.0);
  const std::vector<std::uint8_t> ones{1, 1};
  EXPECT_THROW(fg::prior_log_odds(ones), fg::Error);
}

TEST(NewtonLeafValue, DegenerateDenominator) {
  EXPECT_EQ(fg::newton_leaf_value(0.5, 0.0), 0.0);
  EXPECT_EQ(fg::newton_leaf_value(0.5, 1e-13), 0.0);
  EXPECT_EQ(fg::newton_leaf_value(0.5, 0.25), 2.0);
}

TEST(FitGbc, ZeroEstimatorsGivesPrior) {
  const auto fm = fg::testing::separable_fixture();
  const auto fit = fg::fit_gbc(fm, {0, 0.1, {}, 0});
  EXPECT_TRUE(fit.model.trees.empty());
  const auto x = fm.values.row(0);
  EXPECT_EQ(fit.model.decision_function(x), fit.model.f0);
}

TEST(FitGbc, SingleStepLeafValues) {
  // One stump from the prior: each leaf value is Newton's sum r / sum p(1-p).
  const fg::Matrix X = [] {
    fg::Matrix m(6, 1);
    for (std::size_t i = 0; i < 6; ++i) m(i, 0) = static_cast<double>(i);
    return m;
  }();
  const std::vector<std::uint8_t> y{0, 0, 1, 0, 1, 1};
  const auto fit = fg::fit_gbc(X, y, {1, 1.0, {1, 2, 1}, 0});
  const double p = 0.5;
  const auto& t = fit.model.trees[0];
  for (std::size_t nd = 0; nd < t.nodes().size(); ++nd) {
    if (!t.nodes()[nd].is_leaf()) continue;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      if (t.leaf_index(X.row(i)) != nd) continue;
      num += y[i] - p;
      den += p * (1 - p);
    }
    EXPECT_NEAR(t.nodes()[nd].value, num / den, 1e-12);
  }
}

TEST(FitGbc, SeparableFixture) {
  const auto fm = fg::testing::separable_fixture();
  const auto t0 = std::chrono::steady_clock::now();
  const auto fit = fg::fit_gbc(fm, {100, 0.1, {2, 2, 1}, 0});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(fit.trace.accuracy.back(), 0.99);
  EXPECT_LT(secs, 5.0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < fm.rows(); ++i) correct += fit.model.predict_label(fm.values.row(i)) == fm.labels[i];
  EXPECT_EQ(static_cast<double>(correct) / 200.0, fit.trace.accuracy.back());
}

TEST(FitGbc, TraceMatchesStagedDeviance) {
  const auto fm = fg::testing::noisy_fixture(400, 4, 5);
  const auto fit = fg::fit_gbc(fm, {30, 0.1, {3, 2, 1}, 0});
  const auto staged = fg::staged_deviance(fit.model, fm);
  ASSERT_EQ(staged.size(), 31u);
  for (std::size_t m = 0; m < staged.size(); ++m) EXPECT_EQ(staged[m], fit.trace.deviance[m]);
}

TEST(FitGbc, MonotoneTrainingDeviance) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto fm = fg::testing::encoded_synthetic(600, 0.2, seed);
    for (double lr : {0.05, 0.1, 0.5})
      for (std::size_t depth : {1u, 3u, 5u}) {
        const auto dev = fg::staged_deviance(fg::fit_gbc(fm, {100, lr, {depth, 2, 1}, 0}).model, fm);
        for (std::size_t m = 1; m < dev.size(); ++m)
          ASSERT_LE(dev[m], dev[m - 1] + 1e-9) << "seed " << seed << " lr " << lr << " depth " << depth << " m " << m;
      }
  }
}

TEST(FitGbc, ThreadsAndPrefixConsistency) {
  const auto fm = fg::testing::noisy_fixture(300, 5, 6);
  const auto a = fg::fit_gbc(fm, {25, 0.2, {3, 2, 1}, 0}, 1).model;
  const auto b = fg::fit_gbc(fm, {25, 0.2, {3, 2, 1}, 0}, 4).model;
  EXPECT_EQ(a, b);
  // a shorter run is a prefix of a longer one
  const auto c = fg::fit_gbc(fm, {10, 0.2, {3, 2, 1}, 0}, 1).model;
  for (std::size_t t = 0; t < 10; ++t) EXPECT_EQ(a.trees[t], c.trees[t]);
  for (std::size_t i = 0; i < fm.rows(); ++i)
    EXPECT_EQ(a.decision_function(fm.values.row(i), 10), c.decision_function(fm.values.row(i)));
}

TEST(LabelForScore, ThresholdRule) {
  EXPECT_EQ(fg::BoostedModel::label_for_score(0.0), 1);
  EXPECT_EQ(fg::BoostedModel::label_for_score(-1e-300), 0);
  EXPECT_EQ(fg::BoostedModel::label_for_score(1.0, 0.7), 1);  // sigmoid(1) = 0.731
  EXPECT_EQ(fg::BoostedModel::label_for_score(0.8, 0.7), 0);  // logit(0.7) = 0.847
  for (double bad : {0.0, 1.0, -0.2, 1.5}) {
    try {
      fg::BoostedModel::label_for_score(0.0, bad);
      FAIL();
    } catch (const fg::Error& e) {
      EXPECT_EQ(e.code(), fg::Errc::InvalidThreshold);
    }
  }
}

TEST(FitGbc, Errors) {
  const auto fm = fg::testing::separable_fixture();
  EXPECT_THROW(fg::fit_gbc(fm, {10, 0.0, {}, 0}), fg::Error);
  EXPECT_THROW(fg::fit_gbc(fm, {10, 1.5, {}, 0}), fg::Error);
  auto single = fm;
  std::fill(single.labels.begin(), single.labels.end(), 0);
  try {
    fg::fit_gbc(single, {});
    FAIL();
  } catch (const fg::Error& e) {
    EXPECT_EQ(e.code(), fg::Errc::SingleClassTraining);
  }
  const auto model = fg::fit_gbc(fm, {2, 0.1, {}, 0}).model;
  const std::vector<double> wrong{1, 2, 3};
  EXPECT_THROW(model.decision_function(wrong), fg::Error);
}
