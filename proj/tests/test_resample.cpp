#include <gtest/gtest.h>

#include <chrono>

#include "fixtures.hpp"
#include "flightgb/resample.hpp"

namespace fg = flightgb;

namespace {

fg::FeatureMatrix imbalanced(std::size_t neg, std::size_t pos, std::size_t d, std::uint64_t seed) {
  fg::Rng rng(seed);
  fg::Matrix X(neg + pos, d);
  std::vector<std::uint8_t> y(neg + pos, 0);
  for (std::size_t i = 0; i < neg + pos; ++i) {
    for (std::size_t c = 0; c < d; ++c) X(i, c) = rng.normal() * 10.0;
    y[i] = i >= neg;
  }
  return fg::testing::make_matrix(std::move(X), std::move(y));
}

}  // namespace

TEST(SmoteConfig, PercentValidation) {
  EXPECT_EQ((fg::SmoteConfig{200, 0}).k(), 2u);
  for (unsigned bad : {0u, 150u, 99u}) {
    try {
      fg::SmoteConfig{bad, 0}.validate();
      FAIL() << bad;
    } catch (const fg::Error& e) {
      EXPECT_EQ(e.code(), fg::Errc::InvalidPercent);
    }
  }
}

TEST(RandomSmote, CountIdentity) {
  for (unsigned percent : {100u, 200u, 300u, 500u}) {
    const auto fm = imbalanced(40, 7, 3, percent);
    const auto out = fg::random_smote(fm, {percent, 9});
    const unsigned k = percent / 100;
    EXPECT_EQ(out.positives(), 7u * (1 + k));
    EXPECT_EQ(out.rows() - out.positives(), 40u);
    EXPECT_EQ(out.rows(), fm.rows() + 7u * k);
  }
}

TEST(RandomSmote, FullScaleCounts) {
  const auto fm = imbalanced(76090, 19668, 2, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = fg::random_smote(fm, {200, 5});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(out.positives(), 59004u);
  EXPECT_EQ(out.rows(), 135094u);
  EXPECT_LT(secs, 1.0);
}

TEST(RandomSmote, OriginalsUnchangedAndFirst) {
  const auto fm = imbalanced(30, 5, 4, 2);
  const auto out = fg::random_smote(fm, {300, 1});
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    EXPECT_EQ(out.labels[i], fm.labels[i]);
    for (std::size_t c = 0; c < fm.cols(); ++c) EXPECT_EQ(out.values(i, c), fm.values(i, c));
  }
  for (std::size_t i = fm.rows(); i < out.rows(); ++i) EXPECT_EQ(out.labels[i], 1);
}

TEST(RandomSmote, OriginsAreDistinctMinorityRows) {
  const auto fm = imbalanced(30, 5, 2, 3);
  std::vector<fg::SyntheticOrigin> origins;
  const auto out = fg::random_smote(fm, {200, 4}, &origins);
  ASSERT_EQ(origins.size(), 10u);
  for (std::size_t s = 0; s < origins.size(); ++s) {
    const auto& o = origins[s];
    EXPECT_EQ(o.seed_row, 30 + s / 2);  // k consecutive points per seed row
    EXPECT_NE(o.a, o.seed_row);
    EXPECT_NE(o.b, o.seed_row);
    EXPECT_NE(o.a, o.b);
    EXPECT_EQ(fm.labels[o.a], 1);
    EXPECT_EQ(fm.labels[o.b], 1);
    std::vector<double> z(2);
    fg::smote_point(fm.values.row(o.seed_row), fm.values.row(o.a), fm.values.row(o.b), o.t, o.u, z);
    EXPECT_EQ(z[0], out.values(fm.rows() + s, 0));
    EXPECT_EQ(z[1], out.values(fm.rows() + s, 1));
  }
}

TEST(SmotePoint, ScalarExamples) {
  const std::vector<double> xi{0.0}, xa{10.0}, xb{20.0};
  std::vector<double> z(1);
  fg::smote_point(xi, xa, xb, 0.5, 0.5, z);
  EXPECT_DOUBLE_EQ(z[0], 7.5);
  fg::smote_point(xi, xa, xb, 0.0, 1.0, z);
  EXPECT_EQ(z[0], 10.0);
  fg::smote_point(xi, xa, xb, 0.3, 0.0, z);
  EXPECT_EQ(z[0], 0.0);
}

TEST(RandomSmote, ConvexHullAndBoxBounds) {
  const auto fm = imbalanced(20, 12, 3, 6);
  std::vector<fg::SyntheticOrigin> origins;
  const auto out = fg::random_smote(fm, {500, 8}, &origins);
  for (std::size_t s = 0; s < origins.size(); ++s) {
    const auto& o = origins[s];
    ASSERT_GE(o.t, 0.0);
    ASSERT_LT(o.t, 1.0);
    ASSERT_GE(o.u, 0.0);
    ASSERT_LT(o.u, 1.0);
    // barycentric weights (1-u, u(1-t), u t) reproduce the point
    const double wi = 1.0 - o.u, wa = o.u * (1.0 - o.t), wb = o.u * o.t;
    for (std::size_t c = 0; c < fm.cols(); ++c) {
      const double xi = fm.values(o.seed_row, c), xa = fm.values(o.a, c), xb = fm.values(o.b, c);
      const double z = out.values(fm.rows() + s, c);
      EXPECT_NEAR(z, wi * xi + wa * xa + wb * xb, 1e-9);
      EXPECT_GE(z, std::min({xi, xa, xb}) - 1e-9);
      EXPECT_LE(z, std::max({xi, xa, xb}) + 1e-9);
    }
  }
}

TEST(RandomSmote, DeterministicPerSeed) {
  const auto fm = imbalanced(30, 6, 2, 7);
  EXPECT_EQ(fg::random_smote(fm, {200, 1}).values, fg::random_smote(fm, {200, 1}).values);
  EXPECT_NE(fg::random_smote(fm, {200, 1}).values, fg::random_smote(fm, {200, 2}).values);
}

TEST(RandomSmote, MinorityIsZeroWhenZerosAreRarer) {
  const auto fm = imbalanced(5, 40, 2, 8);  // five zeros
  EXPECT_EQ(fg::minority_label(fm), 0);
  const auto out = fg::random_smote(fm, {100, 3});
  EXPECT_EQ(out.rows() - out.positives(), 10u);
  EXPECT_EQ(fg::minority_label(imbalanced(5, 5, 1, 1)), 1);
}

TEST(RandomSmote, MinorityTooSmall) {
  try {
    fg::random_smote(imbalanced(30, 2, 2, 1), {200, 1});
    FAIL();
  } catch (const fg::Error& e) {
    EXPECT_EQ(e.code(), fg::Errc::MinorityTooSmall);
  }
  EXPECT_NO_THROW(fg::random_smote(imbalanced(30, 3, 2, 1), {200, 1}));
}
