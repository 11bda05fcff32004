#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "flightgb/tree.hpp"

namespace fg = flightgb;

namespace {

fg::Matrix column(std::initializer_list<double> v) {
  fg::Matrix X(v.size(), 1);
  std::size_t i = 0;
  for (double x : v) X(i++, 0) = x;
  return X;
}

double tree_sse(const fg::RegressionTree& t, const fg::Matrix& X, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double r = y[i] - t.predict(X.row(i));
    s += r * r;
  }
  return s;
}

}  // namespace

TEST(FitTree, StumpExample) {
  const auto X = column({1, 2, 3, 4});
  const std::vector<double> y{0, 0, 1, 1};
  const auto t = fg::fit_tree(X, y, {1, 2, 1});
  const auto& root = t.nodes()[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_EQ(root.threshold, 2.5);
  EXPECT_EQ(t.nodes()[root.left].value, 0.0);
  EXPECT_EQ(t.nodes()[root.right].value, 1.0);
  EXPECT_EQ(t.depth(), 1u);
  EXPECT_EQ(t.leaf_count(), 2u);
}

TEST(FitTree, ConstantTargetsGiveSingleLeaf) {
  const auto X = column({1, 2, 3});
  const std::vector<double> y{5, 5, 5};
  const auto t = fg::fit_tree(X, y, {3, 2, 1});
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.nodes()[0].value, 5.0);
}

TEST(FitTree, ConstantFeatureCannotSplit) {
  const auto X = column({7, 7, 7, 7});
  const std::vector<double> y{0, 1, 0, 1};
  EXPECT_EQ(fg::fit_tree(X, y, {3, 2, 1}).nodes().size(), 1u);
}

TEST(FitTree, DepthZeroIsMeanLeaf) {
  const auto X = column({1, 2, 3, 4});
  const std::vector<double> y{1, 2, 3, 6};
  const auto t = fg::fit_tree(X, y, {0, 2, 1});
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.nodes()[0].value, 3.0);
}

TEST(FitTree, TieBreakLowestFeatureThenThreshold) {
  fg::Matrix X(4, 2);
  for (std::size_t i = 0; i < 4; ++i) X(i, 0) = X(i, 1) = static_cast<double>(i);
  const std::vector<double> y{0, 0, 1, 1};
  EXPECT_EQ(fg::fit_tree(X, y, {1, 2, 1}).nodes()[0].feature, 0);

  // symmetric targets: thresholds 0.5 and 2.5 tie, the lower one wins
  const auto Xs = column({0, 1, 2, 3});
  const std::vector<double> ys{1, 0, 0, 1};
  EXPECT_EQ(fg::fit_tree(Xs, ys, {1, 2, 1}).nodes()[0].threshold, 0.5);
}

TEST(FitTree, MinSamplesLeafAndSplit) {
  const auto X = column({1, 2, 3, 4, 5, 6});
  const std::vector<double> y{10, 0, 0, 0, 0, 0};
  const auto free = fg::fit_tree(X, y, {1, 2, 1});
  EXPECT_EQ(free.nodes()[0].threshold, 1.5);
  const auto constrained = fg::fit_tree(X, y, {1, 2, 2});
  EXPECT_EQ(constrained.nodes()[0].threshold, 2.5);
  for (std::size_t nd = 0; nd < constrained.nodes().size(); ++nd)
    if (constrained.nodes()[nd].is_leaf()) {
      EXPECT_GE(constrained.samples(nd).size(), 2u);
    }
  EXPECT_EQ(fg::fit_tree(X, y, {3, 7, 1}).nodes().size(), 1u);
}

TEST(FitTree, Errors) {
  const auto X = column({1, 2});
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const fg::Error& e) {
      return e.code();
    }
    return fg::Errc::InvalidArgument;
  };
  const std::vector<double> nan_y{0, std::nan("")};
  EXPECT_EQ(code([&] { fg::fit_tree(X, nan_y, {}); }), fg::Errc::NonFiniteTarget);
  const std::vector<double> one{0};
  EXPECT_EQ(code([&] { fg::fit_tree(X, one, {}); }), fg::Errc::DimensionMismatch);
  EXPECT_EQ(code([&] { fg::fit_tree(fg::Matrix(0, 1), std::vector<double>{}, {}); }), fg::Errc::EmptyInput);
  auto Xinf = X;
  Xinf(0, 0) = std::numeric_limits<double>::infinity();
  const std::vector<double> two{0, 1};
  EXPECT_EQ(code([&] { fg::fit_tree(Xinf, two, {}); }), fg::Errc::NonFiniteFeature);

  const auto t = fg::fit_tree(X, two, {});
  const std::vector<double> wide{1, 2};
  EXPECT_EQ(code([&] { t.predict(wide); }), fg::Errc::DimensionMismatch);
}

TEST(FitTree, RootSplitMatchesExhaustiveSearch) {
  fg::Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(19);
    const std::size_t d = 1 + rng.below(3);
    fg::Matrix X(n, d);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < d; ++c) X(i, c) = static_cast<double>(rng.below(6));  // ties
      y[i] = rng.normal();
    }
    const auto stump = fg::fit_tree(X, y, {1, 2, 1});
    EXPECT_NEAR(tree_sse(stump, X, y), fg::oracle::best_split_sse(X, y), 1e-9) << "trial " << trial;
  }
}

TEST(FitTree, PartitionLeavesAndStructure) {
  const auto fm = fg::testing::noisy_fixture(300, 4, 3);
  std::vector<double> y(fm.rows());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = fm.labels[i] + 0.1 * fm.values(i, 0);
  for (std::size_t depth : {1u, 3u, 5u}) {
    const auto t = fg::fit_tree(fm.values, y, {depth, 2, 3});
    EXPECT_TRUE(t.well_formed());
    EXPECT_LE(t.depth(), depth);
    std::vector<std::size_t> seen(fm.rows(), 0);
    for (std::size_t nd = 0; nd < t.nodes().size(); ++nd) {
      if (!t.nodes()[nd].is_leaf()) continue;
      const auto rows = t.samples(nd);
      EXPECT_GE(rows.size(), 3u);
      double mean = 0.0;
      for (auto i : rows) {
        ++seen[i];
        EXPECT_EQ(t.leaf_index(fm.values.row(i)), nd);
        mean += y[i];
      }
      EXPECT_NEAR(t.nodes()[nd].value, mean / static_cast<double>(rows.size()), 1e-12);
    }
    for (auto s : seen) EXPECT_EQ(s, 1u);
  }
}

TEST(FitTree, ThreadCountDoesNotChangeTree) {
  const auto fm = fg::testing::noisy_fixture(500, 6, 4);
  std::vector<double> y(fm.rows());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = fm.labels[i] - 0.3;
  const auto a = fg::fit_tree(fm.values, y, {5, 2, 1}, 1);
  const auto b = fg::fit_tree(fm.values, y, {5, 2, 1}, 4);
  EXPECT_EQ(a, b);
}

TEST(SplitMidpoint, AdjacentDoubles) {
  EXPECT_EQ(fg::split_midpoint(1.0, 2.0), 1.5);
  const double lo = 1.0, hi = std::nextafter(1.0, 2.0);
  const double m = fg::split_midpoint(lo, hi);
  EXPECT_TRUE(lo <= m && m < hi);
}
