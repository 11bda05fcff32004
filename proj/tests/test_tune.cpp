#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flightgb/tune.hpp"

namespace fg = flightgb;

TEST(Grid, DefaultContainsReportedBest) {
  const auto g = fg::default_grid();
  g.validate();
  EXPECT_NE(std::find(g.estimators.begin(), g.estimators.end(), 300u), g.estimators.end());
  EXPECT_NE(std::find(g.estimators.begin(), g.estimators.end(), 400u), g.estimators.end());
  EXPECT_NE(std::find(g.depths.begin(), g.depths.end(), 5u), g.depths.end());
}

TEST(Grid, ParseAndValidate) {
  const auto g = fg::Grid::parse("100, 200x3,5");
  EXPECT_EQ(g.estimators, (std::vector<std::size_t>{100, 200}));
  EXPECT_EQ(g.depths, (std::vector<std::size_t>{3, 5}));
  EXPECT_THROW(fg::Grid::parse("100,200"), fg::Error);
  EXPECT_THROW(fg::Grid::parse("200,100x3"), fg::Error);
  EXPECT_THROW(fg::Grid::parse("100xa"), fg::Error);
  try {
    fg::Grid{{}, {3}}.validate();
    FAIL();
  } catch (const fg::Error& e) {
    EXPECT_EQ(e.code(), fg::Errc::EmptyGrid);
  }
}

TEST(StratifiedFolds, BalancedAndDeterministic) {
  std::vector<std::uint8_t> y(100, 0);
  std::fill(y.begin(), y.begin() + 23, 1);
  const auto f = fg::stratified_folds(y, 3, 9);
  EXPECT_EQ(f, fg::stratified_folds(y, 3, 9));
  for (std::uint8_t cls : {0, 1}) {
    std::vector<std::size_t> count(3, 0);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) ++count[f[i]];
    EXPECT_LE(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()), 1u);
  }
  std::vector<std::uint8_t> tiny{1, 1, 0, 0, 0};
  try {
    fg::stratified_folds(tiny, 3, 1);
    FAIL();
  } catch (const fg::Error& e) {
    EXPECT_EQ(e.code(), fg::Errc::ClassTooSmallForFolds);
  }
}

TEST(SelectBest, TieGoesToFewerEstimatorsThenShallower) {
  fg::GridResult r;
  r.cells = {{100, 3, {}, 0.8}, {100, 5, {}, 0.9}, {200, 3, {}, 0.9}, {200, 5, {}, 0.85}};
  fg::select_best(r);
  EXPECT_EQ(r.best_estimators, 100u);
  EXPECT_EQ(r.best_depth, 5u);

  r.cells = {{100, 3, {}, 0.7}, {100, 5, {}, 0.7}, {200, 3, {}, 0.7}, {200, 5, {}, 0.7}};
  fg::select_best(r);
  EXPECT_EQ(r.best_estimators, 100u);
  EXPECT_EQ(r.best_depth, 3u);
}

TEST(GridSearch, TwoByTwoGrid) {
  const auto fm = fg::testing::noisy_fixture(240, 3, 12);
  const fg::Grid grid{{5, 15}, {1, 3}};
  const fg::BoostParams base{0, 0.2, {}, 0};
  const auto r = fg::grid_search(fm, grid, 3, base, 44);
  ASSERT_EQ(r.cells.size(), 4u);
  for (const auto& c : r.cells) {
    ASSERT_EQ(c.fold_scores.size(), 3u);
    EXPECT_NEAR(c.mean, (c.fold_scores[0] + c.fold_scores[1] + c.fold_scores[2]) / 3.0, 1e-15);
    EXPECT_GE(r.best_mean, c.mean);
  }
  EXPECT_EQ(r.cells[1].estimators, 5u);
  EXPECT_EQ(r.cells[1].depth, 3u);
  const auto best = std::find_if(r.cells.begin(), r.cells.end(), [&](const fg::GridCell& c) {
    return c.estimators == r.best_estimators && c.depth == r.best_depth;
  });
  ASSERT_NE(best, r.cells.end());
  EXPECT_EQ(best->mean, r.best_mean);
  for (auto it = r.cells.begin(); it != best; ++it) EXPECT_LT(it->mean, r.best_mean);

  EXPECT_EQ(fg::grid_search(fm, grid, 3, base, 44, fg::Scoring::accuracy, 4).to_json(), r.to_json());
}

TEST(GridSearch, StagedScoresMatchSeparateFits) {
  const auto fm = fg::testing::noisy_fixture(150, 3, 21);
  const fg::Grid grid{{4, 9}, {2}};
  const fg::BoostParams base{0, 0.3, {}, 0};
  const std::uint64_t seed = 8;
  const auto r = fg::grid_search(fm, grid, 3, base, seed, fg::Scoring::f1);
  const auto fold_of = fg::stratified_folds(fm.labels, 3, fg::derive_seed(seed, "folds"));
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t f = 0; f < 3; ++f) {
      std::vector<std::size_t> fit_rows, held_rows;
      for (std::size_t i = 0; i < fm.rows(); ++i) (fold_of[i] == f ? held_rows : fit_rows).push_back(i);
      const auto fit_part = fm.select_rows(fit_rows);
      const auto held = fm.select_rows(held_rows);
      fg::BoostParams p = base;
      p.estimators = grid.estimators[e];
      p.tree.max_depth = 2;
      const auto model = fg::fit_gbc(fit_part, p).model;
      std::vector<std::uint8_t> pred(held.rows());
      for (std::size_t i = 0; i < held.rows(); ++i) pred[i] = model.predict_label(held.values.row(i));
      EXPECT_EQ(r.cells[e].fold_scores[f], fg::score_predictions(held.labels, pred, fg::Scoring::f1));
    }
  }
}
