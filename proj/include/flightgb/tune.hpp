#pragma once

// Exhaustive grid search over (estimators, max_depth) with stratified k-fold
// cross-validation.
//
// Boosting here uses no subsampling, so the model with M estimators is an
// exact prefix of the model with M' > M estimators (same depth, same data).
// Each (depth, fold) pair is therefore trained once with the largest M in the
// grid and scored at every requested M along the way; the numbers are the
// same as training every cell separately.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "flightgb/boost.hpp"
#include "flightgb/encode.hpp"
#include "flightgb/error.hpp"
#include "flightgb/metrics.hpp"
#include "flightgb/parallel.hpp"
#include "flightgb/rng.hpp"

namespace flightgb {

struct Grid {
  std::vector<std::size_t> estimators;
  std::vector<std::size_t> depths;

  void validate() const {
    if (estimators.empty() || depths.empty()) throw Error(Errc::EmptyGrid, "grid axes must be nonempty");
    auto ok = [](const std::vector<std::size_t>& v) {
      return v.front() >= 1 && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (!ok(estimators) || !ok(depths))
      throw Error(Errc::InvalidArgument, "grid values must be >= 1 and strictly increasing");
  }

  /// "e1,e2,...xd1,d2,..." e.g. "100,200x3,5".
  static Grid parse(std::string_view text) {
    const auto x = text.find('x');
    if (x == std::string_view::npos)
      throw Error(Errc::InvalidArgument, "grid must look like 'e1,e2,...xd1,d2,...'");
    auto list = [](std::string_view part) {
      std::vector<std::size_t> out;
      std::size_t pos = 0;
      while (pos <= part.size()) {
        const auto comma = std::min(part.find(',', pos), part.size());
        const auto tok = trim(part.substr(pos, comma - pos));
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
          throw Error(Errc::InvalidArgument, "bad grid value '" + std::string(tok) + "'");
        out.push_back(v);
        pos = comma + 1;
      }
      return out;
    };
    Grid g{list(text.substr(0, x)), list(text.substr(x + 1))};
    g.validate();
    return g;
  }
};

/// Estimators {100, 200, 300, 400, 500} x depth {3, 5, 7}.
inline Grid default_grid() { return {{100, 200, 300, 400, 500}, {3, 5, 7}}; }

enum class Scoring { accuracy, f1 };

inline std::string_view to_string(Scoring s) noexcept { return s == Scoring::f1 ? "f1" : "accuracy"; }

struct GridCell {
  std::size_t estimators = 0;
  std::size_t depth = 0;
  std::vector<double> fold_scores;
  double mean = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;  // estimators-major, both axes ascending
  std::size_t best_estimators = 0;
  std::size_t best_depth = 0;
  double best_mean = 0.0;
  std::size_t folds = 0;
  Scoring scoring = Scoring::accuracy;
  std::uint64_t seed = 0;
  BoostParams base;

  nlohmann::json to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : cells)
      cs.push_back({{"estimators", c.estimators}, {"max_depth", c.depth}, {"fold_scores", c.fold_scores}, {"mean", c.mean}});
    return {{"cells", cs},
            {"best", {{"estimators", best_estimators}, {"max_depth", best_depth}, {"mean", best_mean}}},
            {"config", {{"folds", folds},
                        {"scoring", std::string(to_string(scoring))},
                        {"seed", seed},
                        {"learning_rate", base.learning_rate},
                        {"min_samples_split", base.tree.min_samples_split},
                        {"min_samples_leaf", base.tree.min_samples_leaf}}}};
  }

  void print_table(std::ostream& out) const {
    std::ostringstream os;
    os << std::setw(10) << "estimators" << std::setw(7) << "depth";
    for (std::size_t f = 0; f < folds; ++f) os << std::setw(10) << ("fold" + std::to_string(f + 1));
    os << std::setw(10) << "mean" << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& c : cells) {
      os << std::setw(10) << c.estimators << std::setw(7) << c.depth;
      for (double s : c.fold_scores) os << std::setw(10) << s;
      os << std::setw(10) << c.mean << (c.estimators == best_estimators && c.depth == best_depth ? "  *" : "")
         << '\n';
    }
    out << os.str();
  }
};

/// Fold id per row. Each class's rows are shuffled with Rng(seed), then dealt
/// round-robin, so per-class fold sizes differ by at most one.
inline std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> labels,
                                                 std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(Errc::InvalidArgument, "need at least 2 folds");
  std::vector<std::size_t> fold_of(labels.size(), 0);
  Rng rng(seed);
  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) rows.push_back(i);
    if (rows.size() < folds)
      throw Error(Errc::ClassTooSmallForFolds, "class " + std::to_string(cls) + " has " +
                                                   std::to_string(rows.size()) + " rows for " +
                                                   std::to_string(folds) + " folds");
    rng.shuffle(rows.begin(), rows.end());
    for (std::size_t r = 0; r < rows.size(); ++r) fold_of[rows[r]] = r % folds;
  }
  return fold_of;
}

inline double score_predictions(std::span<const std::uint8_t> truth,
                                std::span<const std::uint8_t> pred, Scoring scoring) {
  const MetricsReport r = summarize(confusion(truth, pred));
  return scoring == Scoring::f1 ? r.f1 : r.accuracy;
}

/// Best = highest mean score; ties go to fewer estimators, then smaller depth.
inline void select_best(GridResult& result) {
  bool first = true;
  for (const auto& c : result.cells) {
    if (first || c.mean > result.best_mean) {
      result.best_mean = c.mean;
      result.best_estimators = c.estimators;
      result.best_depth = c.depth;
      first = false;
    }
  }
}

inline GridResult grid_search(const FeatureMatrix& train, const Grid& grid, std::size_t folds,
                              const BoostParams& base, std::uint64_t seed,
                              Scoring scoring = Scoring::accuracy, std::size_t threads = 1) {
  grid.validate();
  base.validate();
  if (train.labels.size() != train.rows())
    throw Error(Errc::MissingValue, "grid search needs a labeled matrix");
  const auto fold_of = stratified_folds(train.labels, folds, derive_seed(seed, "folds"));

  struct Job {
    std::size_t depth_index;
    std::size_t fold;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < grid.depths.size(); ++d)
    for (std::size_t f = 0; f < folds; ++f) jobs.push_back({d, f});

  // scores[job][estimator index]
  std::vector<std::vector<double>> scores(jobs.size());
  const std::size_t max_estimators = grid.estimators.back();

  // Jobs run in parallel; each tree fit is then single-threaded.
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const Job job = jobs[j];
    std::vector<std::size_t> fit_rows, held_rows;
    for (std::size_t i = 0; i < train.rows(); ++i)
      (fold_of[i] == job.fold ? held_rows : fit_rows).push_back(i);
    const FeatureMatrix fit_part = train.select_rows(fit_rows);
    const FeatureMatrix held = train.select_rows(held_rows);

    BoostParams p = base;
    p.estimators = max_estimators;
    p.tree.max_depth = grid.depths[job.depth_index];
    p.seed = derive_seed(seed, "cell", job.depth_index, job.fold);
    const BoostedModel model = fit_gbc(fit_part.values, fit_part.labels, p, 1).model;

    std::vector<double> f(held.rows(), model.f0);
    std::vector<std::uint8_t> pred(held.rows());
    std::size_t e = 0;
    for (std::size_t m = 1; m <= max_estimators; ++m) {
      for (std::size_t i = 0; i < held.rows(); ++i)
        f[i] += model.learning_rate * model.trees[m - 1].predict(held.values.row(i));
      if (m == grid.estimators[e]) {
        for (std::size_t i = 0; i < held.rows(); ++i) pred[i] = BoostedModel::label_for_score(f[i]);
        scores[j].push_back(score_predictions(held.labels, pred, scoring));
        ++e;
      }
    }
  });

  GridResult result;
  result.folds = folds;
  result.scoring = scoring;
  result.seed = seed;
  result.base = base;
  for (std::size_t e = 0; e < grid.estimators.size(); ++e) {
    for (std::size_t d = 0; d < grid.depths.size(); ++d) {
      GridCell cell{grid.estimators[e], grid.depths[d], {}, 0.0};
      double sum = 0.0;
      for (std::size_t f = 0; f < folds; ++f) {
        const double s = scores[d * folds + f][e];
        cell.fold_scores.push_back(s);
        sum += s;
      }
      cell.mean = sum / static_cast<double>(folds);
      result.cells.push_back(std::move(cell));
    }
  }
  select_best(result);
  return result;
}

}  // namespace flightgb
