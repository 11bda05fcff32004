#pragma once

// End-to-end run: clean -> encode -> (balance) -> split -> train -> evaluate.
//
// All randomness derives from one master seed:
//   SMOTE           derive_seed(seed, "smote")
//   shuffle/split   derive_seed(seed, "split")
//   fold assignment derive_seed(derive_seed(seed, "tune"), "folds")
//   boosting seed   derive_seed(seed, "boost")   (recorded; the learner is deterministic)

#include <cstdint>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "flightgb/boost.hpp"
#include "flightgb/dataset.hpp"
#include "flightgb/encode.hpp"
#include "flightgb/metrics.hpp"
#include "flightgb/model_io.hpp"
#include "flightgb/resample.hpp"
#include "flightgb/rng.hpp"
#include "flightgb/tune.hpp"

namespace flightgb {

struct PrepareConfig {
  std::vector<std::pair<std::string, std::set<std::string>>> filters;
  std::vector<std::string> drop;
};

/// Row filters, column removal, then removal of rows without a label.
inline Dataset prepare_dataset(const Dataset& ds, const PrepareConfig& cfg) {
  Dataset out = ds;
  for (const auto& [column, allowed] : cfg.filters) out = filter_equals(out, column, allowed);
  out = drop_columns(out, cfg.drop);
  return drop_missing_labels(out);
}

/// The default one-hot columns that exist as categorical columns in `schema`.
inline std::set<std::string> default_one_hot_for(const Schema& schema) {
  std::set<std::string> out;
  for (const auto& name : default_one_hot_columns())
    if (auto i = schema.find(name); i && schema.columns[*i].kind == ColumnKind::categorical)
      out.insert(name);
  return out;
}

struct PipelineConfig {
  std::set<std::string> one_hot;
  /// 0 skips balancing (strategy 1); a positive multiple of 100 applies
  /// Randomized-SMOTE (strategy 2).
  unsigned smote_percent = 0;
  /// Balance only the training part, after the split. The default balances
  /// the whole matrix before splitting, so validation rows include synthetic
  /// points.
  bool smote_after_split = false;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  BoostParams boost;
  std::size_t threads = 1;

  int strategy() const noexcept { return smote_percent == 0 ? 1 : 2; }
};

struct Evaluation {
  MetricsReport metrics;
  RocCurve roc;
};

inline Evaluation evaluate(const BoostedModel& model, const FeatureMatrix& fm) {
  if (fm.labels.size() != fm.rows() || fm.rows() == 0)
    throw Error(Errc::MissingValue, "evaluation needs a nonempty labeled matrix");
  const auto scores = model.decision_function(fm.values);
  std::vector<std::uint8_t> pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = BoostedModel::label_for_score(scores[i]);
  Evaluation e;
  e.metrics = summarize(confusion(fm.labels, pred));
  e.roc = roc_auc(fm.labels, scores);
  return e;
}

struct ClassCounts {
  std::size_t negatives = 0;
  std::size_t positives = 0;
};

inline ClassCounts class_counts(const FeatureMatrix& fm) {
  const std::size_t pos = fm.positives();
  return {fm.labels.size() - pos, pos};
}

struct PipelineResult {
  PipelineConfig config;
  std::shared_ptr<const EncodingPlan> plan;
  ClassCounts before_balance;
  ClassCounts after_balance;
  SplitPair split;
  BoostFit fit;
  MetricsReport training;
  Evaluation validation;

  ModelMetadata metadata(std::optional<std::string> timestamp = std::nullopt) const {
    return {config.boost, config.smote_percent, std::move(timestamp)};
  }

  nlohmann::json report_json() const {
    auto counts = [](const ClassCounts& c) {
      return nlohmann::json{{"negatives", c.negatives}, {"positives", c.positives}};
    };
    return {{"strategy", config.strategy()},
            {"smote_percent", config.smote_percent},
            {"smote_after_split", config.smote_after_split},
            {"seed", config.seed},
            {"params", {{"estimators", config.boost.estimators},
                        {"max_depth", config.boost.tree.max_depth},
                        {"learning_rate", config.boost.learning_rate}}},
            {"class_counts", {{"before_balance", counts(before_balance)},
                              {"after_balance", counts(after_balance)}}},
            {"rows", {{"train", split.train.rows()}, {"validation", split.validation.rows()}}},
            {"training", training.to_json()},
            {"validation", validation.metrics.to_json()},
            {"auroc", validation.roc.auroc},
            {"final_training_deviance", fit.trace.deviance.back()}};
  }
};

inline void print_metrics_table(std::ostream& out, const MetricsReport& train,
                                const MetricsReport& valid, double auroc, int strategy) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "strategy " << strategy << (strategy == 1 ? " (no balancing)" : " (Randomized-SMOTE)") << '\n';
  os << std::left << std::setw(22) << "metric" << std::right << std::setw(10) << "training"
     << std::setw(12) << "validation" << '\n';
  auto line = [&](const char* name, double a, double b) {
    os << std::left << std::setw(22) << name << std::right << std::setw(10) << a << std::setw(12) << b << '\n';
  };
  line("accuracy", train.accuracy, valid.accuracy);
  line("recall", train.recall, valid.recall);
  line("precision", train.precision, valid.precision);
  line("f1", train.f1, valid.f1);
  line("weighted recall", train.weighted_recall, valid.weighted_recall);
  line("weighted precision", train.weighted_precision, valid.weighted_precision);
  line("weighted f1", train.weighted_f1, valid.weighted_f1);
  os << std::left << std::setw(22) << "auroc (validation)" << std::right << std::setw(22) << auroc << '\n';
  const auto& cm = valid.confusion;
  os << "validation confusion   pred=1    pred=0\n";
  os << "  actual=1       " << std::setw(10) << cm.tp << std::setw(10) << cm.fn << '\n';
  os << "  actual=0       " << std::setw(10) << cm.fp << std::setw(10) << cm.tn << '\n';
  out << os.str();
}

/// Encodes `cleaned` into a matrix, optionally balances it, splits it and
/// trains one model with config.boost.
inline PipelineResult run_pipeline(const Dataset& cleaned, const PipelineConfig& config) {
  PipelineResult r;
  r.config = config;
  r.config.boost.seed = derive_seed(config.seed, "boost");
  r.plan = std::make_shared<const EncodingPlan>(fit_encoding(cleaned, config.one_hot));
  FeatureMatrix full = apply_encoding(cleaned, r.plan, EncodeMode::training);
  r.before_balance = class_counts(full);

  const SmoteConfig smote{config.smote_percent, derive_seed(config.seed, "smote")};
  const bool balance = config.smote_percent != 0;
  if (balance) smote.validate();

  if (balance && !config.smote_after_split) full = random_smote(full, smote);
  r.split = shuffle_split(full, config.train_fraction, derive_seed(config.seed, "split"));
  if (balance && config.smote_after_split) r.split.train = random_smote(r.split.train, smote);
  r.after_balance = balance ? (config.smote_after_split ? class_counts(r.split.train) : class_counts(full))
                            : r.before_balance;

  r.fit = fit_gbc(r.split.train, r.config.boost, config.threads);
  r.training = evaluate(r.fit.model, r.split.train).metrics;
  r.validation = evaluate(r.fit.model, r.split.validation);
  return r;
}

}  // namespace flightgb
