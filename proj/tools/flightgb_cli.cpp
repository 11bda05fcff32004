// flightgb: command-line front end for the flight-delay boosting pipeline.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric/training error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flightgb/flightgb.hpp"

namespace fg = flightgb;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_data = 3;
constexpr int exit_numeric = 4;

struct DataOptions {
  std::vector<std::string> inputs;
  std::string schema;
  std::vector<std::string> filters;
  std::vector<std::string> drop;
  std::vector<std::string> one_hot;
  std::size_t threads = 1;
};

struct TrainOptions {
  unsigned smote_percent = 0;
  bool smote_after_split = false;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::size_t estimators = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::string model_out;
  std::string report_out;
  std::string roc_out;
  std::string timestamp;
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool multiple_inputs = true) {
  if (multiple_inputs)
    cmd->add_option("inputs", o.inputs, "Input CSV files, concatenated in order")->required();
  else
    cmd->add_option("input", o.inputs, "Input CSV file")->required()->expected(1);
  cmd->add_option("--schema", o.schema, "Schema JSON file")->required();
  cmd->add_option("--filter", o.filters, "Keep rows where COLUMN is one of the values: COLUMN=v1,v2 (repeatable)");
  cmd->add_option("--drop", o.drop, "Columns to drop")->delimiter(',');
  cmd->add_option("--one-hot", o.one_hot,
                  "Categorical columns to one-hot encode ('none' for no one-hot columns; default: airport and world-area columns)")
      ->delimiter(',');
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void add_train_options(CLI::App* cmd, TrainOptions& t) {
  cmd->add_option("--smote-percent", t.smote_percent, "Randomized-SMOTE percentage (0 disables balancing)");
  cmd->add_flag("--smote-after-split", t.smote_after_split, "Balance only the training part after splitting");
  cmd->add_option("--train-frac", t.train_fraction, "Training fraction of the shuffled data")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", t.seed, "Master random seed");
  cmd->add_option("--estimators", t.estimators, "Boosting iterations");
  cmd->add_option("--max-depth", t.max_depth, "Maximum tree depth");
  cmd->add_option("--learning-rate", t.learning_rate, "Shrinkage applied to every tree");
  cmd->add_option("--min-samples-split", t.min_samples_split, "Minimum rows to split a node");
  cmd->add_option("--min-samples-leaf", t.min_samples_leaf, "Minimum rows per leaf");
  cmd->add_option("--model-out", t.model_out, "Write the trained model (JSON)");
  cmd->add_option("--report-out", t.report_out, "Write a machine-readable report (JSON)");
  cmd->add_option("--roc-out", t.roc_out, "Write validation ROC points (CSV)");
  cmd->add_option("--timestamp", t.timestamp, "Timestamp recorded in the model file (default: $SOURCE_DATE_EPOCH or none)");
}

fg::PrepareConfig prepare_config(const DataOptions& o) {
  fg::PrepareConfig cfg;
  for (const auto& f : o.filters) {
    const auto eq = f.find('=');
    if (eq == std::string::npos || eq == 0)
      throw fg::Error(fg::Errc::InvalidArgument, "--filter expects COLUMN=v1,v2, got '" + f + "'");
    std::set<std::string> values;
    std::string rest = f.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = std::min(rest.find(',', pos), rest.size());
      values.insert(std::string(fg::trim(std::string_view(rest).substr(pos, comma - pos))));
      pos = comma + 1;
    }
    cfg.filters.emplace_back(f.substr(0, eq), std::move(values));
  }
  cfg.drop = o.drop;
  return cfg;
}

std::set<std::string> one_hot_columns(const DataOptions& o, const fg::Schema& schema) {
  if (o.one_hot.empty()) return fg::default_one_hot_for(schema);
  std::set<std::string> out;
  for (const auto& c : o.one_hot)
    if (c != "none" && !c.empty()) out.insert(c);
  return out;
}

fg::Dataset load_clean(const DataOptions& o) {
  const fg::Schema schema = fg::load_schema(o.schema);
  return fg::prepare_dataset(fg::load_all(o.inputs, schema, o.threads), prepare_config(o));
}

std::optional<std::string> model_timestamp(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) return std::string(env);
  return std::nullopt;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fg::Error(fg::Errc::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw fg::Error(fg::Errc::IoError, "write failed for '" + path + "'");
}

void write_roc(const std::string& path, const fg::RocCurve& roc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fg::Error(fg::Errc::IoError, "cannot write '" + path + "'");
  fg::write_roc_csv(out, roc);
}

void print_balance(const char* what, const fg::ClassBalance& b) {
  std::cout << what << ": negatives " << b.negatives << ", positives " << b.positives << ", missing "
            << b.missing << '\n';
}

fg::BoostParams boost_params(const TrainOptions& t) {
  fg::BoostParams p;
  p.estimators = t.estimators;
  p.learning_rate = t.learning_rate;
  p.tree.max_depth = t.max_depth;
  p.tree.min_samples_split = t.min_samples_split;
  p.tree.min_samples_leaf = t.min_samples_leaf;
  return p;
}

fg::PipelineConfig pipeline_config(const DataOptions& o, const TrainOptions& t, const fg::Schema& schema) {
  fg::PipelineConfig cfg;
  cfg.one_hot = one_hot_columns(o, schema);
  cfg.smote_percent = t.smote_percent;
  cfg.smote_after_split = t.smote_after_split;
  cfg.train_fraction = t.train_fraction;
  cfg.seed = t.seed;
  cfg.boost = boost_params(t);
  cfg.threads = o.threads;
  return cfg;
}

void print_single_evaluation(const fg::Evaluation& e) {
  const auto& m = e.metrics;
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "accuracy            " << m.accuracy << '\n'
            << "recall              " << m.recall << '\n'
            << "precision           " << m.precision << '\n'
            << "f1                  " << m.f1 << '\n'
            << "weighted recall     " << m.weighted_recall << '\n'
            << "weighted precision  " << m.weighted_precision << '\n'
            << "weighted f1         " << m.weighted_f1 << '\n'
            << "auroc               " << e.roc.auroc << '\n'
            << "confusion tp " << m.confusion.tp << " fn " << m.confusion.fn << " fp " << m.confusion.fp
            << " tn " << m.confusion.tn << '\n';
  std::cout.unsetf(std::ios::fixed);
}

// --- subcommands -----------------------------------------------------------

int run_synth(std::size_t rows, double ratio, std::uint64_t seed, double noise, const std::string& out,
              const std::string& schema_out) {
  const fg::Dataset ds = fg::generate_synthetic({rows, ratio, seed, noise});
  fg::save_csv(out, ds);
  if (!schema_out.empty()) write_text(schema_out, ds.schema.to_json().dump(2) + "\n");
  print_balance("synthetic", fg::class_balance(ds));
  return 0;
}

int run_prepare(const DataOptions& o, const std::string& out, const std::string& schema_out) {
  const fg::Schema schema = fg::load_schema(o.schema);
  const fg::Dataset raw = fg::load_all(o.inputs, schema, o.threads);
  std::cout << "loaded " << raw.size() << " rows from " << o.inputs.size() << " file(s)\n";
  const fg::Dataset clean = fg::prepare_dataset(raw, prepare_config(o));
  print_balance("after cleaning", fg::class_balance(clean));
  fg::save_csv(out, clean);
  if (!schema_out.empty()) write_text(schema_out, clean.schema.to_json().dump(2) + "\n");
  return 0;
}

int run_balance(const DataOptions& o, unsigned percent, std::uint64_t seed, const std::string& out) {
  const fg::Dataset clean = load_clean(o);
  auto plan = std::make_shared<const fg::EncodingPlan>(fg::fit_encoding(clean, one_hot_columns(o, clean.schema)));
  const fg::FeatureMatrix fm = fg::apply_encoding(clean, plan);
  const auto before = fg::class_counts(fm);
  const fg::FeatureMatrix balanced = fg::random_smote(fm, {percent, fg::derive_seed(seed, "smote")});
  const auto after = fg::class_counts(balanced);
  std::cout << "class,before,after\n0," << before.negatives << ',' << after.negatives << "\n1," << before.positives
            << ',' << after.positives << '\n';

  std::ofstream os(out, std::ios::binary);
  if (!os) throw fg::Error(fg::Errc::IoError, "cannot write '" + out + "'");
  auto header = balanced.column_names;
  header.push_back(balanced.label_name);
  fg::write_csv_row(os, header);
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < balanced.rows(); ++i) {
    fields.clear();
    for (double v : balanced.values.row(i)) fields.push_back(fg::format_number(v));
    fields.push_back(balanced.labels[i] ? "1" : "0");
    fg::write_csv_row(os, fields);
  }
  return 0;
}

int run_train(const DataOptions& o, const TrainOptions& t) {
  const fg::Dataset clean = load_clean(o);
  const fg::PipelineResult r = fg::run_pipeline(clean, pipeline_config(o, t, clean.schema));
  std::cout << "rows: train " << r.split.train.rows() << ", validation " << r.split.validation.rows() << '\n'
            << "class counts before balancing: " << r.before_balance.negatives << " / " << r.before_balance.positives
            << ", after: " << r.after_balance.negatives << " / " << r.after_balance.positives << '\n';
  fg::print_metrics_table(std::cout, r.training, r.validation.metrics, r.validation.roc.auroc, r.config.strategy());
  if (!t.model_out.empty()) fg::save_model(r.fit.model, r.metadata(model_timestamp(t.timestamp)), t.model_out);
  if (!t.report_out.empty()) write_text(t.report_out, r.report_json().dump(2) + "\n");
  if (!t.roc_out.empty()) write_roc(t.roc_out, r.validation.roc);
  return 0;
}

int run_tune(const DataOptions& o, const TrainOptions& t, const std::string& grid_text, std::size_t folds,
             const std::string& scoring) {
  const fg::Grid grid = grid_text.empty() ? fg::default_grid() : fg::Grid::parse(grid_text);
  if (scoring != "accuracy" && scoring != "f1")
    throw fg::Error(fg::Errc::InvalidArgument, "--scoring must be 'accuracy' or 'f1'");
  const fg::Dataset clean = load_clean(o);
  fg::PipelineConfig cfg = pipeline_config(o, t, clean.schema);

  // Same encode/balance/split as train; the search runs on the training part.
  auto plan = std::make_shared<const fg::EncodingPlan>(fg::fit_encoding(clean, cfg.one_hot));
  fg::FeatureMatrix full = fg::apply_encoding(clean, plan);
  const fg::SmoteConfig smote{cfg.smote_percent, fg::derive_seed(cfg.seed, "smote")};
  if (cfg.smote_percent && !cfg.smote_after_split) full = fg::random_smote(full, smote);
  fg::SplitPair split = fg::shuffle_split(full, cfg.train_fraction, fg::derive_seed(cfg.seed, "split"));
  if (cfg.smote_percent && cfg.smote_after_split) split.train = fg::random_smote(split.train, smote);

  const fg::GridResult result =
      fg::grid_search(split.train, grid, folds, cfg.boost, fg::derive_seed(cfg.seed, "tune"),
                      scoring == "f1" ? fg::Scoring::f1 : fg::Scoring::accuracy, o.threads);
  std::cout << "strategy " << cfg.strategy() << ", " << folds << "-fold stratified CV, scoring " << scoring << '\n';
  result.print_table(std::cout);
  std::cout << "best: estimators " << result.best_estimators << ", max_depth " << result.best_depth << '\n';
  if (!t.report_out.empty()) write_text(t.report_out, result.to_json().dump(2) + "\n");

  if (!t.model_out.empty() || !t.roc_out.empty()) {
    cfg.boost.estimators = result.best_estimators;
    cfg.boost.tree.max_depth = result.best_depth;
    const fg::PipelineResult r = fg::run_pipeline(clean, cfg);
    fg::print_metrics_table(std::cout, r.training, r.validation.metrics, r.validation.roc.auroc, cfg.strategy());
    if (!t.model_out.empty()) fg::save_model(r.fit.model, r.metadata(model_timestamp(t.timestamp)), t.model_out);
    if (!t.roc_out.empty()) write_roc(t.roc_out, r.validation.roc);
  }
  return 0;
}

fg::Dataset load_for_model(const fg::LoadedModel& lm, const std::string& input, const std::string& schema_path,
                           bool label_optional) {
  if (!lm.model.plan) throw fg::Error(fg::Errc::CorruptModel, "model file carries no encoding plan");
  const fg::Schema& schema = lm.model.plan->schema;
  if (!schema_path.empty() && fg::load_schema(schema_path).digest() != schema.digest())
    throw fg::Error(fg::Errc::SchemaMismatch, "schema file does not match the model's schema");
  return fg::load_csv(input, schema, {label_optional});
}

int run_evaluate(const std::string& model_path, const std::string& input, const std::string& schema_path,
                 const std::string& roc_out, const std::string& report_out) {
  const fg::LoadedModel lm = fg::load_model(model_path);
  const fg::Dataset ds = fg::drop_missing_labels(load_for_model(lm, input, schema_path, false));
  const fg::FeatureMatrix fm = fg::apply_encoding(ds, lm.model.plan, fg::EncodeMode::prediction);
  if (fm.unseen_categories) std::cerr << "warning: " << fm.unseen_categories << " unseen category value(s)\n";
  const fg::Evaluation e = fg::evaluate(lm.model, fm);
  print_single_evaluation(e);
  if (!roc_out.empty()) write_roc(roc_out, e.roc);
  if (!report_out.empty()) {
    nlohmann::json j = e.metrics.to_json();
    j["auroc"] = e.roc.auroc;
    j["unseen_categories"] = fm.unseen_categories;
    write_text(report_out, j.dump(2) + "\n");
  }
  return 0;
}

int run_predict(const std::string& model_path, const std::string& input, const std::string& schema_path,
                const std::string& out, double threshold) {
  const fg::LoadedModel lm = fg::load_model(model_path);
  const fg::Dataset ds = load_for_model(lm, input, schema_path, true);
  const fg::FeatureMatrix fm = fg::apply_encoding(ds, lm.model.plan, fg::EncodeMode::prediction);
  if (fm.unseen_categories) std::cerr << "warning: " << fm.unseen_categories << " unseen category value(s)\n";

  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::binary);
    if (!file) throw fg::Error(fg::Errc::IoError, "cannot write '" + out + "'");
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "row,decision,probability,label\n";
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    const double score = lm.model.decision_function(fm.values.row(i));
    os << i << ',' << fg::format_number(score) << ',' << fg::format_number(fg::sigmoid(score)) << ','
       << int(fg::BoostedModel::label_for_score(score, threshold)) << '\n';
  }
  return 0;
}

int run_corr(const DataOptions& o, std::vector<std::string> columns, const std::string& out) {
  const fg::Dataset clean = load_clean(o);
  auto plan = std::make_shared<const fg::EncodingPlan>(fg::fit_encoding(clean, one_hot_columns(o, clean.schema)));
  const fg::FeatureMatrix fm = fg::apply_encoding(clean, plan);
  if (columns.empty()) {
    for (const auto& c : clean.schema.columns)
      if (c.kind == fg::ColumnKind::continuous) columns.push_back(c.name);
    columns.push_back(fm.label_name);
  }
  const fg::CorrelationMatrix cm = fg::pearson_matrix(fm, columns);

  std::vector<std::string> header{""};
  header.insert(header.end(), columns.begin(), columns.end());
  std::ostringstream csv;
  fg::write_csv_row(csv, header);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    std::vector<std::string> row{columns[i]};
    for (std::size_t j = 0; j < columns.size(); ++j) row.push_back(fg::format_number(cm.at(i, j)));
    fg::write_csv_row(csv, row);
  }
  if (out.empty())
    std::cout << csv.str();
  else
    write_text(out, csv.str());
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (cm.degenerate[i]) std::cerr << "warning: column '" << columns[i] << "' is constant\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-boosted flight arrival delay classifier"};
  app.require_subcommand(1);

  // synth
  std::size_t synth_rows = 1000;
  double synth_ratio = 0.2, synth_noise = 0.6;
  std::uint64_t synth_seed = 0;
  std::string synth_out, synth_schema_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic flight dataset");
  synth->add_option("--rows", synth_rows, "Number of rows");
  synth->add_option("--ratio", synth_ratio, "Fraction of delayed (label 1) rows");
  synth->add_option("--noise", synth_noise, "Noise level of the hidden delay rule");
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->add_option("--schema-out", synth_schema_out, "Write the matching schema JSON");

  // prepare
  DataOptions prep_opts;
  std::string prep_out, prep_schema_out;
  auto* prepare = app.add_subcommand("prepare", "Concatenate, filter, drop columns and remove unlabeled rows");
  add_data_options(prepare, prep_opts);
  prepare->add_option("--out", prep_out, "Canonical output CSV")->required();
  prepare->add_option("--schema-out", prep_schema_out, "Write the schema of the output");

  // balance
  DataOptions bal_opts;
  unsigned bal_percent = 200;
  std::uint64_t bal_seed = 0;
  std::string bal_out;
  auto* balance = app.add_subcommand("balance", "Encode and apply Randomized-SMOTE; writes the numeric matrix");
  add_data_options(balance, bal_opts);
  balance->add_option("--smote-percent", bal_percent, "Randomized-SMOTE percentage (multiple of 100)");
  balance->add_option("--seed", bal_seed, "Master random seed");
  balance->add_option("--out", bal_out, "Output CSV of the encoded, balanced matrix")->required();

  // train
  DataOptions train_opts;
  TrainOptions train_t;
  auto* train = app.add_subcommand("train", "Encode, optionally balance, split, train and evaluate");
  add_data_options(train, train_opts);
  add_train_options(train, train_t);

  // tune
  DataOptions tune_opts;
  TrainOptions tune_t;
  std::string grid_text, scoring = "accuracy";
  std::size_t folds = 3;
  auto* tune = app.add_subcommand("tune", "Grid search over estimators x max depth with stratified CV");
  add_data_options(tune, tune_opts);
  add_train_options(tune, tune_t);
  tune->add_option("--grid", grid_text, "Grid as e1,e2,...xd1,d2,... (default 100,200,300,400,500x3,5,7)");
  tune->add_option("--folds", folds, "Cross-validation folds");
  tune->add_option("--scoring", scoring, "accuracy or f1");

  // evaluate
  std::string eval_model, eval_input, eval_schema, eval_roc, eval_report;
  auto* evaluate = app.add_subcommand("evaluate", "Score a labeled CSV with a saved model");
  evaluate->add_option("--model", eval_model, "Model file")->required();
  evaluate->add_option("input", eval_input, "Labeled CSV")->required();
  evaluate->add_option("--schema", eval_schema, "Check the data schema against the model's");
  evaluate->add_option("--roc-out", eval_roc, "Write ROC points (CSV)");
  evaluate->add_option("--report-out", eval_report, "Write metrics (JSON)");

  // predict
  std::string pred_model, pred_input, pred_schema, pred_out;
  double threshold = 0.5;
  auto* predict = app.add_subcommand("predict", "Decision scores, probabilities and labels for a CSV");
  predict->add_option("--model", pred_model, "Model file")->required();
  predict->add_option("input", pred_input, "Input CSV")->required();
  predict->add_option("--schema", pred_schema, "Check the data schema against the model's");
  predict->add_option("--out", pred_out, "Output CSV (default: stdout)");
  predict->add_option("--threshold", threshold, "Probability threshold for label 1");

  // corr
  DataOptions corr_opts;
  std::vector<std::string> corr_columns;
  std::string corr_out;
  auto* corr = app.add_subcommand("corr", "Pearson correlation matrix of encoded columns and the label");
  add_data_options(corr, corr_opts);
  corr->add_option("--columns", corr_columns, "Columns (default: continuous columns and the label)")->delimiter(',');
  corr->add_option("--out", corr_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*synth) return run_synth(synth_rows, synth_ratio, synth_seed, synth_noise, synth_out, synth_schema_out);
    if (*prepare) return run_prepare(prep_opts, prep_out, prep_schema_out);
    if (*balance) return run_balance(bal_opts, bal_percent, bal_seed, bal_out);
    if (*train) return run_train(train_opts, train_t);
    if (*tune) return run_tune(tune_opts, tune_t, grid_text, folds, scoring);
    if (*evaluate) return run_evaluate(eval_model, eval_input, eval_schema, eval_roc, eval_report);
    if (*predict) return run_predict(pred_model, pred_input, pred_schema, pred_out, threshold);
    if (*corr) return run_corr(corr_opts, corr_columns, corr_out);
  } catch (const fg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.category()) {
      case fg::ErrorCategory::usage: return exit_usage;
      case fg::ErrorCategory::data: return exit_data;
      case fg::ErrorCategory::numeric: return exit_numeric;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}
