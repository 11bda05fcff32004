#pragma once

// Dataset -> numeric FeatureMatrix.
//
// Categorical values get codes by lexicographic (byte-wise UTF-8) order of
// their raw text, so "10" sorts before "2". Selected categorical columns are
// expanded into one binary column per category ("Name=value"). Continuous
// columns pass through.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "flightgb/dataset.hpp"
#include "flightgb/error.hpp"
#include "flightgb/matrix.hpp"
#include "flightgb/rng.hpp"

namespace flightgb {

/// Airport and world-area columns: the low-cardinality categorical features.
inline const std::set<std::string>& default_one_hot_columns() {
  static const std::set<std::string> cols = {"Origin_Airport_ID", "Origin_World_Area_Code",
                                             "Destination_Airport_ID",
                                             "Destination_World_Area_Code"};
  return cols;
}

struct FeatureColumn {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<std::string> categories;  // strictly sorted; code = index
  bool one_hot = false;

  std::optional<std::size_t> code_of(std::string_view value) const {
    auto it = std::lower_bound(categories.begin(), categories.end(), value);
    if (it == categories.end() || *it != value) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
  }

  std::size_t width() const noexcept { return one_hot ? categories.size() : 1; }

  friend bool operator==(const FeatureColumn&, const FeatureColumn&) = default;
};

struct EncodingPlan {
  Schema schema;
  std::vector<FeatureColumn> features;  // schema order, label excluded

  std::vector<std::string> output_names() const {
    std::vector<std::string> names;
    for (const auto& f : features) {
      if (f.one_hot)
        for (const auto& c : f.categories) names.push_back(f.name + "=" + c);
      else
        names.push_back(f.name);
    }
    return names;
  }

  std::size_t width() const noexcept {
    std::size_t w = 0;
    for (const auto& f : features) w += f.width();
    return w;
  }

  friend bool operator==(const EncodingPlan&, const EncodingPlan&) = default;

  nlohmann::json to_json() const {
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& f : features) {
      nlohmann::json jf = {{"name", f.name}, {"kind", std::string(to_string(f.kind))}};
      if (f.kind == ColumnKind::categorical) {
        jf["categories"] = f.categories;
        jf["one_hot"] = f.one_hot;
      }
      feats.push_back(std::move(jf));
    }
    return {{"schema", schema.to_json()}, {"features", feats}};
  }

  static EncodingPlan from_json(const nlohmann::json& j) {
    EncodingPlan plan;
    plan.schema = Schema::from_json(j.at("schema"));
    for (const auto& jf : j.at("features")) {
      FeatureColumn f;
      f.name = jf.at("name").get<std::string>();
      f.kind = column_kind_from_string(jf.at("kind").get<std::string>());
      if (f.kind == ColumnKind::categorical) {
        f.categories = jf.at("categories").get<std::vector<std::string>>();
        f.one_hot = jf.at("one_hot").get<bool>();
        if (std::adjacent_find(f.categories.begin(), f.categories.end(),
                               std::greater_equal<>()) != f.categories.end())
          throw Error(Errc::CorruptModel, "categories of '" + f.name + "' are not strictly sorted");
      }
      plan.features.push_back(std::move(f));
    }
    return plan;
  }
};

/// Numeric design matrix with binary labels. `labels` is empty for unlabeled
/// (prediction-only) data, otherwise it has one entry per row.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::uint8_t> labels;
  std::vector<std::string> column_names;
  std::string label_name = "label";
  std::shared_ptr<const EncodingPlan> plan;
  /// Prediction-mode cells whose category was not in the plan.
  std::size_t unseen_categories = 0;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }
  bool labeled() const noexcept { return !labels.empty() || values.rows() == 0; }

  std::size_t positives() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  }

  FeatureMatrix select_rows(std::span<const std::size_t> idx) const {
    FeatureMatrix out;
    out.values = values.select_rows(idx);
    if (!labels.empty()) {
      out.labels.reserve(idx.size());
      for (auto i : idx) out.labels.push_back(labels[i]);
    }
    out.column_names = column_names;
    out.label_name = label_name;
    out.plan = plan;
    return out;
  }
};

inline EncodingPlan fit_encoding(const Dataset& ds, const std::set<std::string>& one_hot) {
  ds.schema.validate();
  for (const auto& name : one_hot) {
    const auto c = ds.schema.index_of(name);
    if (ds.schema.columns[c].kind != ColumnKind::categorical)
      throw Error(Errc::NotCategorical, "one-hot column '" + name + "' is not categorical");
  }
  EncodingPlan plan;
  plan.schema = ds.schema;
  for (std::size_t c = 0; c < ds.schema.columns.size(); ++c) {
    const auto& col = ds.schema.columns[c];
    if (col.kind == ColumnKind::label) continue;
    FeatureColumn f{col.name, col.kind, {}, false};
    if (col.kind == ColumnKind::categorical) {
      std::set<std::string> distinct;
      for (const auto& row : ds.rows)
        if (!is_missing(row[c])) distinct.insert(cell_text(row[c]));
      f.categories.assign(distinct.begin(), distinct.end());
      f.one_hot = one_hot.contains(col.name);
    }
    plan.features.push_back(std::move(f));
  }
  return plan;
}

enum class EncodeMode {
  /// Every category must be in the plan; every label must be present.
  training,
  /// Unseen one-hot categories give an all-zero group, unseen integer-coded
  /// categories give code -1; both are counted in unseen_categories. Labels
  /// are kept only when every row has one.
  prediction,
};

inline FeatureMatrix apply_encoding(const Dataset& ds, std::shared_ptr<const EncodingPlan> plan,
                                    EncodeMode mode = EncodeMode::training) {
  if (!plan) throw Error(Errc::InvalidArgument, "apply_encoding needs a plan");
  const Schema& schema = plan->schema;
  if (ds.schema.columns != schema.columns)
    throw Error(Errc::SchemaMismatch, "dataset schema differs from the encoding plan's schema");

  FeatureMatrix fm;
  fm.column_names = plan->output_names();
  fm.label_name = schema.label_name();
  fm.plan = plan;
  const std::size_t width = plan->width();
  const std::size_t li = schema.label_index();

  // source column of each plan feature
  std::vector<std::size_t> src;
  for (const auto& f : plan->features) src.push_back(schema.index_of(f.name));

  std::vector<double> data;
  data.reserve(ds.rows.size() * width);
  bool all_labeled = true;
  std::vector<std::uint8_t> labels;
  labels.reserve(ds.rows.size());

  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    const Row& row = ds.rows[r];
    for (std::size_t k = 0; k < plan->features.size(); ++k) {
      const FeatureColumn& f = plan->features[k];
      const Cell& cell = row[src[k]];
      if (is_missing(cell))
        throw Error(Errc::MissingValue,
                    "row " + std::to_string(r) + ": feature '" + f.name + "' is missing");
      if (f.kind == ColumnKind::continuous) {
        const double* v = std::get_if<double>(&cell);
        double value = 0.0;
        if (v) {
          value = *v;
        } else if (auto p = parse_number(cell_text(cell))) {
          value = *p;
        } else {
          throw Error(Errc::ParseError, "row " + std::to_string(r) + ": feature '" + f.name +
                                            "' is not numeric");
        }
        if (!std::isfinite(value))
          throw Error(Errc::NonFiniteFeature, "row " + std::to_string(r) + ": feature '" +
                                                  f.name + "' is not finite");
        data.push_back(value);
        continue;
      }
      const std::string text = cell_text(cell);
      const auto code = f.code_of(text);
      if (!code && mode == EncodeMode::training)
        throw Error(Errc::UnseenCategory,
                    "feature '" + f.name + "' has category '" + text + "' absent from the plan");
      if (!code) ++fm.unseen_categories;
      if (f.one_hot) {
        for (std::size_t c = 0; c < f.categories.size(); ++c)
          data.push_back(code && *code == c ? 1.0 : 0.0);
      } else {
        data.push_back(code ? static_cast<double>(*code) : -1.0);
      }
    }
    const Cell& lab = row[li];
    if (is_missing(lab)) {
      if (mode == EncodeMode::training)
        throw Error(Errc::MissingValue, "row " + std::to_string(r) + ": label is missing");
      all_labeled = false;
    } else {
      labels.push_back(label_equals(cell_text(lab), schema.positive_label_value) ? 1 : 0);
    }
  }
  fm.values = Matrix(ds.rows.size(), width, std::move(data));
  if (all_labeled) fm.labels = std::move(labels);
  return fm;
}

/// Decodes an integer code back to the raw category text.
inline const std::string& decode_category(const EncodingPlan& plan, std::string_view column,
                                          std::size_t code) {
  for (const auto& f : plan.features)
    if (f.name == column) {
      if (code >= f.categories.size())
        throw Error(Errc::InvalidArgument, "code out of range for '" + f.name + "'");
      return f.categories[code];
    }
  throw Error(Errc::UnknownColumn, "no feature named '" + std::string(column) + "'");
}

// ---------------------------------------------------------------------------

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<double> values;   // names.size() squared, row-major
  std::vector<bool> degenerate;  // constant column: its correlations are reported as 0

  double at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
};

/// Sample Pearson correlation between the requested columns; the label can be
/// requested by its name.
inline CorrelationMatrix pearson_matrix(const FeatureMatrix& fm,
                                        const std::vector<std::string>& columns) {
  const std::size_t n = fm.rows();
  if (n < 2) throw Error(Errc::TooFewRows, "correlation needs at least two rows");
  const std::size_t k = columns.size();
  std::vector<std::vector<double>> series(k, std::vector<double>(n));
  for (std::size_t c = 0; c < k; ++c) {
    const auto& name = columns[c];
    if (name == fm.label_name) {
      if (fm.labels.size() != n)
        throw Error(Errc::MissingValue, "label requested but matrix is unlabeled");
      for (std::size_t r = 0; r < n; ++r) series[c][r] = fm.labels[r];
      continue;
    }
    auto it = std::find(fm.column_names.begin(), fm.column_names.end(), name);
    if (it == fm.column_names.end())
      throw Error(Errc::UnknownColumn, "no matrix column named '" + name + "'");
    const auto j = static_cast<std::size_t>(it - fm.column_names.begin());
    for (std::size_t r = 0; r < n; ++r) series[c][r] = fm.values(r, j);
  }

  std::vector<double> centered_norm(k);
  for (auto& s : series) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
    for (double& v : s) v -= mean;
  }
  CorrelationMatrix out{columns, std::vector<double>(k * k, 0.0), std::vector<bool>(k, false)};
  for (std::size_t c = 0; c < k; ++c) {
    double ss = 0.0;
    for (double v : series[c]) ss += v * v;
    centered_norm[c] = std::sqrt(ss);
    out.degenerate[c] = !(ss > 0.0);
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double r = 0.0;
      if (!out.degenerate[a] && !out.degenerate[b]) {
        if (a == b) {
          r = 1.0;
        } else {
          double sxy = 0.0;
          for (std::size_t i = 0; i < n; ++i) sxy += series[a][i] * series[b][i];
          r = std::clamp(sxy / (centered_norm[a] * centered_norm[b]), -1.0, 1.0);
        }
      }
      out.values[a * k + b] = r;
      out.values[b * k + a] = r;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SplitPair {
  FeatureMatrix train;
  FeatureMatrix validation;
};

inline std::size_t train_rows_for(std::size_t n, double fraction) {
  // small slack so that e.g. 0.29 * 100 counts as 29
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

/// Permutes rows with Rng(seed).shuffle and puts the first
/// floor(fraction * n) rows in the training part.
inline SplitPair shuffle_split(const FeatureMatrix& fm, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(Errc::InvalidArgument, "train fraction must lie in (0, 1)");
  const std::size_t n = fm.rows();
  if (n < 2) throw Error(Errc::TooFewRows, "splitting needs at least two rows");
  const std::size_t n_train = train_rows_for(n, train_fraction);
  if (n_train == 0 || n_train == n)
    throw Error(Errc::TooFewRows, "split of " + std::to_string(n) + " rows leaves one side empty");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm.begin(), perm.end());
  const std::span<const std::size_t> all(perm);
  return {fm.select_rows(all.first(n_train)), fm.select_rows(all.subspan(n_train))};
}

}  // namespace flightgb
