#pragma once

// Raw tabular data before encoding: schema, typed cells, CSV ingestion,
// row filters, class balance and a synthetic flight-record generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "flightgb/csv.hpp"
#include "flightgb/error.hpp"
#include "flightgb/parallel.hpp"
#include "flightgb/rng.hpp"

namespace flightgb {

enum class ColumnKind { categorical, continuous, label };

inline std::string_view to_string(ColumnKind k) noexcept {
  switch (k) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::label: return "label";
  }
  return "?";
}

inline ColumnKind column_kind_from_string(std::string_view s) {
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "continuous") return ColumnKind::continuous;
  if (s == "label") return ColumnKind::label;
  throw Error(Errc::InvalidSchema, "unknown column kind '" + std::string(s) + "'");
}

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  friend bool operator==(const Column&, const Column&) = default;
};

/// True when the two label texts denote the same class: equal after trimming,
/// or both parse as numbers that compare equal ("1.00" == "1").
inline bool label_equals(std::string_view cell, std::string_view value) {
  const auto a = trim(cell);
  const auto b = trim(value);
  if (a == b) return true;
  const auto na = parse_number(a);
  const auto nb = parse_number(b);
  return na && nb && *na == *nb;
}

struct Schema {
  std::vector<Column> columns;
  std::string positive_label_value = "1";
  std::string negative_label_value = "0";

  friend bool operator==(const Schema&, const Schema&) = default;

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw Error(Errc::UnknownColumn, "no column named '" + std::string(name) + "'");
  }

  std::size_t label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].kind == ColumnKind::label) return i;
    throw Error(Errc::InvalidSchema, "schema has no label column");
  }

  const std::string& label_name() const { return columns[label_index()].name; }

  void validate() const {
    std::set<std::string_view> names;
    std::size_t labels = 0;
    for (const auto& c : columns) {
      if (c.name.empty()) throw Error(Errc::InvalidSchema, "empty column name");
      if (!names.insert(c.name).second)
        throw Error(Errc::InvalidSchema, "duplicate column name '" + c.name + "'");
      if (c.kind == ColumnKind::label) ++labels;
    }
    if (labels != 1)
      throw Error(Errc::InvalidSchema, "schema must have exactly one label column, found " +
                                           std::to_string(labels));
    if (trim(positive_label_value).empty())
      throw Error(Errc::InvalidSchema, "positive_label_value must not be empty");
    if (label_equals(positive_label_value, negative_label_value))
      throw Error(Errc::InvalidSchema, "positive and negative label values coincide");
  }

  nlohmann::json to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns)
      cols.push_back({{"name", c.name}, {"kind", std::string(to_string(c.kind))}});
    return {{"columns", cols},
            {"positive_label_value", positive_label_value},
            {"negative_label_value", negative_label_value}};
  }

  static Schema from_json(const nlohmann::json& j) {
    Schema s;
    try {
      for (const auto& c : j.at("columns"))
        s.columns.push_back({c.at("name").get<std::string>(),
                             column_kind_from_string(c.at("kind").get<std::string>())});
      s.positive_label_value = j.at("positive_label_value").get<std::string>();
      if (j.contains("negative_label_value"))
        s.negative_label_value = j.at("negative_label_value").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidSchema, e.what());
    }
    s.validate();
    return s;
  }

  /// 64-bit FNV-1a over the canonical JSON text, as 16 hex digits.
  std::string digest() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(to_json().dump());
    return os.str();
  }
};

inline Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open schema file '" + path + "'");
  try {
    return Schema::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidSchema, "'" + path + "': " + e.what());
  }
}

using Cell = std::variant<std::monostate, std::string, double>;

inline bool is_missing(const Cell& c) noexcept { return std::holds_alternative<std::monostate>(c); }

inline std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return {};
}

using Row = std::vector<Cell>;

struct Dataset {
  Schema schema;
  std::vector<Row> rows;

  std::size_t size() const noexcept { return rows.size(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct LoadOptions {
  /// Accept files without the label column; label cells become missing.
  bool label_optional = false;
};

inline Dataset read_csv(std::istream& in, const Schema& schema, LoadOptions opts = {},
                        std::string_view source = "<stream>") {
  schema.validate();
  CsvReader reader(in);
  CsvRecord rec;
  const std::string where = std::string(source);
  if (!reader.next(rec)) throw Error(Errc::MissingColumn, where + ": missing header line");

  std::unordered_map<std::string, std::size_t> header;
  for (std::size_t i = 0; i < rec.fields.size(); ++i)
    header.emplace(std::string(trim(rec.fields[i])), i);
  const std::size_t width = rec.fields.size();

  constexpr std::size_t absent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> source_index(schema.columns.size(), absent);
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const auto& col = schema.columns[c];
    if (auto it = header.find(col.name); it != header.end()) {
      source_index[c] = it->second;
    } else if (!(opts.label_optional && col.kind == ColumnKind::label)) {
      throw Error(Errc::MissingColumn, where + ": column '" + col.name + "' not in header");
    }
  }

  Dataset ds{schema, {}};
  while (reader.next(rec)) {
    if (rec.fields.size() != width)
      throw Error(Errc::RowArity, where + ":" + std::to_string(rec.line) + ": expected " +
                                      std::to_string(width) + " fields, found " +
                                      std::to_string(rec.fields.size()));
    Row row;
    row.reserve(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      if (source_index[c] == absent) {
        row.emplace_back();
        continue;
      }
      const auto text = trim(rec.fields[source_index[c]]);
      if (text.empty()) {
        row.emplace_back();
      } else if (schema.columns[c].kind == ColumnKind::continuous) {
        auto v = parse_number(text);
        if (!v)
          throw Error(Errc::ParseError, where + ":" + std::to_string(rec.line) + ": column '" +
                                            schema.columns[c].name + "' has non-numeric value '" +
                                            std::string(text) + "'");
        row.emplace_back(*v);
      } else {
        row.emplace_back(std::string(text));
      }
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

inline Dataset load_csv(const std::string& path, const Schema& schema, LoadOptions opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return read_csv(in, schema, opts, path);
}

inline void write_csv(std::ostream& out, const Dataset& ds) {
  std::vector<std::string> fields;
  for (const auto& c : ds.schema.columns) fields.push_back(c.name);
  write_csv_row(out, fields);
  for (const auto& row : ds.rows) {
    fields.clear();
    for (const auto& cell : row) fields.push_back(cell_text(cell));
    write_csv_row(out, fields);
  }
}

inline void save_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  write_csv(out, ds);
  if (!out) throw Error(Errc::IoError, "write failed for '" + path + "'");
}

inline Dataset concat(const std::vector<Dataset>& parts) {
  if (parts.empty()) throw Error(Errc::EmptyInput, "concat needs at least one dataset");
  Dataset out{parts.front().schema, {}};
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.schema != out.schema) throw Error(Errc::SchemaMismatch, "concat parts have different schemas");
    total += p.rows.size();
  }
  out.rows.reserve(total);
  for (const auto& p : parts) out.rows.insert(out.rows.end(), p.rows.begin(), p.rows.end());
  return out;
}

/// Loads several files (concurrently when threads > 1) and concatenates them
/// in the order given.
inline Dataset load_all(const std::vector<std::string>& paths, const Schema& schema,
                        std::size_t threads = 1, LoadOptions opts = {}) {
  std::vector<Dataset> parts(paths.size());
  parallel_for(paths.size(), threads,
               [&](std::size_t i) { parts[i] = load_csv(paths[i], schema, opts); });
  return concat(parts);
}

inline Dataset filter_equals(const Dataset& ds, std::string_view column,
                             const std::set<std::string>& allowed) {
  const std::size_t c = ds.schema.index_of(column);
  std::set<std::string, std::less<>> keys;
  for (const auto& a : allowed) keys.emplace(trim(a));
  Dataset out{ds.schema, {}};
  for (const auto& row : ds.rows) {
    if (is_missing(row[c])) continue;
    const std::string text = cell_text(row[c]);
    if (keys.contains(trim(text))) out.rows.push_back(row);
  }
  return out;
}

inline Dataset drop_columns(const Dataset& ds, const std::vector<std::string>& names) {
  std::vector<bool> drop(ds.schema.columns.size(), false);
  for (const auto& n : names) {
    const std::size_t c = ds.schema.index_of(n);
    if (ds.schema.columns[c].kind == ColumnKind::label)
      throw Error(Errc::CannotDropLabel, "cannot drop label column '" + n + "'");
    drop[c] = true;
  }
  Dataset out;
  out.schema.positive_label_value = ds.schema.positive_label_value;
  out.schema.negative_label_value = ds.schema.negative_label_value;
  for (std::size_t c = 0; c < drop.size(); ++c)
    if (!drop[c]) out.schema.columns.push_back(ds.schema.columns[c]);
  out.rows.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    Row r;
    r.reserve(out.schema.columns.size());
    for (std::size_t c = 0; c < drop.size(); ++c)
      if (!drop[c]) r.push_back(row[c]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline Dataset drop_missing_labels(const Dataset& ds) {
  const std::size_t li = ds.schema.label_index();
  Dataset out{ds.schema, {}};
  for (const auto& row : ds.rows)
    if (!is_missing(row[li])) out.rows.push_back(row);
  return out;
}

struct ClassBalance {
  std::size_t negatives = 0;
  std::size_t positives = 0;
  std::size_t missing = 0;

  std::size_t total() const noexcept { return negatives + positives + missing; }
  friend bool operator==(const ClassBalance&, const ClassBalance&) = default;
};

inline ClassBalance class_balance(const Dataset& ds) {
  const std::size_t li = ds.schema.label_index();
  ClassBalance b;
  for (const auto& row : ds.rows) {
    const Cell& cell = row[li];
    if (is_missing(cell)) {
      ++b.missing;
      continue;
    }
    const std::string text = cell_text(cell);
    if (label_equals(text, ds.schema.positive_label_value))
      ++b.positives;
    else if (label_equals(text, ds.schema.negative_label_value))
      ++b.negatives;
    else
      throw Error(Errc::UnrecognizedLabelValue, "label value '" + text + "' is neither '" +
                                                    ds.schema.positive_label_value + "' nor '" +
                                                    ds.schema.negative_label_value + "'");
  }
  return b;
}

// ---------------------------------------------------------------------------
// Synthetic flight records

struct SyntheticSpec {
  std::size_t rows = 1000;
  double positive_ratio = 0.2;
  std::uint64_t seed = 0;
  /// Standard deviation of the noise added to the hidden delay score.
  double noise = 0.6;
};

/// Column layout of the generated data: the flight attributes used for
/// modelling (calendar, flight number, airports, scheduled times) plus the
/// arrival-delay label. Label values are "1.00" / "0.00".
inline Schema synthetic_schema() {
  Schema s;
  s.columns = {{"Month", ColumnKind::categorical},
               {"Day_of_Month", ColumnKind::categorical},
               {"Day_of_Week", ColumnKind::categorical},
               {"Flight_Num", ColumnKind::categorical},
               {"Origin_Airport_ID", ColumnKind::categorical},
               {"Origin_World_Area_Code", ColumnKind::categorical},
               {"Destination_Airport_ID", ColumnKind::categorical},
               {"Destination_World_Area_Code", ColumnKind::categorical},
               {"CRS_Departure_Time", ColumnKind::continuous},
               {"CRS_Arrival_Time", ColumnKind::continuous},
               {"Arr_Del_15", ColumnKind::label}};
  s.positive_label_value = "1.00";
  s.negative_label_value = "0.00";
  return s;
}

/// Deterministic in (spec). The label is 1 for the round(rows * ratio) rows
/// with the highest hidden score, which grows with departure and arrival
/// time of day, congested airports and peak months, plus Gaussian noise.
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.rows < 10) throw Error(Errc::InvalidSpec, "synthetic row count must be at least 10");
  if (!(spec.positive_ratio > 0.0 && spec.positive_ratio < 1.0))
    throw Error(Errc::InvalidSpec, "positive ratio must lie in (0, 1)");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise))
    throw Error(Errc::InvalidSpec, "noise must be a finite non-negative number");

  struct Airport {
    const char* id;
    const char* area;
    double congestion;
  };
  static constexpr Airport airports[] = {{"10397", "34", -0.15},   // ATL
                                         {"11298", "74", 0.05},    // DFW
                                         {"12478", "22", 0.35},    // JFK
                                         {"12892", "91", 0.10},    // LAX
                                         {"13930", "41", 0.45}};   // ORD
  static constexpr int days_in_month[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  static constexpr double month_effect[] = {0.1, 0.0, -0.1, -0.1, 0.0, 0.35, 0.4, 0.2, -0.2, -0.2, -0.1, 0.4};

  Rng rng(derive_seed(spec.seed, "synthetic"));
  Dataset ds{synthetic_schema(), {}};
  ds.rows.reserve(spec.rows);
  std::vector<double> score(spec.rows);

  auto hhmm = [](int minutes) { return static_cast<double>((minutes / 60) * 100 + minutes % 60); };

  for (std::size_t i = 0; i < spec.rows; ++i) {
    const int month = 1 + static_cast<int>(rng.below(12));
    const int dom = 1 + static_cast<int>(rng.below(days_in_month[month - 1]));
    const int dow = 1 + static_cast<int>(rng.below(7));
    const int flight = 1 + static_cast<int>(rng.below(2400));
    const auto o = rng.below(5);
    const auto d = (o + 1 + rng.below(4)) % 5;
    const int dep = 330 + static_cast<int>(rng.below(1080));  // 05:30 .. 23:29
    const int duration =
        75 + 35 * static_cast<int>(o > d ? o - d : d - o) + static_cast<int>(rng.below(60));
    const int arr = (dep + duration) % 1440;

    const double s = 2.2 * (dep / 1440.0 - 0.5) + 0.9 * (arr / 1440.0 - 0.5) +
                     airports[o].congestion + 0.6 * airports[d].congestion +
                     month_effect[month - 1] + (dow == 5 ? 0.2 : 0.0) + spec.noise * rng.normal();
    score[i] = s;

    Row row;
    row.reserve(ds.schema.columns.size());
    row.emplace_back(std::to_string(month));
    row.emplace_back(std::to_string(dom));
    row.emplace_back(std::to_string(dow));
    row.emplace_back(std::to_string(flight));
    row.emplace_back(std::string(airports[o].id));
    row.emplace_back(std::string(airports[o].area));
    row.emplace_back(std::string(airports[d].id));
    row.emplace_back(std::string(airports[d].area));
    row.emplace_back(hhmm(dep));
    row.emplace_back(hhmm(arr));
    row.emplace_back(std::string("0.00"));
    ds.rows.push_back(std::move(row));
  }

  const auto positives = static_cast<std::size_t>(
      std::llround(spec.positive_ratio * static_cast<double>(spec.rows)));
  std::vector<std::size_t> order(spec.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  const std::size_t li = ds.schema.label_index();
  for (std::size_t r = 0; r < positives; ++r) ds.rows[order[r]][li] = std::string("1.00");
  return ds;
}

}  // namespace flightgb
