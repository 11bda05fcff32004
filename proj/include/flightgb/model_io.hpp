#pragma once

// Versioned JSON model files.
//
// {
//   "format": "flightgb-model", "version": 1,
//   "f0": <double>, "learning_rate": <double>, "n_features": <int>,
//   "trees": [ {"nodes": [[feature, threshold, value, left, right], ...]}, ... ],
//   "encoding": <encoding plan> | null,
//   "schema_digest": "<16 hex digits>" | null,
//   "metadata": {"seed", "estimators", "max_depth", "min_samples_split",
//                "min_samples_leaf", "learning_rate", "smote_percent", "timestamp"}
// }
//
// Leaves have feature -1 and child indices -1. Object keys are written in
// sorted order and doubles in shortest round-trip form, so the same model
// and metadata always give the same bytes.

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "flightgb/boost.hpp"
#include "flightgb/encode.hpp"
#include "flightgb/error.hpp"

namespace flightgb {

inline constexpr const char* model_format_name = "flightgb-model";
inline constexpr int model_format_version = 1;

struct ModelMetadata {
  BoostParams params;
  unsigned smote_percent = 0;
  std::optional<std::string> timestamp;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

struct LoadedModel {
  BoostedModel model;
  ModelMetadata metadata;
};

inline std::string serialize_model(const BoostedModel& model, const ModelMetadata& meta) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes())
      nodes.push_back(nlohmann::json::array({n.feature, n.threshold, n.value, n.left, n.right}));
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  nlohmann::json doc = {
      {"format", model_format_name},
      {"version", model_format_version},
      {"f0", model.f0},
      {"learning_rate", model.learning_rate},
      {"n_features", model.n_features},
      {"trees", std::move(trees)},
      {"encoding", model.plan ? model.plan->to_json() : nlohmann::json(nullptr)},
      {"schema_digest", model.plan ? nlohmann::json(model.plan->schema.digest()) : nlohmann::json(nullptr)},
      {"metadata",
       {{"seed", meta.params.seed},
        {"estimators", meta.params.estimators},
        {"max_depth", meta.params.tree.max_depth},
        {"min_samples_split", meta.params.tree.min_samples_split},
        {"min_samples_leaf", meta.params.tree.min_samples_leaf},
        {"learning_rate", meta.params.learning_rate},
        {"smote_percent", meta.smote_percent},
        {"timestamp", meta.timestamp ? nlohmann::json(*meta.timestamp) : nlohmann::json(nullptr)}}}};
  return doc.dump(1) + "\n";
}

inline void save_model(const BoostedModel& model, const ModelMetadata& meta, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write model file '" + path + "'");
  out << serialize_model(model, meta);
  out.close();
  if (!out) throw Error(Errc::IoError, "write failed for model file '" + path + "'");
}

inline LoadedModel deserialize_model(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::CorruptModel, std::string("unparseable model file: ") + e.what());
  }
  LoadedModel out;
  try {
    if (!doc.is_object() || doc.value("format", std::string()) != model_format_name)
      throw Error(Errc::CorruptModel, "not a flightgb model file");
    const auto& version = doc.at("version");
    if (!version.is_number_integer() || version.get<int>() != model_format_version)
      throw Error(Errc::VersionMismatch,
                  "model format version " + version.dump() + " is not supported (expected " +
                      std::to_string(model_format_version) + ")");

    BoostedModel& m = out.model;
    m.f0 = doc.at("f0").get<double>();
    m.learning_rate = doc.at("learning_rate").get<double>();
    m.n_features = doc.at("n_features").get<std::size_t>();
    for (const auto& jt : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& jn : jt.at("nodes")) {
        if (!jn.is_array() || jn.size() != 5) throw Error(Errc::CorruptModel, "malformed tree node");
        nodes.push_back({jn[0].get<std::int32_t>(), jn[1].get<double>(), jn[2].get<double>(),
                         jn[3].get<std::int32_t>(), jn[4].get<std::int32_t>()});
      }
      RegressionTree tree(std::move(nodes), m.n_features);
      if (!tree.well_formed()) throw Error(Errc::CorruptModel, "tree failed structural validation");
      m.trees.push_back(std::move(tree));
    }
    if (!std::isfinite(m.f0) || !(m.learning_rate > 0.0 && m.learning_rate <= 1.0))
      throw Error(Errc::CorruptModel, "invalid f0 or learning rate");

    const auto& enc = doc.at("encoding");
    if (!enc.is_null()) {
      auto plan = std::make_shared<EncodingPlan>(EncodingPlan::from_json(enc));
      if (plan->width() != m.n_features)
        throw Error(Errc::CorruptModel, "encoding width does not match n_features");
      const auto& digest = doc.at("schema_digest");
      if (!digest.is_string() || digest.get<std::string>() != plan->schema.digest())
        throw Error(Errc::CorruptModel, "schema digest does not match the embedded schema");
      m.plan = std::move(plan);
    }

    const auto& md = doc.at("metadata");
    ModelMetadata& meta = out.metadata;
    meta.params.seed = md.at("seed").get<std::uint64_t>();
    meta.params.estimators = md.at("estimators").get<std::size_t>();
    meta.params.tree.max_depth = md.at("max_depth").get<std::size_t>();
    meta.params.tree.min_samples_split = md.at("min_samples_split").get<std::size_t>();
    meta.params.tree.min_samples_leaf = md.at("min_samples_leaf").get<std::size_t>();
    meta.params.learning_rate = md.at("learning_rate").get<double>();
    meta.smote_percent = md.at("smote_percent").get<unsigned>();
    if (!md.at("timestamp").is_null()) meta.timestamp = md.at("timestamp").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptModel, std::string("invalid model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::VersionMismatch || e.code() == Errc::CorruptModel) throw;
    throw Error(Errc::CorruptModel, e.what());
  }
  return out;
}

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace flightgb
