#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sme/baselines.hpp"
#include "sme/dataset.hpp"
#include "sme/mtl.hpp"

namespace sme::model_io {

// On-disk model document (version 1). Fixed fields: kind, weights, bias,
// config, schema_hash; feature_scaler carries the training-time column
// standardization so unseen instances transform identically.
struct ModelArtifact {
  std::string kind;  // logistic | ann | forest | svm | svm_ovr | svr | mtl
  std::string schema_hash;
  std::string task;  // single-task models; empty for mtl
  data::StandardizeParams scaler;
  nlohmann::ordered_json config;  // effective run configuration echo
  std::uint64_t seed = 0;

  std::optional<baselines::LogisticModel> logistic;
  std::optional<baselines::MlpModel> mlp;
  std::optional<baselines::ForestModel> forest;
  std::optional<baselines::SvmModel> svm;
  std::optional<baselines::SvmOvrModel> svm_ovr;
  std::optional<baselines::SvrModel> svr;
  std::optional<mtl::MtlModel> mtl_model;
};

nlohmann::ordered_json to_json(const ModelArtifact& artifact);
ModelArtifact from_json(const nlohmann::ordered_json& doc);

void save_model(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_model(const std::string& path);

// Content hash of the serialized document; stable across runs for identical
// training inputs.
std::string model_id(const ModelArtifact& artifact);

}  // namespace sme::model_io
