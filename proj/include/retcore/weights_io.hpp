#pragma once

#include <string>

#include <json.hpp>

#include "retcore/model.hpp"

namespace retcore {

void to_json(nlohmann::json& j, const ModelConfig& cfg);
void from_json(const nlohmann::json& j, ModelConfig& cfg);

// File layout: "RVEC", u32 LE format version, u32 LE header length, JSON
// header (config, tensor manifest, optional run_config), then the tensors as
// row-major little-endian float32 at their manifest offsets.
void save_weights(const ModelWeights<float>& w, const ModelConfig& cfg, const std::string& path,
                  const nlohmann::json& run_config = nullptr);

struct LoadedWeights {
  ModelWeights<float> weights;
  ModelConfig config;
  nlohmann::json header;
};

LoadedWeights load_weights(const std::string& path);

// Single named matrix in the same container layout (magic, version, JSON
// header with a one-entry tensor manifest, row-major float32 payload).
void save_matrix(const MatF& m, const std::string& name, const std::string& path,
                 const nlohmann::json& run_config = nullptr);

struct LoadedMatrix {
  MatF matrix;
  std::string name;
  nlohmann::json header;
};

LoadedMatrix load_matrix(const std::string& path);

}  // namespace retcore
