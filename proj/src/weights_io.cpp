#include "retcore/weights_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "retcore/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian; big-endian hosts are unsupported");

namespace retcore {

namespace {

constexpr char kMagic[4] = {'R', 'V', 'E', 'C'};

void write_u32(std::ostream& out, std::uint32_t value) {
  out.write(reinterpret_cast<const char*>(&value), 4);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t value = 0;
  in.read(reinterpret_cast<char*>(&value), 4);
  if (!in) throw TruncatedFileError("file ends inside a fixed-width field");
  return value;
}

}  // namespace

void to_json(nlohmann::json& j, const ModelConfig& cfg) {
  j = nlohmann::json{{"max_word_len", cfg.max_word_len},
                     {"char_dim", cfg.char_dim},
                     {"projection_dim", cfg.projection_dim},
                     {"fc_layers", cfg.fc_layers},
                     {"fc_dim", cfg.fc_dim},
                     {"embedding_dim", cfg.embedding_dim},
                     {"spatial_dropout_rate", cfg.spatial_dropout_rate},
                     {"dropout_rate", cfg.dropout_rate},
                     {"hidden_activation", cfg.hidden_activation},
                     {"embedding_activation", cfg.embedding_activation}};
}

void from_json(const nlohmann::json& j, ModelConfig& cfg) {
  j.at("max_word_len").get_to(cfg.max_word_len);
  j.at("char_dim").get_to(cfg.char_dim);
  j.at("projection_dim").get_to(cfg.projection_dim);
  j.at("fc_layers").get_to(cfg.fc_layers);
  j.at("fc_dim").get_to(cfg.fc_dim);
  j.at("embedding_dim").get_to(cfg.embedding_dim);
  j.at("spatial_dropout_rate").get_to(cfg.spatial_dropout_rate);
  j.at("dropout_rate").get_to(cfg.dropout_rate);
  j.at("hidden_activation").get_to(cfg.hidden_activation);
  j.at("embedding_activation").get_to(cfg.embedding_activation);
}

void save_weights(const ModelWeights<float>& w, const ModelConfig& cfg, const std::string& path,
                  const nlohmann::json& run_config) {
  cfg.validate();
  w.check_shapes(cfg);

  nlohmann::json header;
  header["config"] = cfg;
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, tensor] : w.tensors()) {
    header["tensors"].push_back({{"name", name},
                                 {"shape", {tensor->rows(), tensor->cols()}},
                                 {"offset", offset}});
    offset += static_cast<std::uint64_t>(tensor->size()) * sizeof(float);
  }
  if (!run_config.is_null()) header["run_config"] = run_config;
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  write_u32(out, kWeightsFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, tensor] : w.tensors()) {
    out.write(reinterpret_cast<const char*>(tensor->data()),
              static_cast<std::streamsize>(tensor->size() * sizeof(float)));
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

LoadedWeights load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");

  char magic[4] = {};
  in.read(magic, 4);
  if (!in) throw TruncatedFileError(path + ": file shorter than the magic bytes");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw BadMagicError(path + ": bad magic bytes, not a weight file");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kWeightsFormatVersion) {
    throw FormatVersionError(path + ": format version " + std::to_string(version) +
                             ", expected " + std::to_string(kWeightsFormatVersion));
  }
  const std::uint32_t header_len = read_u32(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (!in) throw TruncatedFileError(path + ": file ends inside the header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw HeaderError(path + ": header is not valid JSON: " + e.what());
  }

  LoadedWeights loaded;
  try {
    loaded.config = header.at("config").get<ModelConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw HeaderError(path + ": bad config block: " + e.what());
  }
  try {
    loaded.config.validate();
  } catch (const ConfigError& e) {
    throw HeaderError(path + ": " + e.what());
  }

  loaded.weights = ModelWeights<float>::zeros(loaded.config);
  auto refs = loaded.weights.tensors();
  const auto& manifest = header.at("tensors");
  if (!manifest.is_array() || manifest.size() != refs.size()) {
    throw HeaderError(path + ": tensor manifest does not match the config");
  }
  const std::streampos payload_start = in.tellg();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto& entry = manifest[i];
    std::string name;
    std::vector<std::int64_t> shape;
    std::uint64_t offset = 0;
    try {
      entry.at("name").get_to(name);
      entry.at("shape").get_to(shape);
      entry.at("offset").get_to(offset);
    } catch (const nlohmann::json::exception& e) {
      throw HeaderError(path + ": bad tensor manifest entry: " + e.what());
    }
    Mat<float>* tensor = refs[i].second;
    if (name != refs[i].first || shape.size() != 2 || shape[0] != tensor->rows() ||
        shape[1] != tensor->cols()) {
      throw HeaderError(path + ": tensor " + name + " does not match the config shapes");
    }
    in.seekg(payload_start + static_cast<std::streamoff>(offset));
    in.read(reinterpret_cast<char*>(tensor->data()),
            static_cast<std::streamsize>(tensor->size() * sizeof(float)));
    if (!in) throw TruncatedFileError(path + ": file ends inside tensor " + name);
  }
  loaded.header = std::move(header);
  return loaded;
}

void save_matrix(const MatF& m, const std::string& name, const std::string& path,
                 const nlohmann::json& run_config) {
  nlohmann::json header;
  header["tensors"] = nlohmann::json::array(
      {{{"name", name}, {"shape", {m.rows(), m.cols()}}, {"offset", 0}}});
  if (!run_config.is_null()) header["run_config"] = run_config;
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  write_u32(out, kWeightsFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(float)));
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

LoadedMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");

  char magic[4] = {};
  in.read(magic, 4);
  if (!in) throw TruncatedFileError(path + ": file shorter than the magic bytes");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw BadMagicError(path + ": bad magic bytes, not a matrix file");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kWeightsFormatVersion) {
    throw FormatVersionError(path + ": format version " + std::to_string(version) +
                             ", expected " + std::to_string(kWeightsFormatVersion));
  }
  const std::uint32_t header_len = read_u32(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (!in) throw TruncatedFileError(path + ": file ends inside the header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw HeaderError(path + ": header is not valid JSON: " + e.what());
  }

  LoadedMatrix loaded;
  std::vector<std::int64_t> shape;
  try {
    const auto& manifest = header.at("tensors");
    if (!manifest.is_array() || manifest.size() != 1) {
      throw HeaderError(path + ": expected a single-tensor manifest");
    }
    manifest[0].at("name").get_to(loaded.name);
    manifest[0].at("shape").get_to(shape);
  } catch (const nlohmann::json::exception& e) {
    throw HeaderError(path + ": bad tensor manifest: " + e.what());
  }
  if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0) {
    throw HeaderError(path + ": tensor shape must be two non-negative extents");
  }
  loaded.matrix.resize(shape[0], shape[1]);
  in.read(reinterpret_cast<char*>(loaded.matrix.data()),
          static_cast<std::streamsize>(loaded.matrix.size() * sizeof(float)));
  if (!in) throw TruncatedFileError(path + ": file ends inside tensor " + loaded.name);
  loaded.header = std::move(header);
  return loaded;
}

}  // namespace retcore
