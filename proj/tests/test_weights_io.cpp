#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "retcore/weights_io.hpp"
#include "test_util.hpp"

using namespace retcore;
using testutil::bitwise_equal;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.max_word_len = 4;
  cfg.char_dim = 8;
  cfg.projection_dim = 4;
  cfg.fc_dim = 8;
  cfg.embedding_dim = 8;
  return cfg;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("weight files round-trip bitwise") {
  const ModelConfig cfg = small_config();
  const auto w = init_weights<float>(cfg, 99);
  TempFile file("roundtrip.rvec");
  nlohmann::json run;
  run["note"] = "unit";
  save_weights(w, cfg, file.path, run);

  const LoadedWeights loaded = load_weights(file.path);
  CHECK(bitwise_equal(loaded.weights, w));
  CHECK(loaded.config.fc_dim == cfg.fc_dim);
  CHECK(loaded.header.at("run_config").at("note") == "unit");
}

TEST_CASE("corruption cases raise their own errors") {
  const ModelConfig cfg = small_config();
  const auto w = init_weights<float>(cfg, 7);
  TempFile file("corrupt.rvec");
  save_weights(w, cfg, file.path);
  const std::string good = read_all(file.path);

  SUBCASE("bad magic") {
    std::string bytes = good;
    bytes[0] = 'X';
    write_all(file.path, bytes);
    CHECK_THROWS_AS(load_weights(file.path), BadMagicError);
  }
  SUBCASE("unknown format version") {
    std::string bytes = good;
    bytes[4] = 9;
    write_all(file.path, bytes);
    CHECK_THROWS_AS(load_weights(file.path), FormatVersionError);
  }
  SUBCASE("header not JSON") {
    std::string bytes = good;
    bytes[12] = '!';  // first header byte
    write_all(file.path, bytes);
    CHECK_THROWS_AS(load_weights(file.path), HeaderError);
  }
  SUBCASE("header shape disagrees with payload layout") {
    std::string bytes = good;
    const auto pos = bytes.find("\"embedding_dim\":8");
    REQUIRE(pos != std::string::npos);
    bytes.replace(pos, 17, "\"embedding_dim\":9");
    write_all(file.path, bytes);
    CHECK_THROWS_AS(load_weights(file.path), HeaderError);
  }
  SUBCASE("truncated tensor payload") {
    write_all(file.path, good.substr(0, good.size() - 16));
    CHECK_THROWS_AS(load_weights(file.path), TruncatedFileError);
  }
  SUBCASE("truncated header") {
    write_all(file.path, good.substr(0, 20));
    CHECK_THROWS_AS(load_weights(file.path), TruncatedFileError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_weights(file.path + ".does-not-exist"), IoError);
  }
}
