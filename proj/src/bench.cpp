#include "retcore/bench.hpp"

#include <chrono>
#include <fstream>
#include <vector>

#include "retcore/encoder.hpp"
#include "retcore/parallel.hpp"

namespace retcore {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash = kFnvOffset) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= kFnvPrime;
  }
  return hash;
}

std::vector<std::string> read_tokens(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return tokens;
}

}  // namespace

std::uint64_t peak_resident_memory_bytes() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::uint64_t kb = 0;
      for (char c : line) {
        if (c >= '0' && c <= '9') kb = kb * 10 + static_cast<std::uint64_t>(c - '0');
      }
      return kb * 1024;
    }
  }
  return 0;
}

BenchReport bench_vectorize(const std::string& corpus_path, const std::string& mode,
                            unsigned threads, const ModelWeights<float>* weights,
                            const ModelConfig& model_cfg, const EncoderConfig& encoder_cfg,
                            bool preload) {
  if (mode != "raw" && mode != "model") throw ConfigError("bench mode must be raw or model");
  if (mode == "model") {
    if (weights == nullptr) throw ConfigError("model mode needs --weights");
    weights->check_shapes(model_cfg);
  }
  encoder_cfg.validate();
  if (threads < 1) threads = 1;

  using clock = std::chrono::steady_clock;
  clock::time_point start = clock::now();
  std::vector<std::string> tokens = read_tokens(corpus_path);
  if (preload) start = clock::now();

  std::vector<std::uint64_t> digests(tokens.size());
  constexpr std::size_t kBlock = 1024;
  parallel_chunks(tokens.size(), threads, [&](std::size_t begin, std::size_t end) {
    MatF bits(static_cast<Eigen::Index>(kBlock), encoder_cfg.flat_dim());
    for (std::size_t at = begin; at < end; at += kBlock) {
      const std::size_t stop = std::min(end, at + kBlock);
      const auto block = static_cast<Eigen::Index>(stop - at);
      for (std::size_t i = at; i < stop; ++i) {
        binarize(integerize(tokens[i], encoder_cfg), encoder_cfg)
            .write_flat(bits.row(static_cast<Eigen::Index>(i - at)).data());
      }
      if (mode == "raw") {
        for (std::size_t i = at; i < stop; ++i) {
          digests[i] = fnv1a(bits.row(static_cast<Eigen::Index>(i - at)).data(),
                             static_cast<std::size_t>(bits.cols()) * sizeof(float));
        }
      } else {
        const MatF embeddings =
            forward_infer<float>(bits.topRows(block), *weights, model_cfg);
        for (std::size_t i = at; i < stop; ++i) {
          digests[i] = fnv1a(embeddings.row(static_cast<Eigen::Index>(i - at)).data(),
                             static_cast<std::size_t>(embeddings.cols()) * sizeof(float));
        }
      }
    }
  });

  std::uint64_t digest = kFnvOffset;
  for (std::uint64_t d : digests) digest = fnv1a(&d, sizeof(d), digest);
  const double wall = std::chrono::duration<double>(clock::now() - start).count();

  BenchReport report;
  report.tokens_processed = tokens.size();
  report.wall_seconds = wall;
  report.tokens_per_second =
      wall > 0.0 ? static_cast<double>(tokens.size()) / wall : 0.0;
  report.preprocessing_seconds = 0.0;
  report.peak_resident_memory_bytes = peak_resident_memory_bytes();
  report.thread_count = threads;
  report.mode = mode;
  report.output_digest = digest;
  return report;
}

}  // namespace retcore
