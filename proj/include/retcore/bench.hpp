#pragma once

#include <cstdint>
#include <string>

#include "retcore/model.hpp"

namespace retcore {

struct BenchReport {
  std::uint64_t tokens_processed = 0;
  double wall_seconds = 0.0;
  double tokens_per_second = 0.0;
  // No corpus-adaptation pass exists anywhere in the pipeline, so this is
  // identically zero; reported to make the claim checkable.
  double preprocessing_seconds = 0.0;
  std::uint64_t peak_resident_memory_bytes = 0;
  unsigned thread_count = 1;
  std::string mode;
  // Order-sensitive digest over every output vector's bytes; equal digests
  // across thread counts certify bitwise-identical outputs.
  std::uint64_t output_digest = 0;
};

std::uint64_t peak_resident_memory_bytes();

// mode "raw" digests the 384-value encodings, mode "model" the embeddings.
// With preload the corpus is read before the clock starts.
BenchReport bench_vectorize(const std::string& corpus_path, const std::string& mode,
                            unsigned threads, const ModelWeights<float>* weights,
                            const ModelConfig& model_cfg, const EncoderConfig& encoder_cfg,
                            bool preload);

}  // namespace retcore
