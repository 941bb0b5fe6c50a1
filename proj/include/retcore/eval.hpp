#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retcore/augment.hpp"
#include "retcore/model.hpp"
#include "retcore/trainer.hpp"

namespace retcore {

struct SimilarityStats {
  std::string group;
  int n_pairs = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double max = 0.0;
};

// Cosine of two embedding rows; bitwise-equal rows give exactly 1.
double pair_cosine(const float* a, const float* b, int dim);

// Linear-interpolation quantile over a sorted sample.
double quantile(const std::vector<double>& sorted, double q);

SimilarityStats stats_from(const std::string& group, std::vector<double> sims);

// One stats row per input group (clean vs augmented pairs) plus a
// "random-pairs" baseline of distinct-word clean pairs across all groups.
std::vector<SimilarityStats> similarity_distribution(
    const ModelWeights<float>& w, const ModelConfig& cfg, const EncoderConfig& encoder_cfg,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& vocab_groups,
    const ViewFn& augmenter, int n_pairs, std::uint64_t seed);

// Fraction of augmented queries whose nearest clean vocab embedding is their
// source word; cosine ties break toward the lowest vocab index.
double nn_recovery(const ModelWeights<float>& w, const ModelConfig& cfg,
                   const EncoderConfig& encoder_cfg, const std::vector<std::string>& vocab,
                   const ViewFn& augmenter, int n_queries, std::uint64_t seed);

enum class TypoKind { insertion, deletion, substitution, neighbor_swap, keyboard };

const char* typo_kind_name(TypoKind kind);
TypoKind typo_kind_from_name(const std::string& name);

struct TypoInjectorConfig {
  double word_typo_rate = 0.1;
  std::vector<TypoKind> typo_kinds = {TypoKind::insertion, TypoKind::deletion,
                                      TypoKind::substitution, TypoKind::neighbor_swap,
                                      TypoKind::keyboard};
  std::vector<int> block_sizes = {1, 2};
  std::uint64_t seed = 1;

  void validate() const {
    if (word_typo_rate < 0.0 || word_typo_rate > 1.0) {
      throw ConfigError("word_typo_rate must be in [0, 1]");
    }
    if (typo_kinds.empty()) throw ConfigError("at least one typo kind must be enabled");
    if (block_sizes.empty()) throw ConfigError("at least one block size must be enabled");
    for (int b : block_sizes) {
      if (b != 1 && b != 2) throw ConfigError("block sizes must be 1 or 2");
    }
  }
};

// Applies exactly one typo to round(rate * n_words) distinct words, chosen
// uniformly; whitespace is preserved byte for byte.
std::string inject_typos(const std::string& text, const TypoInjectorConfig& cfg,
                         const ResourceTables& tables);

// View function applying `edits` single typos (block size 1) per call; used
// for recovery evaluation at a controlled edit count.
ViewFn make_edit_view(const ResourceTables& tables, int edits, const TypoInjectorConfig& base = {});

// Writes vectors.tsv (one embedding row per word) and metadata.tsv (tokens).
void export_projection(const ModelWeights<float>& w, const ModelConfig& cfg,
                       const EncoderConfig& encoder_cfg, const std::vector<std::string>& vocab,
                       const std::string& out_dir);

}  // namespace retcore
