#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retcore/augment.hpp"
#include "retcore/rng.hpp"

namespace retcore {

// How the random-token count relates to the 10% knob: share of the original
// vocab, or share of the final (vocab + random) pool.
enum class RandomShare { of_original, of_final };

struct DatasetSpec {
  int views_per_token = 20;
  int augmented_views = 16;
  double random_token_fraction = 0.10;
  int random_len_min = 1;
  int random_len_max = 16;
  std::uint64_t seed = 1;
  RandomShare random_share_mode = RandomShare::of_original;

  void validate() const {
    if (views_per_token < 1) throw ConfigError("views_per_token must be >= 1");
    if (augmented_views < 0 || augmented_views > views_per_token) {
      throw ConfigError("augmented_views must be in [0, views_per_token]");
    }
    if (random_token_fraction < 0.0 || random_token_fraction >= 1.0) {
      throw ConfigError("random_token_fraction must be in [0, 1)");
    }
    if (random_len_min < 1 || random_len_max < random_len_min) {
      throw ConfigError("random token length range is invalid");
    }
  }
};

// Uniform length in [len_min, len_max]; each character uniform over Unicode
// scalar values excluding surrogates and NUL.
std::string random_token(Rng& rng, int len_min, int len_max);

int random_token_count(std::size_t vocab_size, const DatasetSpec& spec);

struct DatasetEntry {
  int class_id;
  bool is_random;   // class came from random-token supplementation
  bool augmented;   // view went through the augmenter (it may still equal the clean token)
  std::string token;
};

// Deterministic shuffled stream over (class, view) pairs; entries are
// generated on demand so nothing past the class pool is materialized.
class DatasetStream {
 public:
  DatasetStream(const std::vector<std::string>& vocab, const DatasetSpec& spec,
                const ResourceTables& tables, const AugmentationPolicy& policy);

  std::size_t size() const { return order_.size(); }
  std::size_t class_count() const { return pool_.size(); }
  std::size_t vocab_class_count() const { return vocab_size_; }
  const std::string& class_token(std::size_t class_id) const { return pool_[class_id]; }

  DatasetEntry entry(std::size_t position) const;

 private:
  DatasetSpec spec_;
  const ResourceTables* tables_;
  AugmentationPolicy policy_;
  std::vector<std::string> pool_;
  std::size_t vocab_size_;
  std::vector<std::uint64_t> order_;
};

std::vector<DatasetEntry> generate(const std::vector<std::string>& vocab,
                                   const DatasetSpec& spec, const ResourceTables& tables,
                                   const AugmentationPolicy& policy);

}  // namespace retcore
