#include "retcore/dataset.hpp"

#include <cmath>

#include "retcore/utf8.hpp"

namespace retcore {

namespace {

constexpr std::uint64_t kRandomTokenStream = 0x544f4b;
constexpr std::uint64_t kViewStream = 0x56494557;
constexpr std::uint64_t kShuffleStream = 0x53485546;

// Scalar values [1, 0x10FFFF] minus the 2048 surrogates.
constexpr std::uint64_t kScalarCount = 0x10FFFF - 0x800;

}  // namespace

std::string random_token(Rng& rng, int len_min, int len_max) {
  const int len = len_min + static_cast<int>(rng.below(
                                static_cast<std::uint64_t>(len_max - len_min) + 1));
  std::string out;
  for (int i = 0; i < len; ++i) {
    auto cp = static_cast<char32_t>(1 + rng.below(kScalarCount));
    if (cp >= 0xd800) cp += 0x800;
    utf8::append(out, cp);
  }
  return out;
}

int random_token_count(std::size_t vocab_size, const DatasetSpec& spec) {
  spec.validate();
  const double f = spec.random_token_fraction;
  const auto v = static_cast<double>(vocab_size);
  const double raw = spec.random_share_mode == RandomShare::of_original
                         ? f * v
                         : f / (1.0 - f) * v;
  return static_cast<int>(std::floor(raw + 0.5));
}

DatasetStream::DatasetStream(const std::vector<std::string>& vocab, const DatasetSpec& spec,
                             const ResourceTables& tables, const AugmentationPolicy& policy)
    : spec_(spec), tables_(&tables), policy_(policy) {
  spec.validate();
  policy.validate();
  if (vocab.empty()) throw ConfigError("cannot build a dataset from an empty vocab");

  pool_ = vocab;
  vocab_size_ = vocab.size();
  const int n_random = random_token_count(vocab.size(), spec);
  pool_.reserve(pool_.size() + static_cast<std::size_t>(n_random));
  for (int i = 0; i < n_random; ++i) {
    Rng rng(mix_seed(spec.seed, kRandomTokenStream, static_cast<std::uint64_t>(i)));
    pool_.push_back(random_token(rng, spec.random_len_min, spec.random_len_max));
  }

  order_.resize(pool_.size() * static_cast<std::size_t>(spec.views_per_token));
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  Rng shuffle_rng(mix_seed(spec.seed, kShuffleStream));
  shuffle_rng.shuffle(order_.begin(), order_.end());
}

DatasetEntry DatasetStream::entry(std::size_t position) const {
  const std::uint64_t id = order_.at(position);
  const auto views = static_cast<std::uint64_t>(spec_.views_per_token);
  const auto class_id = static_cast<std::size_t>(id / views);
  const auto view = static_cast<int>(id % views);

  DatasetEntry e;
  e.class_id = static_cast<int>(class_id);
  e.is_random = class_id >= vocab_size_;
  e.augmented = view < spec_.augmented_views;
  if (e.augmented) {
    Rng rng(mix_seed(mix_seed(spec_.seed, kViewStream), id));
    e.token = augment_token(pool_[class_id], policy_, *tables_, rng);
  } else {
    e.token = pool_[class_id];
  }
  return e;
}

std::vector<DatasetEntry> generate(const std::vector<std::string>& vocab,
                                   const DatasetSpec& spec, const ResourceTables& tables,
                                   const AugmentationPolicy& policy) {
  DatasetStream stream(vocab, spec, tables, policy);
  std::vector<DatasetEntry> entries;
  entries.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) entries.push_back(stream.entry(i));
  return entries;
}

}  // namespace retcore
