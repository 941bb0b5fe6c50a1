#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retcore/errors.hpp"
#include "retcore/rng.hpp"

namespace retcore {

enum class OpCategory { deletion, insertion, substitution, transposition };

enum class OpKind {
  delete_char,
  insert_repeat_char,
  insert_ngram_prefix,
  insert_ngram_suffix,
  insert_random_ascii,
  insert_alphabet,
  insert_punctuation,
  insert_punctuation_prefix,
  insert_punctuation_suffix,
  insert_bmp,
  insert_emoji_prefix,
  insert_emoji_suffix,
  sub_case,
  sub_ngram,
  sub_qwerty,
  sub_homoglyph,
  sub_random_ascii,
  sub_alphabet,
  sub_punctuation,
  sub_bmp,
  swap_neighbor,
  shuffle_block3,
};

inline constexpr int kOpKindCount = 22;

OpCategory category_of(OpKind kind);
const std::vector<OpKind>& kinds_in(OpCategory category);
const char* kind_name(OpKind kind);

struct AugmentationPolicy {
  int max_typos = 4;
  double max_typo_fraction = 0.25;
  std::array<double, 4> category_weights = {1.0, 1.0, 1.0, 1.0};

  void validate() const {
    if (max_typos < 0) throw ConfigError("max_typos must be >= 0");
    if (max_typo_fraction < 0.0 || max_typo_fraction > 1.0) {
      throw ConfigError("max_typo_fraction must be in [0, 1]");
    }
    double total = 0.0;
    for (double w : category_weights) {
      if (w < 0.0) throw ConfigError("category weights must be non-negative");
      total += w;
    }
    if (total <= 0.0) throw ConfigError("category weights must not all be zero");
  }
};

struct ResourceTables {
  std::map<char32_t, std::vector<char32_t>> qwerty_neighbors;
  std::map<char32_t, std::vector<char32_t>> homoglyphs;
  std::vector<char32_t> punctuation;
  std::vector<char32_t> emoji;
  // Index 0 holds trigrams, 1 four-grams, 2 five-grams; each ranked by
  // frequency over the vocabulary, ties broken lexicographically.
  std::array<std::vector<std::u32string>, 3> ngrams;
  std::vector<char32_t> alphabet;
};

// QWERTY/homoglyph/punctuation/emoji come from embedded defaults; n-gram
// tables and the alphabet are derived from the vocabulary.
ResourceTables build_tables(const std::vector<std::string>& vocab, int max_ngrams = 1000);

// Reads optional override files (qwerty.tsv, homoglyphs.tsv, punctuation.tsv,
// emoji.tsv) from a directory; missing files keep the embedded table.
void load_table_overrides(ResourceTables& tables, const std::string& dir);

struct OpResult {
  std::u32string token;
  int cost;  // worst-case edit distance this op can introduce
};

// One edit of the given kind at an rng-chosen position. Returns nothing when
// the op cannot apply to this token (too short, no eligible character, or its
// cost exceeds max_cost); the caller resamples another op.
std::optional<OpResult> try_apply_op(const std::u32string& token, OpKind kind,
                                     const ResourceTables& tables, int max_cost, Rng& rng);

std::optional<std::string> apply_op(const std::string& token, OpKind kind,
                                    const ResourceTables& tables, Rng& rng);

// Draws a typo fraction in [0, max_typo_fraction] and spends the resulting
// edit budget one op at a time; ops whose worst-case cost exceeds what is
// left are rejected, so the total edit distance stays within the budget.
std::string augment_token(const std::string& token, const AugmentationPolicy& policy,
                          const ResourceTables& tables, Rng& rng);

}  // namespace retcore
