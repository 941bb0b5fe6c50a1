#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "retcore/augment.hpp"
#include "retcore/utf8.hpp"
#include "oracles.hpp"

using namespace retcore;

namespace {

std::vector<std::string> small_vocab() {
  return {"window", "shadow", "meadow", "gallows", "followers",
          "hollow", "yellow", "fellow", "swallow", "bellows"};
}

std::size_t budget_for(const std::string& token, const AugmentationPolicy& policy) {
  const std::size_t len = utf8::decode(token).size();
  const auto frac = static_cast<std::size_t>(
      std::floor(policy.max_typo_fraction * static_cast<double>(len)));
  return std::min(static_cast<std::size_t>(policy.max_typos), frac);
}

}  // namespace

TEST_CASE("every op kind has a category and all four categories are present") {
  std::set<OpCategory> seen;
  int total = 0;
  for (const auto category : {OpCategory::deletion, OpCategory::insertion,
                              OpCategory::substitution, OpCategory::transposition}) {
    const auto& kinds = kinds_in(category);
    CHECK(!kinds.empty());
    for (const auto kind : kinds) {
      CHECK(category_of(kind) == category);
      seen.insert(category);
      ++total;
    }
  }
  CHECK(total == kOpKindCount);
  CHECK(seen.size() == 4);
  CHECK(kinds_in(OpCategory::deletion).size() == 1);
  CHECK(kinds_in(OpCategory::insertion).size() == 11);
  CHECK(kinds_in(OpCategory::substitution).size() == 8);
  CHECK(kinds_in(OpCategory::transposition).size() == 2);
}

TEST_CASE("derived tables: alphabet and ngrams come from the vocabulary") {
  const auto tables = build_tables({"ab", "bc"});
  CHECK(tables.alphabet == std::vector<char32_t>{U'a', U'b', U'c'});

  const auto tri = build_tables({"aaa"});
  REQUIRE(tri.ngrams[0].size() == 1);
  CHECK(tri.ngrams[0][0] == U"aaa");
  CHECK(tri.ngrams[1].empty());  // no 4-grams in a 3-char word

  const auto ranked = build_tables({"abcd", "abce", "abcf", "xyzw"});
  REQUIRE(!ranked.ngrams[0].empty());
  CHECK(ranked.ngrams[0][0] == U"abc");  // most frequent trigram first
}

TEST_CASE("embedded qwerty table includes expected neighbors") {
  const auto tables = build_tables(small_vocab());
  const auto it = tables.qwerty_neighbors.find(U's');
  REQUIRE(it != tables.qwerty_neighbors.end());
  const auto& n = it->second;
  CHECK(std::find(n.begin(), n.end(), U'a') != n.end());
  CHECK(std::find(n.begin(), n.end(), U'd') != n.end());
  CHECK(tables.homoglyphs.size() == 50);
  CHECK(!tables.punctuation.empty());
  CHECK(!tables.emoji.empty());
}

TEST_CASE("empty vocabulary is rejected") {
  CHECK_THROWS_AS(build_tables({}), ConfigError);
}

TEST_CASE("single ops change the token and respect their cost") {
  const auto tables = build_tables(small_vocab());
  Rng rng(808);
  const std::string token = "followersfence";  // 14 chars, room for every op
  int applied = 0;
  for (int k = 0; k < kOpKindCount; ++k) {
    const auto kind = static_cast<OpKind>(k);
    for (int attempt = 0; attempt < 50; ++attempt) {
      const auto out = apply_op(token, kind, tables, rng);
      if (!out) continue;
      ++applied;
      CAPTURE(kind_name(kind));
      CHECK(*out != token);
      // Plain edit distance never exceeds the op's declared worst case.
      const std::size_t dist = oracles::levenshtein(token, *out);
      const std::size_t allowed =
          category_of(kind) == OpCategory::transposition ? 2
          : category_of(kind) == OpCategory::deletion    ? 1
                                                         : 5;
      CHECK(dist <= allowed);
      CHECK_NOTHROW(utf8::decode(*out));
      break;
    }
  }
  CHECK(applied == kOpKindCount);  // every kind fires on a 14-char token
}

TEST_CASE("augmented tokens stay within the edit budget") {
  const auto vocab = small_vocab();
  const auto tables = build_tables(vocab);
  AugmentationPolicy policy;
  Rng rng(4711);
  std::size_t violations = 0;
  std::size_t changed = 0;
  for (int draw = 0; draw < 10000; ++draw) {
    const auto& word = vocab[rng.index(vocab.size())];
    const std::string out = augment_token(word, policy, tables, rng);
    CHECK(!out.empty());
    CHECK_NOTHROW(utf8::decode(out));
    const std::size_t dist = oracles::levenshtein(word, out);
    if (dist > budget_for(word, policy)) ++violations;
    if (out != word) ++changed;
  }
  CHECK(violations == 0);
  // floor(f * len) with f ~ U[0, 0.25] is nonzero for roughly a third of the
  // draws on 6-char words, more on longer ones
  CHECK(changed > 3000);
}

TEST_CASE("short words are never edited beyond their budget") {
  const auto tables = build_tables(small_vocab());
  AugmentationPolicy policy;
  Rng rng(12);
  // 1..3 chars: floor(0.25 * len) == 0, so the word must come back unchanged
  for (const std::string word : {"a", "ab", "abc"}) {
    for (int i = 0; i < 200; ++i) {
      CHECK(augment_token(word, policy, tables, rng) == word);
    }
  }
  // 4 chars: budget 1
  for (int i = 0; i < 500; ++i) {
    const auto out = augment_token("abcd", policy, tables, rng);
    CHECK(oracles::levenshtein("abcd", out) <= 1);
  }
}

TEST_CASE("augmentation is deterministic for a fixed seed") {
  const auto tables = build_tables(small_vocab());
  AugmentationPolicy policy;
  std::vector<std::string> first, second;
  for (int run = 0; run < 2; ++run) {
    Rng rng(321);
    auto& sink = run == 0 ? first : second;
    for (int i = 0; i < 300; ++i) sink.push_back(augment_token("followers", policy, tables, rng));
  }
  CHECK(first == second);
  CHECK(std::set<std::string>(first.begin(), first.end()).size() > 50);
}

TEST_CASE("category weights can disable whole categories") {
  const auto tables = build_tables(small_vocab());
  AugmentationPolicy policy;
  policy.category_weights = {1.0, 0.0, 0.0, 0.0};  // deletions only
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const std::string word = "followers";
    const auto out = augment_token(word, policy, tables, rng);
    CHECK(out.size() <= word.size());  // deletions never grow the token
  }
  policy.category_weights = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(policy.validate(), ConfigError);
}

TEST_CASE("table overrides replace embedded defaults") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "retcore_tables_test";
  fs::create_directories(dir);
  {
    std::ofstream q(dir / "qwerty.tsv");
    q << "# test override\n";
    q << "a\tzx\n";
  }
  {
    std::ofstream p(dir / "punctuation.tsv");
    p << "!\n?\n";
  }
  auto tables = build_tables(small_vocab());
  load_table_overrides(tables, dir.string());
  REQUIRE(tables.qwerty_neighbors.size() == 1);
  CHECK(tables.qwerty_neighbors.at(U'a') == std::vector<char32_t>{U'z', U'x'});
  CHECK(tables.punctuation == std::vector<char32_t>{U'!', U'?'});
  CHECK(!tables.emoji.empty());  // untouched files keep their defaults
  fs::remove_all(dir);
}
