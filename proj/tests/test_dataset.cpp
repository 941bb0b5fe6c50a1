#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "retcore/dataset.hpp"
#include "retcore/utf8.hpp"

using namespace retcore;

namespace {

std::vector<std::string> vocab_n(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("word" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("random token count follows the configured share") {
  DatasetSpec spec;

  SUBCASE("share of the original vocabulary") {
    spec.random_share_mode = RandomShare::of_original;
    CHECK(random_token_count(100, spec) == 10);
    CHECK(random_token_count(95, spec) == 10);   // 9.5 rounds up
    CHECK(random_token_count(94, spec) == 9);    // 9.4 rounds down
    CHECK(random_token_count(0, spec) == 0);
  }

  SUBCASE("share of the final pool") {
    spec.random_share_mode = RandomShare::of_final;
    // f/(1-f) * V: 100 words at 10% -> 11.11 -> 11, so 111 classes total
    CHECK(random_token_count(100, spec) == 11);
    CHECK(random_token_count(9, spec) == 1);
  }

  SUBCASE("zero fraction adds nothing") {
    spec.random_token_fraction = 0.0;
    CHECK(random_token_count(100, spec) == 0);
    spec.random_share_mode = RandomShare::of_final;
    CHECK(random_token_count(100, spec) == 0);
  }
}

TEST_CASE("random tokens cover the length range and decode cleanly") {
  Rng rng(2024);
  std::set<std::size_t> lengths;
  for (int i = 0; i < 4000; ++i) {
    const std::string token = random_token(rng, 1, 16);
    const auto cps = utf8::decode(token);
    CHECK(!cps.empty());
    CHECK(cps.size() <= 16);
    lengths.insert(cps.size());
    for (const char32_t cp : cps) {
      CHECK(utf8::is_scalar_value(cp));
      CHECK(cp != 0);
    }
  }
  CHECK(lengths.size() == 16);  // every length 1..16 observed
}

TEST_CASE("random tokens are deterministic per seed") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const auto ta = random_token(a, 1, 16);
    CHECK(ta == random_token(b, 1, 16));
    if (i == 0) CHECK(ta != random_token(c, 1, 16));
  }
}

TEST_CASE("dataset stream emits the full recipe") {
  const auto vocab = vocab_n(100);
  const auto tables = build_tables(vocab);
  DatasetSpec spec;
  spec.seed = 5;
  AugmentationPolicy policy;

  DatasetStream stream(vocab, spec, tables, policy);
  CHECK(stream.vocab_class_count() == 100);
  CHECK(stream.class_count() == 110);  // 100 vocab + 10 random
  CHECK(stream.size() == 110 * 20);

  std::map<int, int> views;
  std::map<int, int> augmented;
  std::map<int, int> clean_matches;
  std::set<int> random_classes;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto e = stream.entry(i);
    ++views[e.class_id];
    if (e.augmented) {
      ++augmented[e.class_id];
    } else {
      CHECK(e.token == stream.class_token(static_cast<std::size_t>(e.class_id)));
      ++clean_matches[e.class_id];
    }
    if (e.is_random) random_classes.insert(e.class_id);
  }
  CHECK(views.size() == 110);
  for (const auto& [cls, count] : views) {
    CAPTURE(cls);
    CHECK(count == 20);
    CHECK(augmented[cls] == 16);
    CHECK(clean_matches[cls] == 4);
  }
  CHECK(random_classes.size() == 10);
  // Random classes are the ids past the vocabulary block.
  for (const int cls : random_classes) CHECK(cls >= 100);
}

TEST_CASE("generate materializes the same entries as the stream") {
  const auto vocab = vocab_n(10);
  const auto tables = build_tables(vocab);
  DatasetSpec spec;
  spec.seed = 17;
  AugmentationPolicy policy;

  const auto all = generate(vocab, spec, tables, policy);
  DatasetStream stream(vocab, spec, tables, policy);
  REQUIRE(all.size() == stream.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto e = stream.entry(i);
    CHECK(all[i].class_id == e.class_id);
    CHECK(all[i].token == e.token);
    CHECK(all[i].augmented == e.augmented);
    CHECK(all[i].is_random == e.is_random);
  }
}

TEST_CASE("dataset order is shuffled but deterministic") {
  const auto vocab = vocab_n(30);
  const auto tables = build_tables(vocab);
  DatasetSpec spec;
  spec.seed = 99;
  AugmentationPolicy policy;

  DatasetStream a(vocab, spec, tables, policy);
  DatasetStream b(vocab, spec, tables, policy);
  bool out_of_order = false;
  int previous = -1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ea = a.entry(i);
    CHECK(ea.token == b.entry(i).token);
    CHECK(ea.class_id == b.entry(i).class_id);
    if (ea.class_id < previous) out_of_order = true;
    previous = ea.class_id;
  }
  CHECK(out_of_order);  // not grouped by class

  spec.seed = 100;
  DatasetStream c(vocab, spec, tables, policy);
  bool differs = false;
  for (std::size_t i = 0; i < a.size() && !differs; ++i) {
    if (a.entry(i).class_id != c.entry(i).class_id) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("zero random fraction keeps only vocabulary classes") {
  const auto vocab = vocab_n(25);
  const auto tables = build_tables(vocab);
  DatasetSpec spec;
  spec.random_token_fraction = 0.0;
  AugmentationPolicy policy;

  DatasetStream stream(vocab, spec, tables, policy);
  CHECK(stream.class_count() == 25);
  for (std::size_t i = 0; i < stream.size(); ++i) CHECK(!stream.entry(i).is_random);
}

TEST_CASE("empty vocabulary is rejected") {
  const auto vocab = vocab_n(3);
  const auto tables = build_tables(vocab);
  DatasetSpec spec;
  AugmentationPolicy policy;
  CHECK_THROWS_AS(DatasetStream({}, spec, tables, policy), ConfigError);
}
