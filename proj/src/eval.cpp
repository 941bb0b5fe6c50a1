#include "retcore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "retcore/utf8.hpp"

namespace retcore {

namespace {

constexpr std::uint64_t kPairStream = 0x50414952;
constexpr std::uint64_t kBaselineStream = 0x42415345;
constexpr std::uint64_t kQueryStream = 0x51455259;
constexpr std::uint64_t kWordStream = 0x574f5244;
constexpr int kInjectRetries = 50;

char32_t random_lowercase(Rng& rng) {
  return static_cast<char32_t>(U'a' + rng.below(26));
}

// One typo of the given kind/block size; nothing when it cannot apply.
std::optional<std::u32string> apply_typo(const std::u32string& word, TypoKind kind,
                                         std::size_t block, const ResourceTables& tables,
                                         Rng& rng) {
  const std::size_t len = word.size();
  switch (kind) {
    case TypoKind::insertion: {
      std::u32string out = word;
      const std::size_t pos = rng.index(len + 1);
      for (std::size_t k = 0; k < block; ++k) {
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos + k), random_lowercase(rng));
      }
      return out;
    }
    case TypoKind::deletion: {
      if (len <= block) return std::nullopt;  // deleting must leave a word behind
      std::u32string out = word;
      const std::size_t pos = rng.index(len - block + 1);
      out.erase(pos, block);
      return out;
    }
    case TypoKind::substitution: {
      if (len < block) return std::nullopt;
      const std::size_t pos = rng.index(len - block + 1);
      for (int attempt = 0; attempt < 10; ++attempt) {
        std::u32string out = word;
        for (std::size_t k = 0; k < block; ++k) out[pos + k] = random_lowercase(rng);
        if (out != word) return out;
      }
      return std::nullopt;
    }
    case TypoKind::neighbor_swap: {
      if (len < block + 1) return std::nullopt;
      for (int attempt = 0; attempt < 10; ++attempt) {
        const std::size_t pos = rng.index(len - block);
        std::u32string out = word;
        // The block slides one position right; its right neighbor moves in front.
        const char32_t neighbor = out[pos + block];
        for (std::size_t k = block; k > 0; --k) out[pos + k] = out[pos + k - 1];
        out[pos] = neighbor;
        if (out != word) return out;
      }
      return std::nullopt;
    }
    case TypoKind::keyboard: {
      std::vector<std::size_t> spots;
      const auto has_neighbors = [&](char32_t cp) {
        const char32_t lower = (cp >= U'A' && cp <= U'Z') ? cp + 0x20 : cp;
        return tables.qwerty_neighbors.count(lower) > 0;
      };
      for (std::size_t i = 0; i + block <= len; ++i) {
        bool ok = true;
        for (std::size_t k = 0; k < block; ++k) ok = ok && has_neighbors(word[i + k]);
        if (ok) spots.push_back(i);
      }
      if (spots.empty()) return std::nullopt;
      const std::size_t pos = spots[rng.index(spots.size())];
      std::u32string out = word;
      for (std::size_t k = 0; k < block; ++k) {
        const bool upper = out[pos + k] >= U'A' && out[pos + k] <= U'Z';
        const char32_t lower = upper ? out[pos + k] + 0x20 : out[pos + k];
        const auto& neighbors = tables.qwerty_neighbors.at(lower);
        char32_t replacement = neighbors[rng.index(neighbors.size())];
        if (upper && replacement >= U'a' && replacement <= U'z') replacement -= 0x20;
        out[pos + k] = replacement;
      }
      return out == word ? std::nullopt : std::optional<std::u32string>(out);
    }
  }
  return std::nullopt;
}

std::u32string inject_one_typo(const std::u32string& word, const TypoInjectorConfig& cfg,
                               const ResourceTables& tables, Rng& rng,
                               const std::string& word_text) {
  for (int attempt = 0; attempt < kInjectRetries; ++attempt) {
    const TypoKind kind = cfg.typo_kinds[rng.index(cfg.typo_kinds.size())];
    const auto block = static_cast<std::size_t>(cfg.block_sizes[rng.index(cfg.block_sizes.size())]);
    if (auto out = apply_typo(word, kind, block, tables, rng)) return *out;
  }
  throw ConfigError("no enabled typo kind applies to word \"" + word_text + "\"");
}

MatF normalized_rows(const MatF& m) {
  MatF out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const float norm = out.row(i).norm();
    if (norm == 0.0f) {
      throw DegenerateEmbeddingError("zero-norm embedding at row " + std::to_string(i));
    }
    out.row(i) /= norm;
  }
  return out;
}

}  // namespace

double pair_cosine(const float* a, const float* b, int dim) {
  if (std::memcmp(a, b, static_cast<std::size_t>(dim) * sizeof(float)) == 0) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < dim; ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateEmbeddingError("zero-norm embedding in cosine");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SimilarityStats stats_from(const std::string& group, std::vector<double> sims) {
  if (sims.empty()) throw ConfigError("no similarity samples for group " + group);
  SimilarityStats s;
  s.group = group;
  s.n_pairs = static_cast<int>(sims.size());
  double sum = 0.0;
  for (double v : sims) sum += v;
  s.mean = sum / static_cast<double>(sims.size());
  double sq = 0.0;
  for (double v : sims) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(sims.size()));
  std::sort(sims.begin(), sims.end());
  s.min = sims.front();
  s.p25 = quantile(sims, 0.25);
  s.median = quantile(sims, 0.5);
  s.p75 = quantile(sims, 0.75);
  s.max = sims.back();
  return s;
}

std::vector<SimilarityStats> similarity_distribution(
    const ModelWeights<float>& w, const ModelConfig& cfg, const EncoderConfig& encoder_cfg,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& vocab_groups,
    const ViewFn& augmenter, int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
  std::vector<SimilarityStats> report;
  std::vector<std::string> all_words;

  for (std::size_t g = 0; g < vocab_groups.size(); ++g) {
    const auto& [label, words] = vocab_groups[g];
    if (words.empty()) throw ConfigError("similarity group " + label + " is empty");
    all_words.insert(all_words.end(), words.begin(), words.end());

    std::vector<std::string> clean(static_cast<std::size_t>(n_pairs));
    std::vector<std::string> views(static_cast<std::size_t>(n_pairs));
    for (int p = 0; p < n_pairs; ++p) {
      Rng rng(mix_seed(mix_seed(seed, kPairStream, g), static_cast<std::uint64_t>(p)));
      const std::string& word = words[rng.index(words.size())];
      clean[static_cast<std::size_t>(p)] = word;
      views[static_cast<std::size_t>(p)] = augmenter ? augmenter(word, rng) : word;
    }
    const MatF e_clean = embed_batch(clean, w, cfg, encoder_cfg);
    const MatF e_view = embed_batch(views, w, cfg, encoder_cfg);
    std::vector<double> sims(static_cast<std::size_t>(n_pairs));
    for (int p = 0; p < n_pairs; ++p) {
      sims[static_cast<std::size_t>(p)] =
          pair_cosine(e_clean.row(p).data(), e_view.row(p).data(), cfg.embedding_dim);
    }
    report.push_back(stats_from(label, std::move(sims)));
  }

  // Baseline: cosine between clean embeddings of two different words.
  const bool has_distinct =
      std::any_of(all_words.begin(), all_words.end(),
                  [&](const std::string& word) { return word != all_words.front(); });
  if (has_distinct) {
    std::vector<std::string> left(static_cast<std::size_t>(n_pairs));
    std::vector<std::string> right(static_cast<std::size_t>(n_pairs));
    for (int p = 0; p < n_pairs; ++p) {
      Rng rng(mix_seed(seed, kBaselineStream, static_cast<std::uint64_t>(p)));
      const std::size_t i = rng.index(all_words.size());
      std::size_t j = i;
      while (all_words[j] == all_words[i]) {
        j = rng.index(all_words.size());
      }
      left[static_cast<std::size_t>(p)] = all_words[i];
      right[static_cast<std::size_t>(p)] = all_words[j];
    }
    const MatF e_left = embed_batch(left, w, cfg, encoder_cfg);
    const MatF e_right = embed_batch(right, w, cfg, encoder_cfg);
    std::vector<double> sims(static_cast<std::size_t>(n_pairs));
    for (int p = 0; p < n_pairs; ++p) {
      sims[static_cast<std::size_t>(p)] =
          pair_cosine(e_left.row(p).data(), e_right.row(p).data(), cfg.embedding_dim);
    }
    report.push_back(stats_from("random-pairs", std::move(sims)));
  }
  return report;
}

double nn_recovery(const ModelWeights<float>& w, const ModelConfig& cfg,
                   const EncoderConfig& encoder_cfg, const std::vector<std::string>& vocab,
                   const ViewFn& augmenter, int n_queries, std::uint64_t seed) {
  if (vocab.empty()) throw ConfigError("nn_recovery needs a non-empty vocab");
  if (n_queries < 1) throw ConfigError("n_queries must be >= 1");

  const MatF vocab_unit = normalized_rows(embed_batch(vocab, w, cfg, encoder_cfg));

  std::vector<std::string> sources(static_cast<std::size_t>(n_queries));
  std::vector<std::string> queries(static_cast<std::size_t>(n_queries));
  for (int q = 0; q < n_queries; ++q) {
    Rng rng(mix_seed(seed, kQueryStream, static_cast<std::uint64_t>(q)));
    const std::string& word = vocab[rng.index(vocab.size())];
    sources[static_cast<std::size_t>(q)] = word;
    queries[static_cast<std::size_t>(q)] = augmenter ? augmenter(word, rng) : word;
  }
  const MatF query_unit = normalized_rows(embed_batch(queries, w, cfg, encoder_cfg));

  MatF scores(query_unit.rows(), vocab_unit.rows());
  scores.noalias() = query_unit * vocab_unit.transpose();
  int recovered = 0;
  for (int q = 0; q < n_queries; ++q) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(q, j) > scores(q, best)) best = j;  // ties keep the lowest index
    }
    if (vocab[static_cast<std::size_t>(best)] == sources[static_cast<std::size_t>(q)]) {
      ++recovered;
    }
  }
  return static_cast<double>(recovered) / static_cast<double>(n_queries);
}

const char* typo_kind_name(TypoKind kind) {
  switch (kind) {
    case TypoKind::insertion: return "insertion";
    case TypoKind::deletion: return "deletion";
    case TypoKind::substitution: return "substitution";
    case TypoKind::neighbor_swap: return "neighbor_swap";
    case TypoKind::keyboard: return "keyboard";
  }
  return "unknown";
}

TypoKind typo_kind_from_name(const std::string& name) {
  if (name == "insertion") return TypoKind::insertion;
  if (name == "deletion") return TypoKind::deletion;
  if (name == "substitution") return TypoKind::substitution;
  if (name == "neighbor_swap") return TypoKind::neighbor_swap;
  if (name == "keyboard") return TypoKind::keyboard;
  throw ConfigError("unknown typo kind: " + name);
}

std::string inject_typos(const std::string& text, const TypoInjectorConfig& cfg,
                         const ResourceTables& tables) {
  cfg.validate();

  // Split into word and whitespace spans, keeping both.
  struct Span {
    std::size_t begin;
    std::size_t end;
    bool is_word;
  };
  std::vector<Span> spans;
  std::vector<std::size_t> word_spans;
  std::size_t offset = 0;
  while (offset < text.size()) {
    const std::size_t start = offset;
    std::size_t probe = offset;
    const bool word = !utf8::is_whitespace(utf8::decode_one(text, probe));
    while (offset < text.size()) {
      probe = offset;
      if ((!utf8::is_whitespace(utf8::decode_one(text, probe))) != word) break;
      offset = probe;
    }
    if (word) word_spans.push_back(spans.size());
    spans.push_back({start, offset, word});
  }

  const auto n_words = word_spans.size();
  const auto n_modify = static_cast<std::size_t>(
      std::floor(cfg.word_typo_rate * static_cast<double>(n_words) + 0.5));

  std::vector<std::size_t> picks(n_words);
  for (std::size_t i = 0; i < n_words; ++i) picks[i] = i;
  Rng select_rng(mix_seed(cfg.seed, kWordStream));
  for (std::size_t i = 0; i < n_modify && i < n_words; ++i) {
    const std::size_t j = i + select_rng.index(n_words - i);
    std::swap(picks[i], picks[j]);
  }
  std::vector<bool> modify(n_words, false);
  for (std::size_t i = 0; i < n_modify && i < n_words; ++i) modify[picks[i]] = true;

  std::string out;
  out.reserve(text.size() + n_modify * 2);
  std::size_t word_index = 0;
  for (const Span& span : spans) {
    const std::string_view piece(text.data() + span.begin, span.end - span.begin);
    if (!span.is_word) {
      out.append(piece);
      continue;
    }
    if (!modify[word_index]) {
      out.append(piece);
    } else {
      const std::vector<char32_t> cps = utf8::decode(piece);
      const std::u32string word(cps.begin(), cps.end());
      Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(word_index)));
      const std::u32string typo = inject_one_typo(word, cfg, tables, rng, std::string(piece));
      std::vector<char32_t> out_cps(typo.begin(), typo.end());
      out.append(utf8::encode(out_cps));
    }
    ++word_index;
  }
  return out;
}

ViewFn make_edit_view(const ResourceTables& tables, int edits, const TypoInjectorConfig& base) {
  if (edits < 0) throw ConfigError("edit count must be >= 0");
  TypoInjectorConfig cfg = base;
  cfg.block_sizes = {1};
  cfg.validate();
  return [&tables, cfg, edits](const std::string& word, Rng& rng) {
    const std::vector<char32_t> cps = utf8::decode(word);
    std::u32string current(cps.begin(), cps.end());
    for (int e = 0; e < edits; ++e) {
      current = inject_one_typo(current, cfg, tables, rng, word);
    }
    std::vector<char32_t> out_cps(current.begin(), current.end());
    return utf8::encode(out_cps);
  };
}

void export_projection(const ModelWeights<float>& w, const ModelConfig& cfg,
                       const EncoderConfig& encoder_cfg, const std::vector<std::string>& vocab,
                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const MatF embeddings = embed_batch(vocab, w, cfg, encoder_cfg);

  std::ofstream vectors(fs::path(out_dir) / "vectors.tsv");
  if (!vectors) throw IoError("cannot write vectors.tsv under " + out_dir);
  char buffer[64];
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.9g", static_cast<double>(embeddings(i, j)));
      if (j > 0) vectors << '\t';
      vectors << buffer;
    }
    vectors << '\n';
  }
  vectors.flush();
  if (!vectors) throw IoError("failed writing vectors.tsv under " + out_dir);

  std::ofstream metadata(fs::path(out_dir) / "metadata.tsv");
  if (!metadata) throw IoError("cannot write metadata.tsv under " + out_dir);
  for (const std::string& word : vocab) metadata << word << '\n';
  metadata.flush();
  if (!metadata) throw IoError("failed writing metadata.tsv under " + out_dir);
}

}  // namespace retcore
