#include "retcore/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>

#include "retcore/utf8.hpp"

namespace retcore {

namespace {

const std::vector<OpKind> kDeletionKinds = {OpKind::delete_char};

const std::vector<OpKind> kInsertionKinds = {
    OpKind::insert_repeat_char,    OpKind::insert_ngram_prefix,
    OpKind::insert_ngram_suffix,   OpKind::insert_random_ascii,
    OpKind::insert_alphabet,       OpKind::insert_punctuation,
    OpKind::insert_punctuation_prefix, OpKind::insert_punctuation_suffix,
    OpKind::insert_bmp,            OpKind::insert_emoji_prefix,
    OpKind::insert_emoji_suffix,
};

const std::vector<OpKind> kSubstitutionKinds = {
    OpKind::sub_case,   OpKind::sub_ngram,       OpKind::sub_qwerty,
    OpKind::sub_homoglyph, OpKind::sub_random_ascii, OpKind::sub_alphabet,
    OpKind::sub_punctuation, OpKind::sub_bmp,
};

const std::vector<OpKind> kTranspositionKinds = {OpKind::swap_neighbor,
                                                 OpKind::shuffle_block3};

constexpr int kOpRetries = 10;

char32_t random_printable_ascii(Rng& rng) {
  return static_cast<char32_t>(0x21 + rng.below(0x7e - 0x21 + 1));
}

// Non-surrogate, non-control, non-noncharacter BMP scalar.
char32_t random_bmp(Rng& rng) {
  for (;;) {
    const auto cp = static_cast<char32_t>(0x21 + rng.below(0xfffd - 0x21 + 1));
    if (cp >= 0xd800 && cp <= 0xdfff) continue;
    if (cp >= 0x7f && cp <= 0xa0) continue;
    if (cp >= 0xfdd0 && cp <= 0xfdef) continue;
    return cp;
  }
}

bool is_ascii_letter(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}

char32_t toggle_ascii_case(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return cp - 0x20;
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  return cp;
}

std::vector<std::size_t> positions_where(const std::u32string& token,
                                         bool (*pred)(char32_t)) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (pred(token[i])) out.push_back(i);
  }
  return out;
}

// Substitute token[pos] with a char drawn by `draw`, redrawing a bounded
// number of times until the result differs from the original.
template <class Draw>
std::optional<std::u32string> substitute_differing(const std::u32string& token,
                                                   std::size_t pos, Rng& rng, Draw draw) {
  for (int attempt = 0; attempt < kOpRetries; ++attempt) {
    const char32_t replacement = draw(rng);
    if (replacement != token[pos]) {
      std::u32string out = token;
      out[pos] = replacement;
      return out;
    }
  }
  return std::nullopt;
}

// n choices for the n-gram ops: tables that exist, fit the cost budget and
// (for substitution) fit inside the token.
std::vector<int> feasible_ngram_sizes(const ResourceTables& tables, int max_cost,
                                      std::size_t max_len) {
  std::vector<int> sizes;
  for (int n = 3; n <= 5; ++n) {
    if (n > max_cost) continue;
    if (static_cast<std::size_t>(n) > max_len) continue;
    if (tables.ngrams[static_cast<std::size_t>(n - 3)].empty()) continue;
    sizes.push_back(n);
  }
  return sizes;
}

std::map<char32_t, std::vector<char32_t>> embedded_qwerty() {
  // US layout, letters and digits only, including diagonal neighbors.
  static const std::pair<char32_t, const char*> rows[] = {
      {U'1', "2q"},      {U'2', "13qw"},    {U'3', "24we"},   {U'4', "35er"},
      {U'5', "46rt"},    {U'6', "57ty"},    {U'7', "68yu"},   {U'8', "79ui"},
      {U'9', "80io"},    {U'0', "9op"},     {U'q', "wa12"},   {U'w', "qeas23"},
      {U'e', "wrsd34"},  {U'r', "etdf45"},  {U't', "ryfg56"}, {U'y', "tugh67"},
      {U'u', "yihj78"},  {U'i', "uojk89"},  {U'o', "ipkl90"}, {U'p', "ol0"},
      {U'a', "sqwz"},    {U's', "adwezx"},  {U'd', "sferxc"}, {U'f', "dgrtcv"},
      {U'g', "fhtyvb"},  {U'h', "gjyubn"},  {U'j', "hkuinm"}, {U'k', "jliom"},
      {U'l', "kop"},     {U'z', "xas"},     {U'x', "zcsd"},   {U'c', "xvdf"},
      {U'v', "cbfg"},    {U'b', "vngh"},    {U'n', "bmhj"},   {U'm', "njk"},
  };
  std::map<char32_t, std::vector<char32_t>> table;
  for (const auto& [key, neighbors] : rows) {
    std::vector<char32_t>& set = table[key];
    for (const char* p = neighbors; *p; ++p) set.push_back(static_cast<char32_t>(*p));
  }
  return table;
}

std::map<char32_t, std::vector<char32_t>> embedded_homoglyphs() {
  // 50 visually confusable mappings across Latin, Greek, Cyrillic and digits.
  static const std::pair<char32_t, const char32_t*> rows[] = {
      {U'a', U"а"},       {U'b', U"ƅ"},       {U'c', U"с"},
      {U'd', U"ԁ"},       {U'e', U"е"},       {U'f', U"ſ"},
      {U'g', U"ɡ"},       {U'h', U"һ"},       {U'i', U"іı"},
      {U'j', U"ј"},       {U'k', U"к"},       {U'l', U"1ӏ"},
      {U'm', U"м"},       {U'n', U"ո"},       {U'o', U"о0"},
      {U'p', U"р"},       {U'q', U"ԛ"},       {U'r', U"г"},
      {U's', U"ѕ"},       {U't', U"т"},       {U'u', U"υ"},
      {U'v', U"ν"},       {U'w', U"ԝ"},       {U'x', U"х"},
      {U'y', U"у"},       {U'z', U"ʐ"},       {U'0', U"Оo"},
      {U'1', U"lI"},           {U'3', U"З"},       {U'A', U"АΑ"},
      {U'B', U"ВΒ"}, {U'C', U"СϹ"}, {U'E', U"ЕΕ"},
      {U'F', U"Ϝ"},       {U'G', U"Ԍ"},       {U'H', U"НΗ"},
      {U'I', U"ІΙ"}, {U'J', U"Ј"},       {U'K', U"КΚ"},
      {U'M', U"МΜ"}, {U'N', U"Ν"},       {U'O', U"ОΟ"},
      {U'P', U"РΡ"}, {U'S', U"Ѕ"},       {U'T', U"ТΤ"},
      {U'V', U"Ѵ"},       {U'W', U"Ԝ"},       {U'X', U"ХΧ"},
      {U'Y', U"УΥ"}, {U'Z', U"Ζ"},
  };
  std::map<char32_t, std::vector<char32_t>> table;
  for (const auto& [key, others] : rows) {
    std::vector<char32_t>& set = table[key];
    for (const char32_t* p = others; *p; ++p) set.push_back(*p);
  }
  return table;
}

std::vector<char32_t> embedded_punctuation() {
  std::vector<char32_t> set;
  for (char32_t cp = 0x21; cp <= 0x7e; ++cp) {
    const bool alnum = (cp >= U'0' && cp <= U'9') || is_ascii_letter(cp);
    if (!alnum) set.push_back(cp);
  }
  return set;
}

std::vector<char32_t> embedded_emoji() {
  std::vector<char32_t> set;
  for (char32_t cp = 0x1f600; cp <= 0x1f63f; ++cp) set.push_back(cp);
  return set;
}

OpCategory draw_category(const AugmentationPolicy& policy, Rng& rng) {
  double total = 0.0;
  for (double w : policy.category_weights) total += w;
  const double r = rng.uniform(0.0, total);
  double acc = 0.0;
  for (std::size_t c = 0; c < policy.category_weights.size(); ++c) {
    acc += policy.category_weights[c];
    if (r < acc) return static_cast<OpCategory>(c);
  }
  return OpCategory::transposition;
}

void load_map_table(const std::filesystem::path& file,
                    std::map<char32_t, std::vector<char32_t>>& table) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open table file " + file.string());
  table.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) +
                        ": expected `char TAB replacement-set`");
    }
    const std::vector<char32_t> key = utf8::decode(line.substr(0, tab));
    const std::vector<char32_t> values = utf8::decode(line.substr(tab + 1));
    if (key.size() != 1 || values.empty()) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) +
                        ": key must be one character with a non-empty replacement set");
    }
    table[key[0]] = values;
  }
}

void load_set_table(const std::filesystem::path& file, std::vector<char32_t>& set) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open table file " + file.string());
  set.clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char32_t cp : utf8::decode(line)) set.push_back(cp);
  }
  if (set.empty()) throw ConfigError(file.string() + ": table file defines no characters");
}

}  // namespace

OpCategory category_of(OpKind kind) {
  switch (kind) {
    case OpKind::delete_char:
      return OpCategory::deletion;
    case OpKind::insert_repeat_char:
    case OpKind::insert_ngram_prefix:
    case OpKind::insert_ngram_suffix:
    case OpKind::insert_random_ascii:
    case OpKind::insert_alphabet:
    case OpKind::insert_punctuation:
    case OpKind::insert_punctuation_prefix:
    case OpKind::insert_punctuation_suffix:
    case OpKind::insert_bmp:
    case OpKind::insert_emoji_prefix:
    case OpKind::insert_emoji_suffix:
      return OpCategory::insertion;
    case OpKind::sub_case:
    case OpKind::sub_ngram:
    case OpKind::sub_qwerty:
    case OpKind::sub_homoglyph:
    case OpKind::sub_random_ascii:
    case OpKind::sub_alphabet:
    case OpKind::sub_punctuation:
    case OpKind::sub_bmp:
      return OpCategory::substitution;
    case OpKind::swap_neighbor:
    case OpKind::shuffle_block3:
      return OpCategory::transposition;
  }
  throw ConfigError("unknown augmentation kind");
}

const std::vector<OpKind>& kinds_in(OpCategory category) {
  switch (category) {
    case OpCategory::deletion:
      return kDeletionKinds;
    case OpCategory::insertion:
      return kInsertionKinds;
    case OpCategory::substitution:
      return kSubstitutionKinds;
    case OpCategory::transposition:
      return kTranspositionKinds;
  }
  throw ConfigError("unknown augmentation category");
}

const char* kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::delete_char: return "delete-char";
    case OpKind::insert_repeat_char: return "insert-repeat-char";
    case OpKind::insert_ngram_prefix: return "insert-ngram-prefix";
    case OpKind::insert_ngram_suffix: return "insert-ngram-suffix";
    case OpKind::insert_random_ascii: return "insert-random-ascii";
    case OpKind::insert_alphabet: return "insert-alphabet";
    case OpKind::insert_punctuation: return "insert-punctuation";
    case OpKind::insert_punctuation_prefix: return "insert-punctuation-prefix";
    case OpKind::insert_punctuation_suffix: return "insert-punctuation-suffix";
    case OpKind::insert_bmp: return "insert-bmp";
    case OpKind::insert_emoji_prefix: return "insert-emoji-prefix";
    case OpKind::insert_emoji_suffix: return "insert-emoji-suffix";
    case OpKind::sub_case: return "sub-case";
    case OpKind::sub_ngram: return "sub-ngram";
    case OpKind::sub_qwerty: return "sub-qwerty";
    case OpKind::sub_homoglyph: return "sub-homoglyph";
    case OpKind::sub_random_ascii: return "sub-random-ascii";
    case OpKind::sub_alphabet: return "sub-alphabet";
    case OpKind::sub_punctuation: return "sub-punctuation";
    case OpKind::sub_bmp: return "sub-bmp";
    case OpKind::swap_neighbor: return "swap-neighbor";
    case OpKind::shuffle_block3: return "shuffle-block3";
  }
  return "unknown";
}

ResourceTables build_tables(const std::vector<std::string>& vocab, int max_ngrams) {
  if (vocab.empty()) throw ConfigError("cannot build augmentation tables from an empty vocab");
  ResourceTables tables;
  tables.qwerty_neighbors = embedded_qwerty();
  tables.homoglyphs = embedded_homoglyphs();
  tables.punctuation = embedded_punctuation();
  tables.emoji = embedded_emoji();

  std::map<char32_t, bool> seen;
  std::array<std::map<std::u32string, std::int64_t>, 3> counts;
  for (const std::string& word : vocab) {
    const std::vector<char32_t> cps = utf8::decode(word);
    for (char32_t cp : cps) seen[cp] = true;
    for (int n = 3; n <= 5; ++n) {
      if (cps.size() < static_cast<std::size_t>(n)) continue;
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= cps.size(); ++i) {
        counts[static_cast<std::size_t>(n - 3)][std::u32string(
            cps.begin() + static_cast<std::ptrdiff_t>(i),
            cps.begin() + static_cast<std::ptrdiff_t>(i) + n)]++;
      }
    }
  }
  for (const auto& [cp, flag] : seen) tables.alphabet.push_back(cp);

  for (std::size_t slot = 0; slot < 3; ++slot) {
    std::vector<std::pair<std::u32string, std::int64_t>> ranked(counts[slot].begin(),
                                                                counts[slot].end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(max_ngrams)) {
      ranked.resize(static_cast<std::size_t>(max_ngrams));
    }
    tables.ngrams[slot].reserve(ranked.size());
    for (auto& [gram, count] : ranked) tables.ngrams[slot].push_back(std::move(gram));
  }
  return tables;
}

void load_table_overrides(ResourceTables& tables, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  if (!fs::is_directory(base)) throw IoError("table directory not found: " + dir);
  if (fs::exists(base / "qwerty.tsv")) load_map_table(base / "qwerty.tsv", tables.qwerty_neighbors);
  if (fs::exists(base / "homoglyphs.tsv")) load_map_table(base / "homoglyphs.tsv", tables.homoglyphs);
  if (fs::exists(base / "punctuation.tsv")) load_set_table(base / "punctuation.tsv", tables.punctuation);
  if (fs::exists(base / "emoji.tsv")) load_set_table(base / "emoji.tsv", tables.emoji);
}

std::optional<OpResult> try_apply_op(const std::u32string& token, OpKind kind,
                                     const ResourceTables& tables, int max_cost, Rng& rng) {
  const std::size_t len = token.size();
  if (len == 0 || max_cost < 1) return std::nullopt;
  const auto insert_at = [&](std::size_t pos, char32_t cp) {
    std::u32string out = token;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), cp);
    return OpResult{std::move(out), 1};
  };

  switch (kind) {
    case OpKind::delete_char: {
      if (len < 2) return std::nullopt;  // never empties a token
      std::u32string out = token;
      out.erase(out.begin() + static_cast<std::ptrdiff_t>(rng.index(len)));
      return OpResult{std::move(out), 1};
    }

    case OpKind::insert_repeat_char: {
      const std::size_t i = rng.index(len);
      return insert_at(i + 1, token[i]);
    }
    case OpKind::insert_ngram_prefix:
    case OpKind::insert_ngram_suffix: {
      const std::vector<int> sizes =
          feasible_ngram_sizes(tables, max_cost, std::u32string::npos);
      if (sizes.empty()) return std::nullopt;
      const int n = sizes[rng.index(sizes.size())];
      const auto& grams = tables.ngrams[static_cast<std::size_t>(n - 3)];
      const std::u32string& gram = grams[rng.index(grams.size())];
      std::u32string out =
          kind == OpKind::insert_ngram_prefix ? gram + token : token + gram;
      return OpResult{std::move(out), n};
    }
    case OpKind::insert_random_ascii:
      return insert_at(rng.index(len + 1), random_printable_ascii(rng));
    case OpKind::insert_alphabet: {
      if (tables.alphabet.empty()) return std::nullopt;
      return insert_at(rng.index(len + 1), tables.alphabet[rng.index(tables.alphabet.size())]);
    }
    case OpKind::insert_punctuation: {
      if (tables.punctuation.empty()) return std::nullopt;
      return insert_at(rng.index(len + 1),
                       tables.punctuation[rng.index(tables.punctuation.size())]);
    }
    case OpKind::insert_punctuation_prefix: {
      if (tables.punctuation.empty()) return std::nullopt;
      return insert_at(0, tables.punctuation[rng.index(tables.punctuation.size())]);
    }
    case OpKind::insert_punctuation_suffix: {
      if (tables.punctuation.empty()) return std::nullopt;
      return insert_at(len, tables.punctuation[rng.index(tables.punctuation.size())]);
    }
    case OpKind::insert_bmp:
      return insert_at(rng.index(len + 1), random_bmp(rng));
    case OpKind::insert_emoji_prefix: {
      if (tables.emoji.empty()) return std::nullopt;
      return insert_at(0, tables.emoji[rng.index(tables.emoji.size())]);
    }
    case OpKind::insert_emoji_suffix: {
      if (tables.emoji.empty()) return std::nullopt;
      return insert_at(len, tables.emoji[rng.index(tables.emoji.size())]);
    }

    case OpKind::sub_case: {
      const std::vector<std::size_t> spots = positions_where(token, is_ascii_letter);
      if (spots.empty()) return std::nullopt;
      std::u32string out = token;
      const std::size_t pos = spots[rng.index(spots.size())];
      out[pos] = toggle_ascii_case(out[pos]);
      return OpResult{std::move(out), 1};
    }
    case OpKind::sub_ngram: {
      const std::vector<int> sizes = feasible_ngram_sizes(tables, max_cost, len);
      if (sizes.empty()) return std::nullopt;
      const int n = sizes[rng.index(sizes.size())];
      const auto& grams = tables.ngrams[static_cast<std::size_t>(n - 3)];
      const std::size_t pos = rng.index(len - static_cast<std::size_t>(n) + 1);
      for (int attempt = 0; attempt < kOpRetries; ++attempt) {
        const std::u32string& gram = grams[rng.index(grams.size())];
        if (token.compare(pos, static_cast<std::size_t>(n), gram) != 0) {
          std::u32string out = token;
          out.replace(pos, static_cast<std::size_t>(n), gram);
          return OpResult{std::move(out), n};
        }
      }
      return std::nullopt;
    }
    case OpKind::sub_qwerty: {
      std::vector<std::size_t> spots;
      for (std::size_t i = 0; i < len; ++i) {
        const char32_t lower =
            (token[i] >= U'A' && token[i] <= U'Z') ? token[i] + 0x20 : token[i];
        if (tables.qwerty_neighbors.count(lower)) spots.push_back(i);
      }
      if (spots.empty()) return std::nullopt;
      const std::size_t pos = spots[rng.index(spots.size())];
      const bool upper = token[pos] >= U'A' && token[pos] <= U'Z';
      const char32_t lower = upper ? token[pos] + 0x20 : token[pos];
      const auto& neighbors = tables.qwerty_neighbors.at(lower);
      char32_t replacement = neighbors[rng.index(neighbors.size())];
      if (upper && replacement >= U'a' && replacement <= U'z') replacement -= 0x20;
      std::u32string out = token;
      out[pos] = replacement;
      return OpResult{std::move(out), 1};
    }
    case OpKind::sub_homoglyph: {
      std::vector<std::size_t> spots;
      for (std::size_t i = 0; i < len; ++i) {
        if (tables.homoglyphs.count(token[i])) spots.push_back(i);
      }
      if (spots.empty()) return std::nullopt;
      const std::size_t pos = spots[rng.index(spots.size())];
      const auto& set = tables.homoglyphs.at(token[pos]);
      std::u32string out = token;
      out[pos] = set[rng.index(set.size())];
      return OpResult{std::move(out), 1};
    }
    case OpKind::sub_random_ascii: {
      auto out = substitute_differing(token, rng.index(len), rng, random_printable_ascii);
      if (!out) return std::nullopt;
      return OpResult{std::move(*out), 1};
    }
    case OpKind::sub_alphabet: {
      if (tables.alphabet.empty()) return std::nullopt;
      auto out = substitute_differing(token, rng.index(len), rng, [&](Rng& r) {
        return tables.alphabet[r.index(tables.alphabet.size())];
      });
      if (!out) return std::nullopt;
      return OpResult{std::move(*out), 1};
    }
    case OpKind::sub_punctuation: {
      if (tables.punctuation.empty()) return std::nullopt;
      auto out = substitute_differing(token, rng.index(len), rng, [&](Rng& r) {
        return tables.punctuation[r.index(tables.punctuation.size())];
      });
      if (!out) return std::nullopt;
      return OpResult{std::move(*out), 1};
    }
    case OpKind::sub_bmp: {
      auto out = substitute_differing(token, rng.index(len), rng, random_bmp);
      if (!out) return std::nullopt;
      return OpResult{std::move(*out), 1};
    }

    case OpKind::swap_neighbor: {
      if (len < 2 || max_cost < 2) return std::nullopt;
      for (int attempt = 0; attempt < kOpRetries; ++attempt) {
        const std::size_t i = rng.index(len - 1);
        if (token[i] == token[i + 1]) continue;
        std::u32string out = token;
        std::swap(out[i], out[i + 1]);
        return OpResult{std::move(out), 2};
      }
      return std::nullopt;
    }
    case OpKind::shuffle_block3: {
      if (len < 3 || max_cost < 2) return std::nullopt;
      const std::size_t start = rng.index(len - 2);
      for (int attempt = 0; attempt < kOpRetries; ++attempt) {
        std::array<char32_t, 3> block = {token[start], token[start + 1], token[start + 2]};
        rng.shuffle(block.begin(), block.end());
        if (block[0] == token[start] && block[1] == token[start + 1] &&
            block[2] == token[start + 2]) {
          continue;
        }
        std::u32string out = token;
        for (std::size_t k = 0; k < 3; ++k) out[start + k] = block[k];
        // Any permutation of 3 adjacent characters is reachable within
        // 2 plain edits, so budget 2 like the neighbor swap.
        return OpResult{std::move(out), 2};
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<std::string> apply_op(const std::string& token, OpKind kind,
                                    const ResourceTables& tables, Rng& rng) {
  const std::vector<char32_t> cps = utf8::decode(token);
  const std::u32string as32(cps.begin(), cps.end());
  auto result = try_apply_op(as32, kind, tables, std::numeric_limits<int>::max(), rng);
  if (!result) return std::nullopt;
  std::vector<char32_t> out_cps(result->token.begin(), result->token.end());
  return utf8::encode(out_cps);
}

std::string augment_token(const std::string& token, const AugmentationPolicy& policy,
                          const ResourceTables& tables, Rng& rng) {
  policy.validate();
  if (token.empty()) throw ConfigError("cannot augment an empty token");
  const std::vector<char32_t> cps = utf8::decode(token);
  std::u32string current(cps.begin(), cps.end());

  const double fraction = rng.uniform(0.0, policy.max_typo_fraction);
  int budget = std::min<int>(policy.max_typos,
                             static_cast<int>(std::floor(fraction * static_cast<double>(cps.size()))));

  while (budget > 0) {
    bool applied = false;
    for (int attempt = 0; attempt < kOpRetries && !applied; ++attempt) {
      const OpCategory category = draw_category(policy, rng);
      const std::vector<OpKind>& kinds = kinds_in(category);
      const OpKind kind = kinds[rng.index(kinds.size())];
      if (auto result = try_apply_op(current, kind, tables, budget, rng)) {
        current = std::move(result->token);
        budget -= result->cost;
        applied = true;
      }
    }
    if (!applied) break;
  }
  std::vector<char32_t> out_cps(current.begin(), current.end());
  return utf8::encode(out_cps);
}

}  // namespace retcore
