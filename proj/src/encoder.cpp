#include "retcore/encoder.hpp"

#include "retcore/parallel.hpp"
#include "retcore/utf8.hpp"

namespace retcore {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::size_t offset = 0;
  std::size_t word_start = 0;
  bool in_word = false;
  while (offset < text.size()) {
    const std::size_t here = offset;
    const char32_t cp = utf8::decode_one(text, offset);
    if (utf8::is_whitespace(cp)) {
      if (in_word) {
        words.emplace_back(text.substr(word_start, here - word_start));
        in_word = false;
      }
    } else if (!in_word) {
      word_start = here;
      in_word = true;
    }
  }
  if (in_word) words.emplace_back(text.substr(word_start));
  return words;
}

CodepointWord integerize(std::string_view word, const EncoderConfig& cfg) {
  cfg.validate();
  CodepointWord cw;
  cw.codepoints.assign(static_cast<std::size_t>(cfg.max_word_len), 0);
  std::size_t offset = 0;
  std::size_t i = 0;
  while (offset < word.size() && i < cw.codepoints.size()) {
    cw.codepoints[i++] = utf8::decode_one(word, offset);
  }
  return cw;
}

BinarizedWord binarize(const CodepointWord& cw, const EncoderConfig& cfg) {
  cfg.validate();
  const std::uint64_t limit = std::uint64_t{1} << cfg.bits_per_char;
  std::vector<std::uint32_t> packed(cw.codepoints.size());
  for (std::size_t i = 0; i < cw.codepoints.size(); ++i) {
    const auto cp = static_cast<std::uint64_t>(cw.codepoints[i]);
    if (cp >= limit) {
      throw ValueRangeError("codepoint " + std::to_string(cp) + " needs more than " +
                            std::to_string(cfg.bits_per_char) + " bits");
    }
    packed[i] = static_cast<std::uint32_t>(cp);
  }
  return BinarizedWord(std::move(packed), cfg.bits_per_char);
}

CodepointWord debinarize(const BinarizedWord& bw) {
  CodepointWord cw;
  cw.codepoints.reserve(bw.packed().size());
  for (std::uint32_t value : bw.packed()) cw.codepoints.push_back(value);
  return cw;
}

CodepointWord debinarize(const MatF& bits) {
  CodepointWord cw;
  cw.codepoints.assign(static_cast<std::size_t>(bits.rows()), 0);
  for (Eigen::Index i = 0; i < bits.rows(); ++i) {
    std::uint32_t value = 0;
    for (Eigen::Index j = 0; j < bits.cols(); ++j) {
      const float b = bits(i, j);
      if (b != 0.0f && b != 1.0f) {
        throw ValidationError("bit matrix entry at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") is not 0 or 1");
      }
      if (b == 1.0f) value |= (1u << j);
    }
    cw.codepoints[static_cast<std::size_t>(i)] = value;
  }
  return cw;
}

MatF encode_raw(std::string_view text, const EncoderConfig& cfg, int max_words) {
  cfg.validate();
  if (max_words < 1) throw ConfigError("max_words must be >= 1");
  const std::vector<std::string> words = tokenize(text);
  MatF out = MatF::Zero(max_words, cfg.flat_dim());
  const int n = std::min<int>(max_words, static_cast<int>(words.size()));
  for (int i = 0; i < n; ++i) {
    binarize(integerize(words[static_cast<std::size_t>(i)], cfg), cfg)
        .write_flat(out.row(i).data());
  }
  return out;
}

MatF encode_words(const std::vector<std::string>& words, const EncoderConfig& cfg,
                  unsigned threads) {
  cfg.validate();
  MatF out(static_cast<Eigen::Index>(words.size()), cfg.flat_dim());
  parallel_chunks(words.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      binarize(integerize(words[i], cfg), cfg)
          .write_flat(out.row(static_cast<Eigen::Index>(i)).data());
    }
  });
  return out;
}

}  // namespace retcore
