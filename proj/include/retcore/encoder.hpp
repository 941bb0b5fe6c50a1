#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "retcore/errors.hpp"
#include "retcore/tensor.hpp"

namespace retcore {

struct EncoderConfig {
  int max_word_len = 16;
  int bits_per_char = 24;

  void validate() const {
    if (max_word_len < 1) throw ConfigError("max_word_len must be >= 1");
    if (bits_per_char < 1 || bits_per_char > 32) {
      throw ConfigError("bits_per_char must be in [1, 32]");
    }
  }
  int flat_dim() const { return max_word_len * bits_per_char; }
};

// Codepoints of a single word, zero-padded to exactly max_word_len entries.
struct CodepointWord {
  std::vector<char32_t> codepoints;
};

// Per-character little-endian bit matrix, kept packed; each row i holds
// codepoint bits (cp >> j) & 1 for column j. Materialized to 0.0/1.0
// floats only at the model boundary.
class BinarizedWord {
 public:
  BinarizedWord(std::vector<std::uint32_t> packed, int bits_per_char)
      : packed_(std::move(packed)), bits_per_char_(bits_per_char) {}

  int length() const { return static_cast<int>(packed_.size()); }
  int bits_per_char() const { return bits_per_char_; }
  const std::vector<std::uint32_t>& packed() const { return packed_; }

  int bit(int row, int col) const {
    return static_cast<int>((packed_[static_cast<std::size_t>(row)] >> col) & 1u);
  }

  template <class S>
  void write_flat(S* out) const {
    for (int i = 0; i < length(); ++i) {
      for (int j = 0; j < bits_per_char_; ++j) {
        out[i * bits_per_char_ + j] = static_cast<S>(bit(i, j));
      }
    }
  }

  template <class S>
  Mat<S> to_matrix() const {
    Mat<S> m(length(), bits_per_char_);
    write_flat(m.data());
    return m;
  }

 private:
  std::vector<std::uint32_t> packed_;
  int bits_per_char_;
};

// Splits on Unicode whitespace; punctuation stays attached to words.
std::vector<std::string> tokenize(std::string_view text);

// First max_word_len codepoints, zero-padded to exactly max_word_len.
CodepointWord integerize(std::string_view word, const EncoderConfig& cfg = {});

BinarizedWord binarize(const CodepointWord& cw, const EncoderConfig& cfg = {});

CodepointWord debinarize(const BinarizedWord& bw);

// Float-matrix inverse: entries must be exactly 0.0 or 1.0.
CodepointWord debinarize(const MatF& bits);

// tokenize + integerize + binarize + flatten, one row per word, truncated
// or zero-padded to exactly max_words rows.
MatF encode_raw(std::string_view text, const EncoderConfig& cfg = {}, int max_words = 16);

// One flattened encoding row per word; rows ordered as the input regardless
// of thread count.
MatF encode_words(const std::vector<std::string>& words, const EncoderConfig& cfg = {},
                  unsigned threads = 1);

}  // namespace retcore
