#include "retcore/model.hpp"

#include "retcore/parallel.hpp"

namespace retcore {

MatF embed_batch(const std::vector<std::string>& words, const ModelWeights<float>& w,
                 const ModelConfig& cfg, const EncoderConfig& encoder_cfg, unsigned threads) {
  cfg.validate();
  encoder_cfg.validate();
  if (encoder_cfg.max_word_len != cfg.max_word_len ||
      encoder_cfg.bits_per_char != cfg.char_dim) {
    throw ConfigError("encoder config does not match model input shape");
  }
  MatF out(static_cast<Eigen::Index>(words.size()), cfg.embedding_dim);
  constexpr std::size_t kBlock = 2048;
  parallel_chunks(words.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t at = begin; at < end; at += kBlock) {
      const std::size_t stop = std::min(end, at + kBlock);
      const auto block = static_cast<Eigen::Index>(stop - at);
      MatF bits(block, cfg.flat_dim());
      for (std::size_t i = at; i < stop; ++i) {
        binarize(integerize(words[i], encoder_cfg), encoder_cfg)
            .write_flat(bits.row(static_cast<Eigen::Index>(i - at)).data());
      }
      out.middleRows(static_cast<Eigen::Index>(at), block) = forward_infer(bits, w, cfg);
      for (std::size_t i = at; i < stop; ++i) {
        if (words[i].empty()) out.row(static_cast<Eigen::Index>(i)).setZero();
      }
    }
  });
  return out;
}

}  // namespace retcore
