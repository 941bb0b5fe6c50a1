#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "retcore/encoder.hpp"
#include "retcore/errors.hpp"
#include "retcore/rng.hpp"
#include "retcore/tensor.hpp"

namespace retcore {

struct ModelConfig {
  int max_word_len = 16;
  int char_dim = 24;
  int projection_dim = 32;
  int fc_layers = 2;
  int fc_dim = 256;
  int embedding_dim = 256;
  double spatial_dropout_rate = 0.0625;
  double dropout_rate = 0.0;
  std::string hidden_activation = "gelu";
  std::string embedding_activation = "tanh";

  void validate() const {
    if (max_word_len < 1 || char_dim < 1 || projection_dim < 1 || fc_layers < 1 ||
        fc_dim < 1 || embedding_dim < 1) {
      throw ConfigError("model dimensions must be positive");
    }
    if (spatial_dropout_rate < 0.0 || spatial_dropout_rate >= 1.0 || dropout_rate < 0.0 ||
        dropout_rate >= 1.0) {
      throw ConfigError("dropout rates must be in [0, 1)");
    }
    if (hidden_activation != "gelu") throw ConfigError("unsupported hidden activation");
    if (embedding_activation != "tanh") throw ConfigError("unsupported embedding activation");
  }

  int flat_dim() const { return max_word_len * char_dim; }

  std::int64_t parameter_count() const {
    const std::int64_t proj = std::int64_t{char_dim} * projection_dim + projection_dim;
    std::int64_t fc = std::int64_t{max_word_len} * projection_dim * fc_dim + fc_dim;
    fc += std::int64_t{fc_layers - 1} * (std::int64_t{fc_dim} * fc_dim + fc_dim);
    const std::int64_t head = std::int64_t{fc_dim} * embedding_dim + embedding_dim;
    return proj + fc + head;
  }
};

// Biases are stored as 1-row matrices so every tensor walks through the same
// (name, matrix) manifest for init, optimizer updates and serialization.
template <class S>
struct ModelWeights {
  Mat<S> projection;
  Mat<S> projection_bias;
  std::vector<Mat<S>> fc;
  std::vector<Mat<S>> fc_bias;
  Mat<S> embedding;
  Mat<S> embedding_bias;

  static ModelWeights zeros(const ModelConfig& cfg) {
    cfg.validate();
    ModelWeights w;
    w.projection = Mat<S>::Zero(cfg.char_dim, cfg.projection_dim);
    w.projection_bias = Mat<S>::Zero(1, cfg.projection_dim);
    w.fc.resize(static_cast<std::size_t>(cfg.fc_layers));
    w.fc_bias.resize(static_cast<std::size_t>(cfg.fc_layers));
    int in_dim = cfg.max_word_len * cfg.projection_dim;
    for (int k = 0; k < cfg.fc_layers; ++k) {
      w.fc[static_cast<std::size_t>(k)] = Mat<S>::Zero(in_dim, cfg.fc_dim);
      w.fc_bias[static_cast<std::size_t>(k)] = Mat<S>::Zero(1, cfg.fc_dim);
      in_dim = cfg.fc_dim;
    }
    w.embedding = Mat<S>::Zero(cfg.fc_dim, cfg.embedding_dim);
    w.embedding_bias = Mat<S>::Zero(1, cfg.embedding_dim);
    return w;
  }

  std::vector<std::pair<std::string, Mat<S>*>> tensors() {
    std::vector<std::pair<std::string, Mat<S>*>> refs;
    refs.emplace_back("projection/kernel", &projection);
    refs.emplace_back("projection/bias", &projection_bias);
    for (std::size_t k = 0; k < fc.size(); ++k) {
      const std::string base = "fc" + std::to_string(k + 1);
      refs.emplace_back(base + "/kernel", &fc[k]);
      refs.emplace_back(base + "/bias", &fc_bias[k]);
    }
    refs.emplace_back("embedding/kernel", &embedding);
    refs.emplace_back("embedding/bias", &embedding_bias);
    return refs;
  }

  std::vector<std::pair<std::string, const Mat<S>*>> tensors() const {
    std::vector<std::pair<std::string, const Mat<S>*>> refs;
    auto& self = const_cast<ModelWeights&>(*this);
    for (auto& [name, tensor] : self.tensors()) refs.emplace_back(name, tensor);
    return refs;
  }

  std::int64_t parameter_count() const {
    std::int64_t total = 0;
    for (const auto& [name, tensor] : tensors()) total += tensor->size();
    return total;
  }

  void check_shapes(const ModelConfig& cfg) const {
    const ModelWeights expect = zeros(cfg);
    const auto a = tensors();
    const auto b = expect.tensors();
    if (a.size() != b.size()) throw ConfigError("weight tensor count does not match config");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].second->rows() != b[i].second->rows() ||
          a[i].second->cols() != b[i].second->cols()) {
        throw ConfigError("tensor " + a[i].first + " shape does not match config");
      }
    }
  }

  template <class T>
  ModelWeights<T> cast() const {
    ModelWeights<T> out;
    out.projection = projection.template cast<T>();
    out.projection_bias = projection_bias.template cast<T>();
    out.fc.reserve(fc.size());
    out.fc_bias.reserve(fc_bias.size());
    for (const auto& m : fc) out.fc.push_back(m.template cast<T>());
    for (const auto& m : fc_bias) out.fc_bias.push_back(m.template cast<T>());
    out.embedding = embedding.template cast<T>();
    out.embedding_bias = embedding_bias.template cast<T>();
    return out;
  }
};

// Exact Gaussian-CDF form; x * Phi(x).
template <class S>
inline S gelu(S x) {
  return S(0.5) * x * (S(1) + std::erf(x * S(0.7071067811865475244)));
}

// Phi(x) + x * phi(x).
template <class S>
inline S gelu_grad(S x) {
  const S phi = std::exp(S(-0.5) * x * x) * S(0.3989422804014326779);
  const S Phi = S(0.5) * (S(1) + std::erf(x * S(0.7071067811865475244)));
  return Phi + x * phi;
}

// Glorot-style fan-average uniform kernels, zero biases. Draw order follows
// the tensor manifest, so results are reproducible for a given seed.
template <class S>
ModelWeights<S> init_weights(const ModelConfig& cfg, std::uint64_t seed) {
  ModelWeights<S> w = ModelWeights<S>::zeros(cfg);
  Rng rng(seed);
  for (auto& [name, tensor] : w.tensors()) {
    if (name.ends_with("/bias")) continue;
    const double fan_in = static_cast<double>(tensor->rows());
    const double fan_out = static_cast<double>(tensor->cols());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index i = 0; i < tensor->size(); ++i) {
      tensor->data()[i] = static_cast<S>(rng.uniform(-limit, limit));
    }
  }
  return w;
}

// Keep flags (0/1) drawn per batch; scaling by 1/(1-rate) happens in the
// forward pass so inference needs no masks at all.
template <class S>
struct DropoutMasks {
  Mat<S> rows;              // batch × max_word_len, spatial dropout over characters
  std::vector<Mat<S>> fc;   // per fully-connected layer, batch × fc_dim
};

template <class S>
DropoutMasks<S> make_dropout_masks(Eigen::Index batch, const ModelConfig& cfg, Rng& rng) {
  DropoutMasks<S> masks;
  masks.rows = Mat<S>(batch, cfg.max_word_len);
  for (Eigen::Index i = 0; i < masks.rows.size(); ++i) {
    masks.rows.data()[i] = rng.bernoulli(cfg.spatial_dropout_rate) ? S(0) : S(1);
  }
  masks.fc.resize(static_cast<std::size_t>(cfg.fc_layers));
  for (auto& m : masks.fc) {
    m = Mat<S>(batch, cfg.fc_dim);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = rng.bernoulli(cfg.dropout_rate) ? S(0) : S(1);
    }
  }
  return masks;
}

template <class S>
struct ForwardCache {
  Mat<S> x_dropped;             // batch × (max_word_len * char_dim)
  Mat<S> proj_pre;              // (batch * max_word_len) × projection_dim
  std::vector<Mat<S>> layer_in; // input to fc layer k; layer_in[0] is the flatten
  std::vector<Mat<S>> fc_pre;   // pre-activation per fc layer
  Mat<S> emb_pre;               // batch × embedding_dim
  Mat<S> out;                   // tanh output
};

namespace detail {

template <class S>
void check_forward_shapes(const Mat<S>& bits, const ModelConfig& cfg) {
  if (bits.cols() != cfg.flat_dim()) {
    throw ConfigError("input has " + std::to_string(bits.cols()) +
                      " columns, expected " + std::to_string(cfg.flat_dim()));
  }
}

}  // namespace detail

// `masks` as produced by make_dropout_masks; pass nullptr for inference.
template <class S>
const Mat<S>& forward(const Mat<S>& bits, const ModelWeights<S>& w, const ModelConfig& cfg,
                      const DropoutMasks<S>* masks, ForwardCache<S>& cache) {
  detail::check_forward_shapes(bits, cfg);
  w.check_shapes(cfg);
  const Eigen::Index n = bits.rows();
  const int L = cfg.max_word_len;
  const int C = cfg.char_dim;
  const int P = cfg.projection_dim;

  cache.x_dropped = bits;
  if (masks != nullptr && cfg.spatial_dropout_rate > 0.0) {
    const S scale = S(1) / static_cast<S>(1.0 - cfg.spatial_dropout_rate);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int l = 0; l < L; ++l) {
        cache.x_dropped.row(i).segment(l * C, C) *= masks->rows(i, l) * scale;
      }
    }
  }

  // Per-character projection: view the batch as one row per character.
  Eigen::Map<const Mat<S>> chars(cache.x_dropped.data(), n * L, C);
  cache.proj_pre.noalias() = chars * w.projection;
  cache.proj_pre.rowwise() += w.projection_bias.row(0);
  Mat<S> proj_act = cache.proj_pre.unaryExpr([](S x) { return gelu(x); });

  cache.layer_in.assign(static_cast<std::size_t>(cfg.fc_layers) + 1, Mat<S>());
  cache.fc_pre.assign(static_cast<std::size_t>(cfg.fc_layers), Mat<S>());
  // Row-major storage makes the flatten a free reinterpretation.
  cache.layer_in[0] = Eigen::Map<const Mat<S>>(proj_act.data(), n, L * P);

  for (int k = 0; k < cfg.fc_layers; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    cache.fc_pre[ku].noalias() = cache.layer_in[ku] * w.fc[ku];
    cache.fc_pre[ku].rowwise() += w.fc_bias[ku].row(0);
    cache.layer_in[ku + 1] = cache.fc_pre[ku].unaryExpr([](S x) { return gelu(x); });
    if (masks != nullptr && cfg.dropout_rate > 0.0) {
      const S scale = S(1) / static_cast<S>(1.0 - cfg.dropout_rate);
      cache.layer_in[ku + 1].array() *= masks->fc[ku].array() * scale;
    }
  }

  cache.emb_pre.noalias() = cache.layer_in.back() * w.embedding;
  cache.emb_pre.rowwise() += w.embedding_bias.row(0);
  cache.out = cache.emb_pre.unaryExpr([](S x) { return std::tanh(x); });
  return cache.out;
}

template <class S>
Mat<S> forward_infer(const Mat<S>& bits, const ModelWeights<S>& w, const ModelConfig& cfg) {
  ForwardCache<S> cache;
  return forward<S>(bits, w, cfg, nullptr, cache);
}

// Gradient of the loss with respect to every weight tensor; `grad_out` is
// d(loss)/d(embedding), batch × embedding_dim.
template <class S>
ModelWeights<S> backward(const Mat<S>& grad_out, const ModelWeights<S>& w,
                         const ModelConfig& cfg, const DropoutMasks<S>* masks,
                         const ForwardCache<S>& cache) {
  const Eigen::Index n = grad_out.rows();
  const int L = cfg.max_word_len;
  const int C = cfg.char_dim;
  const int P = cfg.projection_dim;
  ModelWeights<S> grad = ModelWeights<S>::zeros(cfg);

  Mat<S> d = (grad_out.array() * (S(1) - cache.out.array().square())).matrix();
  grad.embedding.noalias() = cache.layer_in.back().transpose() * d;
  grad.embedding_bias = d.colwise().sum();
  Mat<S> d_in = d * w.embedding.transpose();

  for (int k = cfg.fc_layers - 1; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    if (masks != nullptr && cfg.dropout_rate > 0.0) {
      const S scale = S(1) / static_cast<S>(1.0 - cfg.dropout_rate);
      d_in.array() *= masks->fc[ku].array() * scale;
    }
    Mat<S> d_pre =
        (d_in.array() * cache.fc_pre[ku].unaryExpr([](S x) { return gelu_grad(x); }).array())
            .matrix();
    grad.fc[ku].noalias() = cache.layer_in[ku].transpose() * d_pre;
    grad.fc_bias[ku] = d_pre.colwise().sum();
    d_in = d_pre * w.fc[ku].transpose();
  }

  // d_in is the flatten gradient; reinterpret per character.
  Eigen::Map<const Mat<S>> d_proj_act(d_in.data(), n * L, P);
  Mat<S> d_proj_pre =
      (d_proj_act.array() * cache.proj_pre.unaryExpr([](S x) { return gelu_grad(x); }).array())
          .matrix();
  Eigen::Map<const Mat<S>> chars(cache.x_dropped.data(), n * L, C);
  grad.projection.noalias() = chars.transpose() * d_proj_pre;
  grad.projection_bias = d_proj_pre.colwise().sum();
  return grad;
}

// Single-word inference; values lie strictly inside (-1, 1).
template <class S>
Vec<S> forward_word(const BinarizedWord& bw, const ModelWeights<S>& w, const ModelConfig& cfg) {
  if (bw.length() != cfg.max_word_len || bw.bits_per_char() != cfg.char_dim) {
    throw ConfigError("encoded word shape does not match model config");
  }
  Mat<S> bits(1, cfg.flat_dim());
  bw.write_flat(bits.data());
  return forward_infer(bits, w, cfg).row(0).transpose();
}

// Encoder + model composition. Empty words map to exact zero rows without
// touching the model, matching the padding convention.
MatF embed_batch(const std::vector<std::string>& words, const ModelWeights<float>& w,
                 const ModelConfig& cfg, const EncoderConfig& encoder_cfg = {},
                 unsigned threads = 1);

}  // namespace retcore
