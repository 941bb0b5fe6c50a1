#include "retcore/trainer.hpp"

#include <cmath>
#include <numbers>

namespace retcore {

namespace {

// Substream tags so every step draws from independent, order-free streams.
constexpr std::uint64_t kBatchStream = 0x42415443;    // batch sampling + views
constexpr std::uint64_t kDropoutStream = 0x44524f50;  // dropout masks

}  // namespace

double lr_schedule(int t, const TrainConfig& cfg) {
  if (t < 1 || t > cfg.steps) throw ConfigError("schedule step out of range");
  if (cfg.warmup_steps > 0 && t <= cfg.warmup_steps) {
    return cfg.peak_lr * static_cast<double>(t) / static_cast<double>(cfg.warmup_steps);
  }
  if (t == cfg.steps) return cfg.end_lr;
  const double progress = static_cast<double>(t - cfg.warmup_steps) /
                          static_cast<double>(cfg.steps - cfg.warmup_steps);
  return cfg.end_lr +
         0.5 * (cfg.peak_lr - cfg.end_lr) * (1.0 + std::cos(std::numbers::pi * progress));
}

ViewFn make_training_view(const ResourceTables& tables, const AugmentationPolicy& policy,
                          double augmented_share) {
  return [&tables, policy, augmented_share](const std::string& word, Rng& rng) {
    if (rng.unit() < augmented_share) return augment_token(word, policy, tables, rng);
    return word;
  };
}

PairBatch make_pair_batch(const std::vector<std::string>& vocab, const ViewFn& view,
                          int batch_size, Rng& rng) {
  if (batch_size < 2 || batch_size % 2 != 0) {
    throw ConfigError("batch_size must be an even number >= 2");
  }
  const std::size_t n_words = static_cast<std::size_t>(batch_size) / 2;
  if (vocab.size() < n_words) {
    throw ConfigError("vocab has " + std::to_string(vocab.size()) +
                      " words, need at least " + std::to_string(n_words) +
                      " for one batch");
  }
  // Partial Fisher-Yates over vocab indices: first n_words entries are a
  // without-replacement sample.
  std::vector<std::size_t> indices(vocab.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  for (std::size_t i = 0; i < n_words; ++i) {
    const std::size_t j = i + rng.index(indices.size() - i);
    std::swap(indices[i], indices[j]);
  }

  PairBatch batch;
  batch.tokens.reserve(static_cast<std::size_t>(batch_size));
  batch.labels.reserve(static_cast<std::size_t>(batch_size));
  for (std::size_t i = 0; i < n_words; ++i) {
    const std::string& word = vocab[indices[i]];
    batch.tokens.push_back(view(word, rng));
    batch.tokens.push_back(view(word, rng));
    batch.labels.push_back(static_cast<int>(i));
    batch.labels.push_back(static_cast<int>(i));
  }
  return batch;
}

TrainResult train(const std::vector<std::string>& vocab, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const MSLossConfig& loss_cfg,
                  const ResourceTables& tables, const AugmentationPolicy& policy,
                  const EncoderConfig& encoder_cfg,
                  const std::function<void(const TrainLogRow&)>& on_step) {
  model_cfg.validate();
  train_cfg.validate();
  loss_cfg.validate();
  policy.validate();
  if (vocab.empty()) throw ConfigError("cannot train on an empty vocab");
  if (encoder_cfg.max_word_len != model_cfg.max_word_len ||
      encoder_cfg.bits_per_char != model_cfg.char_dim) {
    throw ConfigError("encoder config does not match model input shape");
  }

  TrainResult result;
  result.weights = init_weights<float>(model_cfg, train_cfg.seed);
  if (train_cfg.steps == 0) return result;

  const ViewFn view = make_training_view(tables, policy, train_cfg.augmented_share);
  AdamState<float> state = AdamState<float>::init(model_cfg);
  result.log.reserve(static_cast<std::size_t>(train_cfg.steps));

  for (int step = 1; step <= train_cfg.steps; ++step) {
    Rng batch_rng(mix_seed(train_cfg.seed, static_cast<std::uint64_t>(step), kBatchStream));
    Rng dropout_rng(
        mix_seed(train_cfg.seed, static_cast<std::uint64_t>(step), kDropoutStream));

    const PairBatch batch = make_pair_batch(vocab, view, train_cfg.batch_size, batch_rng);
    const MatF bits = encode_words(batch.tokens, encoder_cfg, 1);
    const DropoutMasks<float> masks =
        make_dropout_masks<float>(bits.rows(), model_cfg, dropout_rng);

    ForwardCache<float> cache;
    const MatF& embeddings = forward(bits, result.weights, model_cfg, &masks, cache);
    const MatF sim = cosine_similarity_matrix(embeddings);
    const LossResult<float> loss = ms_loss(sim, batch.labels, loss_cfg);
    if (!std::isfinite(loss.loss)) {
      throw NumericError("non-finite loss at step " + std::to_string(step));
    }

    const MatF grad_embeddings = cosine_backward(embeddings, sim, loss.grad);
    const ModelWeights<float> grads =
        backward(grad_embeddings, result.weights, model_cfg, &masks, cache);
    const double lr = lr_schedule(step, train_cfg);
    adam_step(result.weights, grads, state, step, lr, train_cfg);

    const TrainLogRow row{step, lr, static_cast<double>(loss.loss)};
    result.log.push_back(row);
    if (on_step) on_step(row);
  }
  return result;
}

}  // namespace retcore
