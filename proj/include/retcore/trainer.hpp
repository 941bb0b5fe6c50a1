#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "retcore/augment.hpp"
#include "retcore/encoder.hpp"
#include "retcore/loss.hpp"
#include "retcore/model.hpp"

namespace retcore {

struct TrainConfig {
  int steps = 5000;
  int batch_size = 128;
  double peak_lr = 0.001;
  double end_lr = 0.0001;
  int warmup_steps = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-7;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
  // Share of views that go through the augmenter; the rest stay clean.
  double augmented_share = 0.8;

  void validate() const {
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (batch_size < 2 || batch_size % 2 != 0) {
      throw ConfigError("batch_size must be an even number >= 2");
    }
    if (warmup_steps < 0 || (steps > 0 && warmup_steps >= steps)) {
      throw ConfigError("warmup_steps must satisfy 0 <= warmup < steps");
    }
    if (peak_lr <= 0.0 || end_lr < 0.0 || end_lr > peak_lr) {
      throw ConfigError("learning rates must satisfy 0 <= end_lr <= peak_lr, peak_lr > 0");
    }
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
      throw ConfigError("adam betas must be in [0, 1)");
    }
    if (adam_eps <= 0.0) throw ConfigError("adam_eps must be positive");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
    if (augmented_share < 0.0 || augmented_share > 1.0) {
      throw ConfigError("augmented_share must be in [0, 1]");
    }
  }
};

// Linear warmup to peak_lr, then cosine decay to end_lr; endpoints exact.
double lr_schedule(int t, const TrainConfig& cfg);

template <class S>
struct AdamState {
  ModelWeights<S> m;
  ModelWeights<S> v;

  static AdamState init(const ModelConfig& cfg) {
    return AdamState{ModelWeights<S>::zeros(cfg), ModelWeights<S>::zeros(cfg)};
  }
};

// Bias-corrected Adam with epsilon added outside the square root.
template <class S>
void adam_step(ModelWeights<S>& w, const ModelWeights<S>& grads, AdamState<S>& state, int t,
               double lr, const TrainConfig& cfg) {
  if (t < 1) throw ConfigError("adam step index must be >= 1");
  const S beta1 = static_cast<S>(cfg.adam_beta1);
  const S beta2 = static_cast<S>(cfg.adam_beta2);
  const S eps = static_cast<S>(cfg.adam_eps);
  const S correction1 = static_cast<S>(1.0 - std::pow(cfg.adam_beta1, t));
  const S correction2 = static_cast<S>(1.0 - std::pow(cfg.adam_beta2, t));
  const S step_size = static_cast<S>(lr);

  auto weight_refs = w.tensors();
  auto grad_refs = const_cast<ModelWeights<S>&>(grads).tensors();
  auto m_refs = state.m.tensors();
  auto v_refs = state.v.tensors();
  for (std::size_t i = 0; i < weight_refs.size(); ++i) {
    const Mat<S>& g = *grad_refs[i].second;
    if (!g.allFinite()) {
      throw NumericError("non-finite gradient in tensor " + weight_refs[i].first);
    }
    Mat<S>& m = *m_refs[i].second;
    Mat<S>& v = *v_refs[i].second;
    m = beta1 * m + (S(1) - beta1) * g;
    v = (beta2 * v.array() + (S(1) - beta2) * g.array().square()).matrix();
    Mat<S>& param = *weight_refs[i].second;
    param.array() -=
        step_size * (m.array() / correction1) /
        ((v.array() / correction2).sqrt() + eps);
    if (cfg.weight_decay > 0.0) {
      param.array() -= step_size * static_cast<S>(cfg.weight_decay) * param.array();
    }
  }
}

struct PairBatch {
  std::vector<std::string> tokens;
  std::vector<int> labels;  // each label value appears exactly twice
};

using ViewFn = std::function<std::string(const std::string&, Rng&)>;

// Augment with probability `augmented_share`, otherwise return the clean word.
ViewFn make_training_view(const ResourceTables& tables, const AugmentationPolicy& policy,
                          double augmented_share);

// batch_size/2 distinct vocab words, two independent views each.
PairBatch make_pair_batch(const std::vector<std::string>& vocab, const ViewFn& view,
                          int batch_size, Rng& rng);

struct TrainLogRow {
  int step;
  double lr;
  double loss;
};

struct TrainResult {
  ModelWeights<float> weights;
  std::vector<TrainLogRow> log;
};

TrainResult train(const std::vector<std::string>& vocab, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const MSLossConfig& loss_cfg,
                  const ResourceTables& tables, const AugmentationPolicy& policy,
                  const EncoderConfig& encoder_cfg = {},
                  const std::function<void(const TrainLogRow&)>& on_step = {});

}  // namespace retcore
