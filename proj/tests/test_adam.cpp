#include <doctest.h>

#include <cmath>
#include <limits>

#include "retcore/model.hpp"
#include "retcore/trainer.hpp"
#include "oracles.hpp"

using namespace retcore;

namespace {

ModelConfig toy_config() {
  ModelConfig cfg;
  cfg.max_word_len = 2;
  cfg.char_dim = 5;  // projection kernel is 5x2: ten parameters to mirror
  cfg.projection_dim = 2;
  cfg.fc_layers = 1;
  cfg.fc_dim = 2;
  cfg.embedding_dim = 2;
  cfg.spatial_dropout_rate = 0.0;
  cfg.dropout_rate = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("zero gradient leaves parameters untouched") {
  const auto cfg = toy_config();
  auto w = init_weights<double>(cfg, 5);
  const auto before = w;
  auto grads = ModelWeights<double>::zeros(cfg);
  auto state = AdamState<double>::init(cfg);
  TrainConfig tc;
  adam_step(w, grads, state, 1, 1e-3, tc);
  const auto got = w.tensors();
  const auto want = before.tensors();
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(got[i].first);
    CHECK(got[i].second->isApprox(*want[i].second, 0.0));
  }
}

TEST_CASE("first step moves each coordinate by about the learning rate") {
  const auto cfg = toy_config();
  auto w = ModelWeights<double>::zeros(cfg);
  auto grads = ModelWeights<double>::zeros(cfg);
  grads.projection.setConstant(3.7);  // magnitude cancels in m / sqrt(v)
  auto state = AdamState<double>::init(cfg);
  TrainConfig tc;
  adam_step(w, grads, state, 1, 1e-3, tc);
  // m_hat / (sqrt(v_hat) + eps) == g / (|g| + eps) on the first step
  const double expected = -1e-3 * 3.7 / (3.7 + tc.adam_eps);
  for (Eigen::Index i = 0; i < w.projection.size(); ++i) {
    CHECK(w.projection.data()[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(w.fc[0].isZero(0.0));  // untouched tensors stay put
}

TEST_CASE("matches a scalar reference over many steps") {
  const auto cfg = toy_config();
  auto w = init_weights<double>(cfg, 99);
  auto state = AdamState<double>::init(cfg);
  TrainConfig tc;

  // Mirror ten of the parameters in a textbook scalar implementation.
  oracles::ScalarAdam ref(10);
  ref.eps = tc.adam_eps;
  std::vector<double> params(10);
  for (int i = 0; i < 10; ++i) params[static_cast<std::size_t>(i)] = w.projection.data()[i];

  Rng rng(314);
  for (int step = 1; step <= 40; ++step) {
    auto grads = ModelWeights<double>::zeros(cfg);
    for (const auto& [name, tensor] : grads.tensors()) {
      for (Eigen::Index i = 0; i < tensor->size(); ++i) tensor->data()[i] = rng.uniform(-2.0, 2.0);
    }
    std::vector<double> gs(10);
    for (int i = 0; i < 10; ++i) gs[static_cast<std::size_t>(i)] = grads.projection.data()[i];
    const double lr = 1e-3 * (1.0 + 0.1 * step);
    adam_step(w, grads, state, step, lr, tc);
    ref.step(params, gs, lr);
    for (int i = 0; i < 10; ++i) {
      CHECK(std::abs(w.projection.data()[i] - params[static_cast<std::size_t>(i)]) < 1e-12);
    }
  }
}

TEST_CASE("non-finite gradients are reported with the tensor name") {
  const auto cfg = toy_config();
  auto w = init_weights<double>(cfg, 1);
  auto grads = ModelWeights<double>::zeros(cfg);
  grads.fc_bias[0](0, 1) = std::numeric_limits<double>::quiet_NaN();
  auto state = AdamState<double>::init(cfg);
  TrainConfig tc;
  CHECK_THROWS_WITH_AS(adam_step(w, grads, state, 1, 1e-3, tc),
                       doctest::Contains("fc1/bias"), NumericError);
}

TEST_CASE("weight decay shrinks parameters independently of the gradient") {
  const auto cfg = toy_config();
  auto w = ModelWeights<double>::zeros(cfg);
  w.embedding.setConstant(2.0);
  auto grads = ModelWeights<double>::zeros(cfg);
  auto state = AdamState<double>::init(cfg);
  TrainConfig tc;
  tc.weight_decay = 0.01;
  adam_step(w, grads, state, 1, 0.5, tc);
  // zero gradient: the only movement is the decoupled decay lr * wd * w
  const double expected = 2.0 - 0.5 * 0.01 * 2.0;
  CHECK(w.embedding(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("step index below one is rejected") {
  const auto cfg = toy_config();
  auto w = ModelWeights<double>::zeros(cfg);
  auto grads = ModelWeights<double>::zeros(cfg);
  auto state = AdamState<double>::init(cfg);
  TrainConfig tc;
  CHECK_THROWS_AS(adam_step(w, grads, state, 0, 1e-3, tc), ConfigError);
}
