#include <doctest.h>

#include <cmath>

#include "retcore/model.hpp"
#include "test_util.hpp"

using namespace retcore;
using testutil::bitwise_equal;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.max_word_len = 4;
  cfg.char_dim = 8;
  cfg.projection_dim = 8;
  cfg.fc_dim = 16;
  cfg.embedding_dim = 8;
  return cfg;
}

MatF random_bits(Eigen::Index n, const ModelConfig& cfg, Rng& rng) {
  MatF bits(n, cfg.flat_dim());
  for (Eigen::Index i = 0; i < bits.size(); ++i) {
    bits.data()[i] = rng.bernoulli(0.4) ? 1.0f : 0.0f;
  }
  return bits;
}

}  // namespace

TEST_CASE("gelu matches the Gaussian CDF definition") {
  CHECK(gelu(0.0) == 0.0);
  CHECK(gelu(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(gelu(-1.0) == doctest::Approx(-0.15865525393145707).epsilon(1e-12));
  // derivative against central differences
  for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
    const double h = 1e-6;
    const double fd = (gelu(x + h) - gelu(x - h)) / (2 * h);
    CHECK(gelu_grad(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("parameter count matches the closed form") {
  ModelConfig cfg;
  CHECK(cfg.parameter_count() == 263712);
  const auto w = init_weights<float>(cfg, 1);
  CHECK(w.parameter_count() == 263712);

  const ModelConfig tiny = tiny_config();
  CHECK(init_weights<float>(tiny, 2).parameter_count() == tiny.parameter_count());
}

TEST_CASE("init_weights is deterministic with zero biases") {
  ModelConfig cfg = tiny_config();
  const auto a = init_weights<float>(cfg, 42);
  const auto b = init_weights<float>(cfg, 42);
  const auto c = init_weights<float>(cfg, 43);
  CHECK(bitwise_equal(a, b));
  CHECK_FALSE(bitwise_equal(a, c));
  CHECK(a.projection_bias.isZero(0.0f));
  CHECK(a.fc_bias[0].isZero(0.0f));
  CHECK(a.embedding_bias.isZero(0.0f));
  // fan-average uniform bound for the projection kernel
  const float limit = std::sqrt(6.0f / (8 + 8));
  CHECK(a.projection.maxCoeff() <= limit);
  CHECK(a.projection.minCoeff() >= -limit);
}

TEST_CASE("inference is pure and bounded by tanh") {
  ModelConfig cfg = tiny_config();
  const auto w = init_weights<float>(cfg, 3);
  Rng rng(17);
  const MatF bits = random_bits(5, cfg, rng);
  const MatF a = forward_infer(bits, w, cfg);
  const MatF b = forward_infer(bits, w, cfg);
  CHECK(bitwise_equal(a, b));
  CHECK(a.rows() == 5);
  CHECK(a.cols() == cfg.embedding_dim);
  CHECK(a.maxCoeff() < 1.0f);
  CHECK(a.minCoeff() > -1.0f);
}

TEST_CASE("zero weights map everything to the zero vector") {
  ModelConfig cfg = tiny_config();
  const auto w = ModelWeights<float>::zeros(cfg);
  Rng rng(9);
  const MatF out = forward_infer(random_bits(3, cfg, rng), w, cfg);
  CHECK(out.isZero(0.0f));
}

TEST_CASE("forward rejects mismatched input shapes") {
  ModelConfig cfg = tiny_config();
  const auto w = init_weights<float>(cfg, 3);
  const MatF bad = MatF::Zero(2, cfg.flat_dim() + 1);
  CHECK_THROWS_AS(forward_infer(bad, w, cfg), ConfigError);
}

TEST_CASE("spatial dropout keeps the input mean and zeroes whole rows") {
  ModelConfig cfg;  // default 16x24, rate 0.0625
  const auto w = init_weights<float>(cfg, 5);
  Rng bit_rng(31);
  MatF bits = MatF::Zero(1, cfg.flat_dim());
  for (Eigen::Index j = 0; j < bits.size(); ++j) {
    bits.data()[j] = bit_rng.bernoulli(0.5) ? 1.0f : 0.0f;
  }

  Rng rng(77);
  const int n_samples = 4000;
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(cfg.flat_dim());
  ForwardCache<float> cache;
  for (int s = 0; s < n_samples; ++s) {
    const auto masks = make_dropout_masks<float>(1, cfg, rng);
    forward(bits, w, cfg, &masks, cache);
    // each character row is either fully zero or fully scaled
    for (int l = 0; l < cfg.max_word_len; ++l) {
      const auto row = cache.x_dropped.row(0).segment(l * cfg.char_dim, cfg.char_dim);
      const float scale = masks.rows(0, l) / (1.0f - 0.0625f);
      for (int j = 0; j < cfg.char_dim; ++j) {
        CHECK(row(j) == bits(0, l * cfg.char_dim + j) * scale);
      }
    }
    mean += cache.x_dropped.row(0).cast<double>();
  }
  mean /= n_samples;
  // E[mask/(1-p)] = 1, Var = p/(1-p). The 16 character rows are checked
  // independently, so allow 4 sigma to keep the max of them in bounds.
  const double sigma = std::sqrt(0.0625 / (1.0 - 0.0625) / n_samples);
  for (Eigen::Index j = 0; j < bits.size(); ++j) {
    if (bits(0, j) == 1.0f) {
      CHECK(std::abs(mean(j) - 1.0) < 4 * sigma + 1e-9);
    } else {
      CHECK(mean(j) == 0.0);
    }
  }
}

TEST_CASE("embed_batch composes encoder and model") {
  ModelConfig cfg;
  const auto w = init_weights<float>(cfg, 21);
  const MatF out = embed_batch({"cat", "dog", "cat", ""}, w, cfg);
  REQUIRE(out.rows() == 4);
  REQUIRE(out.cols() == 256);
  CHECK(bitwise_equal(MatF(out.row(0)), MatF(out.row(2))));
  CHECK_FALSE(bitwise_equal(MatF(out.row(0)), MatF(out.row(1))));
  CHECK(out.row(3).isZero(0.0f));  // empty word bypasses the model

  const MatF empty = embed_batch({}, w, cfg);
  CHECK(empty.rows() == 0);

  // permuting inputs permutes rows
  const MatF swapped = embed_batch({"dog", "cat"}, w, cfg);
  CHECK(bitwise_equal(MatF(swapped.row(0)), MatF(out.row(1))));
  CHECK(bitwise_equal(MatF(swapped.row(1)), MatF(out.row(0))));

  // thread count does not change results
  std::vector<std::string> many;
  for (int i = 0; i < 300; ++i) many.push_back("word" + std::to_string(i));
  CHECK(bitwise_equal(embed_batch(many, w, cfg, {}, 1), embed_batch(many, w, cfg, {}, 3)));
}
