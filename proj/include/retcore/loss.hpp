#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "retcore/errors.hpp"
#include "retcore/tensor.hpp"

namespace retcore {

struct MSLossConfig {
  double alpha = 4.0;
  double beta = 40.0;
  double lambda = 0.5;
  double epsilon_margin = 0.1;

  void validate() const {
    if (alpha <= 0.0 || beta <= 0.0) throw ConfigError("alpha and beta must be positive");
    if (lambda < -1.0 || lambda > 1.0) throw ConfigError("lambda must be in [-1, 1]");
    if (epsilon_margin < 0.0) throw ConfigError("epsilon margin must be non-negative");
  }
};

using MaskMat = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PairMasks {
  MaskMat positive;  // mined positive pairs, anchor per row
  MaskMat negative;
};

template <class S>
Mat<S> cosine_similarity_matrix(const Mat<S>& E) {
  const Eigen::Index n = E.rows();
  Vec<S> inv_norm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S norm = E.row(i).norm();
    if (norm == S(0)) {
      throw DegenerateEmbeddingError("zero-norm embedding at row " + std::to_string(i));
    }
    inv_norm(i) = S(1) / norm;
  }
  Mat<S> unit = inv_norm.asDiagonal() * E;
  Mat<S> sim(n, n);
  sim.noalias() = unit * unit.transpose();
  sim.diagonal().setOnes();
  // Bitwise-equal rows are the same point, so force the exact maximum there
  // instead of whatever the dot product rounds to.
  const auto row_bytes = static_cast<std::size_t>(E.cols()) * sizeof(S);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (sim(i, j) > S(0.999) &&
          std::memcmp(E.row(i).data(), E.row(j).data(), row_bytes) == 0) {
        sim(i, j) = S(1);
        sim(j, i) = S(1);
      }
    }
  }
  return sim;
}

// Chain rule through the cosine matrix: given dLoss/dS, returns dLoss/dE.
template <class S>
Mat<S> cosine_backward(const Mat<S>& E, const Mat<S>& sim, const Mat<S>& grad_sim) {
  const Eigen::Index n = E.rows();
  Vec<S> inv_norm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S norm = E.row(i).norm();
    if (norm == S(0)) {
      throw DegenerateEmbeddingError("zero-norm embedding at row " + std::to_string(i));
    }
    inv_norm(i) = S(1) / norm;
  }
  Mat<S> unit = inv_norm.asDiagonal() * E;
  Mat<S> sym = grad_sim + grad_sim.transpose();
  sym.diagonal().setZero();  // diagonal is pinned to 1, no gradient flows there
  Vec<S> row_dot = (sym.array() * sim.array()).rowwise().sum().matrix();
  Mat<S> out = sym * unit;
  out -= row_dot.asDiagonal() * unit;
  out = inv_norm.asDiagonal() * out;
  return out;
}

// Margin-based pair mining. A positive survives if some negative of the same
// anchor comes within epsilon of it, and vice versa; with no opposing pairs
// the filter passes everything.
template <class S>
PairMasks mine_pairs(const Mat<S>& sim, const std::vector<int>& labels,
                     const MSLossConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = sim.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw ConfigError("labels length does not match similarity matrix");
  }
  PairMasks masks;
  masks.positive = MaskMat::Zero(n, n);
  masks.negative = MaskMat::Zero(n, n);
  const S eps = static_cast<S>(cfg.epsilon_margin);
  for (Eigen::Index i = 0; i < n; ++i) {
    bool has_pos = false;
    bool has_neg = false;
    S max_neg = std::numeric_limits<S>::lowest();
    S min_pos = std::numeric_limits<S>::max();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) {
        has_pos = true;
        min_pos = std::min(min_pos, sim(i, j));
      } else {
        has_neg = true;
        max_neg = std::max(max_neg, sim(i, j));
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) {
        if (!has_neg || sim(i, j) < max_neg + eps) masks.positive(i, j) = 1;
      } else {
        if (!has_pos || sim(i, j) > min_pos - eps) masks.negative(i, j) = 1;
      }
    }
  }
  return masks;
}

template <class S>
struct LossResult {
  S loss;
  Mat<S> grad;  // dLoss/dS, same shape as the similarity matrix
};

// Loss over fixed mining masks; the gradient likewise treats the masks as
// constants. Log-sum-exp keeps the beta term finite in single precision.
template <class S>
LossResult<S> ms_loss_masked(const Mat<S>& sim, const PairMasks& masks,
                             const MSLossConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = sim.rows();
  if (n < 2) throw ConfigError("loss needs a batch of at least 2 embeddings");
  const S alpha = static_cast<S>(cfg.alpha);
  const S beta = static_cast<S>(cfg.beta);
  const S lambda = static_cast<S>(cfg.lambda);

  LossResult<S> result;
  result.grad = Mat<S>::Zero(n, n);
  S total = S(0);
  std::vector<Eigen::Index> picked;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Positive term: (1/a) * ln(1 + sum_j exp(-a (S_ij - lambda))).
    picked.clear();
    S peak = S(0);  // exponent of the implicit 1
    for (Eigen::Index j = 0; j < n; ++j) {
      if (masks.positive(i, j)) {
        picked.push_back(j);
        peak = std::max(peak, -alpha * (sim(i, j) - lambda));
      }
    }
    if (!picked.empty()) {
      S denom = std::exp(-peak);
      for (Eigen::Index j : picked) denom += std::exp(-alpha * (sim(i, j) - lambda) - peak);
      total += (peak + std::log(denom)) / alpha;
      for (Eigen::Index j : picked) {
        result.grad(i, j) += -std::exp(-alpha * (sim(i, j) - lambda) - peak) / denom;
      }
    }

    // Negative term: (1/b) * ln(1 + sum_j exp(b (S_ij - lambda))).
    picked.clear();
    peak = S(0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (masks.negative(i, j)) {
        picked.push_back(j);
        peak = std::max(peak, beta * (sim(i, j) - lambda));
      }
    }
    if (!picked.empty()) {
      S denom = std::exp(-peak);
      for (Eigen::Index j : picked) denom += std::exp(beta * (sim(i, j) - lambda) - peak);
      total += (peak + std::log(denom)) / beta;
      for (Eigen::Index j : picked) {
        result.grad(i, j) += std::exp(beta * (sim(i, j) - lambda) - peak) / denom;
      }
    }
  }
  result.loss = total / static_cast<S>(n);
  result.grad /= static_cast<S>(n);
  return result;
}

template <class S>
LossResult<S> ms_loss(const Mat<S>& sim, const std::vector<int>& labels,
                      const MSLossConfig& cfg) {
  return ms_loss_masked(sim, mine_pairs(sim, labels, cfg), cfg);
}

}  // namespace retcore
