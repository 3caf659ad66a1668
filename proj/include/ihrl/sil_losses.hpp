#pragma once

// Loss terms of the worker objective. Each term returns its scalar value
// and the gradient with respect to the parameters of the network it
// depends on. Advantages passed into policy terms are constants
// (stop-gradient), as in the actor-critic estimator.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ihrl/mlp.hpp"

namespace ihrl {

template <typename Scalar>
struct TermResult {
  double loss = 0.0;
  typename Mlp<Scalar>::Vector grad;
};

/// Column-wise softmax of a logits matrix (actions x batch).
template <typename Scalar>
typename Mlp<Scalar>::Matrix softmax_columns(const typename Mlp<Scalar>::Matrix& logits) {
  typename Mlp<Scalar>::Matrix probs(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const Scalar m = logits.col(j).maxCoeff();
    auto e = (logits.col(j).array() - m).exp();
    probs.col(j) = e / e.sum();
  }
  return probs;
}

/// -mean_i adv_i * log pi(a_i|s_i)
template <typename Scalar>
TermResult<Scalar> policy_gradient_term(const Mlp<Scalar>& policy,
                                        const typename Mlp<Scalar>::Matrix& obs,
                                        std::span<const int> actions,
                                        std::span<const double> advantages) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const Eigen::Index batch = obs.cols();
  if (batch == 0) throw UsageError("empty batch");
  if (Eigen::Index(actions.size()) != batch || Eigen::Index(advantages.size()) != batch)
    throw UsageError("policy term: batch size mismatch");
  typename Mlp<Scalar>::Cache cache;
  const Matrix logits = policy.forward(obs, cache);
  const Matrix probs = softmax_columns<Scalar>(logits);
  Matrix d_logits = Matrix::Zero(logits.rows(), batch);
  double loss = 0.0;
  const double inv_b = 1.0 / double(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    const double adv = advantages[static_cast<std::size_t>(i)];
    loss -= adv * std::log(std::max<double>(probs(a, i), 1e-300)) * inv_b;
    // d(-adv log p_a)/dz = -adv (onehot_a - p)
    d_logits.col(i) = probs.col(i) * Scalar(adv * inv_b);
    d_logits(a, i) -= Scalar(adv * inv_b);
  }
  return {loss, policy.backward(cache, d_logits)};
}

/// -coef * mean_i H(pi(.|s_i)); minimizing it raises entropy.
template <typename Scalar>
TermResult<Scalar> entropy_term(const Mlp<Scalar>& policy, const typename Mlp<Scalar>::Matrix& obs,
                                double coef) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const Eigen::Index batch = obs.cols();
  if (batch == 0) throw UsageError("empty batch");
  typename Mlp<Scalar>::Cache cache;
  const Matrix logits = policy.forward(obs, cache);
  const Matrix probs = softmax_columns<Scalar>(logits);
  Matrix d_logits(logits.rows(), batch);
  double loss = 0.0;
  const double inv_b = 1.0 / double(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    double h = 0.0;
    for (Eigen::Index a = 0; a < probs.rows(); ++a) {
      const double p = probs(a, i);
      if (p > 0) h -= p * std::log(p);
    }
    loss -= coef * h * inv_b;
    for (Eigen::Index a = 0; a < probs.rows(); ++a) {
      const double p = probs(a, i);
      const double logp = std::log(std::max(p, 1e-300));
      // dH/dz_a = -p_a (log p_a + H)
      d_logits(a, i) = Scalar(coef * inv_b * p * (logp + h));
    }
  }
  return {loss, policy.backward(cache, d_logits)};
}

/// coef * mean_i w_i * 0.5 * e_i^2 with e_i = target_i - V(s_i), or its
/// positive part when `clip_positive` (self-imitation value loss).
template <typename Scalar>
TermResult<Scalar> value_term(const Mlp<Scalar>& value, const typename Mlp<Scalar>::Matrix& obs,
                              std::span<const double> targets, std::span<const double> weights,
                              bool clip_positive, double coef) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const Eigen::Index batch = obs.cols();
  if (batch == 0) throw UsageError("empty batch");
  if (Eigen::Index(targets.size()) != batch) throw UsageError("value term: batch size mismatch");
  if (!weights.empty() && Eigen::Index(weights.size()) != batch)
    throw UsageError("value term: weight count mismatch");
  typename Mlp<Scalar>::Cache cache;
  const Matrix v = value.forward(obs, cache);
  Matrix d_v(1, batch);
  double loss = 0.0;
  const double inv_b = 1.0 / double(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    double e = targets[static_cast<std::size_t>(i)] - double(v(0, i));
    if (clip_positive) e = std::max(e, 0.0);
    loss += coef * w * 0.5 * e * e * inv_b;
    d_v(0, i) = Scalar(-coef * w * e * inv_b);
  }
  return {loss, value.backward(cache, d_v)};
}

/// Clipped advantages (R - V(s))_+ for a batch.
template <typename Scalar>
std::vector<double> clipped_advantages(const Mlp<Scalar>& value,
                                       const typename Mlp<Scalar>::Matrix& obs,
                                       std::span<const double> returns) {
  const auto v = value.forward(obs);
  std::vector<double> out(returns.size());
  for (std::size_t i = 0; i < returns.size(); ++i)
    out[i] = std::max(returns[i] - double(v(0, Eigen::Index(i))), 0.0);
  return out;
}

/// Self-imitation loss on a replayed batch: policy part weights log-probs by
/// w_i (R_i - V(s_i))_+, value part is value_weight * w_i * 0.5 (R_i - V)_+^2.
template <typename Scalar>
struct SilLossResult {
  TermResult<Scalar> policy;
  TermResult<Scalar> value;
  std::vector<double> clipped;  // (R - V)_+ per sample, for priority updates
};

template <typename Scalar>
SilLossResult<Scalar> sil_loss(const Mlp<Scalar>& policy, const Mlp<Scalar>& value,
                               const typename Mlp<Scalar>::Matrix& obs, std::span<const int> actions,
                               std::span<const double> returns, std::span<const double> weights,
                               double policy_weight, double value_weight) {
  if (obs.cols() == 0) throw UsageError("empty batch");
  SilLossResult<Scalar> out;
  out.clipped = clipped_advantages(value, obs, returns);
  std::vector<double> adv(out.clipped.size());
  for (std::size_t i = 0; i < adv.size(); ++i)
    adv[i] = policy_weight * out.clipped[i] * (weights.empty() ? 1.0 : weights[i]);
  out.policy = policy_gradient_term(policy, obs, actions, adv);
  out.value = value_term(value, obs, returns, weights, true, value_weight);
  return out;
}

}  // namespace ihrl
