#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lasagne {

// Negative log-likelihood of the gold index under a probability vector.
// The probability is clamped at 1e-12 so log never sees zero.
inline double nll(std::span<const double> distribution, std::size_t gold_index) {
  if (gold_index >= distribution.size())
    throw std::out_of_range("gold index " + std::to_string(gold_index) +
                            " out of range for distribution of size " +
                            std::to_string(distribution.size()));
  double sum = 0.0;
  for (double p : distribution) {
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument("distribution entries must be finite and non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("distribution sums to " + std::to_string(sum) + ", not 1");

  const double p = std::max(distribution[gold_index], 1e-12);
  return -std::log(p);
}

// Graph-scoring loss: NLL summed over the decoder steps that emit a type or
// predicate token; all other steps are masked out.
inline double masked_nll_g(const std::vector<std::vector<double>>& distributions,
                           const std::vector<std::size_t>& gold_indices,
                           const std::vector<std::string>& decoder_tokens) {
  if (distributions.size() != gold_indices.size() ||
      distributions.size() != decoder_tokens.size())
    throw std::invalid_argument("distributions, gold indices and decoder tokens must align");

  double total = 0.0;
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    if (decoder_tokens[i] != "type" && decoder_tokens[i] != "predicate") continue;
    total += nll(distributions[i], gold_indices[i]);
  }
  return total;
}

// The four task losses (decoder, entity detection, filtering/permutation,
// graph scoring) plus their learned log-variances.
struct LossBundle {
  double decoder_loss = 0.0;
  double detection_loss = 0.0;
  double filtering_loss = 0.0;
  double graph_loss = 0.0;
  std::array<double, 4> log_stds{};  // s_i; weight of task i is exp(-s_i)

  std::array<double, 4> losses() const {
    return {decoder_loss, detection_loss, filtering_loss, graph_loss};
  }
};

namespace detail {

inline void validate_bundle(const LossBundle& bundle) {
  for (double l : bundle.losses())
    if (!std::isfinite(l) || l < 0.0)
      throw std::invalid_argument("task losses must be finite and non-negative");
  for (double s : bundle.log_stds)
    if (!std::isfinite(s)) throw std::invalid_argument("log-stds must be finite");
}

}  // namespace detail

// Uncertainty-weighted total: sum_i exp(-s_i) * L_i + s_i. With all s_i = 0
// this is the plain sum of the four losses.
inline double multitask_loss(const LossBundle& bundle) {
  detail::validate_bundle(bundle);
  const auto losses = bundle.losses();
  double total = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i)
    total += std::exp(-bundle.log_stds[i]) * losses[i] + bundle.log_stds[i];
  return total;
}

// Effective task weights exp(-s_i).
inline std::array<double, 4> multitask_weights(const LossBundle& bundle) {
  detail::validate_bundle(bundle);
  std::array<double, 4> weights{};
  for (std::size_t i = 0; i < weights.size(); ++i)
    weights[i] = std::exp(-bundle.log_stds[i]);
  return weights;
}

// d(total)/d(s_i) = 1 - exp(-s_i) * L_i.
inline std::array<double, 4> multitask_loss_grad_log_stds(const LossBundle& bundle) {
  detail::validate_bundle(bundle);
  const auto losses = bundle.losses();
  std::array<double, 4> grads{};
  for (std::size_t i = 0; i < grads.size(); ++i)
    grads[i] = 1.0 - std::exp(-bundle.log_stds[i]) * losses[i];
  return grads;
}

}  // namespace lasagne
