#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gecforge {

// Inputs to one decoding step of a copy-augmented output layer. Plain
// vectors with explicit dimensions; enc_states stores source position t at
// [t*hidden, (t+1)*hidden), gen_weight stores vocabulary row w at
// [w*hidden, (w+1)*hidden).
struct CopyMixInputs {
  int hidden = 0;      // d
  int vocab = 0;       // V
  int source_len = 0;  // T
  std::vector<double> enc_states;    // d * T
  std::vector<double> dec_state;     // d
  std::vector<double> gen_weight;    // V * d
  std::vector<double> alpha_weight;  // d
  std::vector<int> source_ids;       // T, values in [0, V)

  void validate() const;

  // Reproducible random instance: weights and states uniform in [-1, 1),
  // source ids uniform over the vocabulary.
  static CopyMixInputs random(std::uint64_t seed, int hidden, int vocab,
                              int source_len);
};

// Forward pass:
//   z_t   = dec_state . enc_state_t / sqrt(d)      scaled dot attention
//   s     = softmax(z)
//   o     = sum_t s_t * enc_state_t                attended encoder state
//   alpha = sigmoid(alpha_weight . o)              copy gate
//   gen   = softmax(gen_weight . dec_state)
//   copy_w = sum of s_t over positions with source_ids[t] == w
//   p     = (1 - alpha) * gen + alpha * copy
// Both softmaxes subtract their max before exponentiating. p sums to one by
// construction; every generator event keeps positive probability.
struct CopyMixForward {
  std::vector<double> attention;  // T
  std::vector<double> attended;   // d
  double alpha = 0.0;
  std::vector<double> gen_probs;   // V
  std::vector<double> copy_probs;  // V
  std::vector<double> probs;       // V
};

CopyMixForward copymix_forward(const CopyMixInputs& in);

// Negative log likelihood of one target id under the mixture.
double copymix_loss(const CopyMixInputs& in, int target);

// Analytic gradients of copymix_loss with respect to the trainable blocks.
struct CopyMixGradients {
  std::vector<double> dec_state;     // d
  std::vector<double> gen_weight;    // V * d
  std::vector<double> alpha_weight;  // d
};

CopyMixGradients copymix_backward(const CopyMixInputs& in, int target);

// Central-difference verification of copymix_backward over every component
// of the three gradient blocks. Relative error uses
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
};

GradCheckReport copymix_grad_check(const CopyMixInputs& in, int target,
                                   double step = 1e-5);

}  // namespace gecforge
