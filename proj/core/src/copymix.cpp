#include "gecforge/copymix.hpp"

#include <algorithm>
#include <cmath>

#include "gecforge/error.hpp"
#include "gecforge/rng.hpp"

namespace gecforge {

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& x : z) {
    x = std::exp(x - m);
    sum += x;
  }
  for (double& x : z) x /= sum;
}

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void CopyMixInputs::validate() const {
  if (hidden <= 0 || vocab <= 0 || source_len <= 0) {
    throw ValidationError("copymix dimensions must be positive");
  }
  const auto d = static_cast<std::size_t>(hidden);
  if (enc_states.size() != d * static_cast<std::size_t>(source_len) ||
      dec_state.size() != d ||
      gen_weight.size() != d * static_cast<std::size_t>(vocab) ||
      alpha_weight.size() != d ||
      source_ids.size() != static_cast<std::size_t>(source_len)) {
    throw ValidationError("copymix input sizes do not match dimensions");
  }
  for (int id : source_ids) {
    if (id < 0 || id >= vocab) {
      throw ValidationError("copymix source id out of vocabulary range");
    }
  }
}

CopyMixInputs CopyMixInputs::random(std::uint64_t seed, int hidden, int vocab,
                                    int source_len) {
  SplitRng rng(seed);
  const auto uniform = [&] { return 2.0 * rng.next_double() - 1.0; };

  CopyMixInputs in;
  in.hidden = hidden;
  in.vocab = vocab;
  in.source_len = source_len;
  in.enc_states.resize(static_cast<std::size_t>(hidden) *
                       static_cast<std::size_t>(source_len));
  in.dec_state.resize(static_cast<std::size_t>(hidden));
  in.gen_weight.resize(static_cast<std::size_t>(hidden) *
                       static_cast<std::size_t>(vocab));
  in.alpha_weight.resize(static_cast<std::size_t>(hidden));
  in.source_ids.resize(static_cast<std::size_t>(source_len));

  for (double& x : in.enc_states) x = uniform();
  for (double& x : in.dec_state) x = uniform();
  for (double& x : in.gen_weight) x = uniform();
  for (double& x : in.alpha_weight) x = uniform();
  for (int& id : in.source_ids) {
    id = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(vocab)));
  }
  in.validate();
  return in;
}

CopyMixForward copymix_forward(const CopyMixInputs& in) {
  in.validate();
  const int d = in.hidden;
  const int V = in.vocab;
  const int T = in.source_len;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  CopyMixForward fwd;

  fwd.attention.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    fwd.attention[static_cast<std::size_t>(t)] =
        scale * dot(in.dec_state.data(), in.enc_states.data() + t * d, d);
  }
  softmax_inplace(fwd.attention);

  fwd.attended.assign(static_cast<std::size_t>(d), 0.0);
  for (int t = 0; t < T; ++t) {
    const double s = fwd.attention[static_cast<std::size_t>(t)];
    const double* col = in.enc_states.data() + t * d;
    for (int i = 0; i < d; ++i) fwd.attended[static_cast<std::size_t>(i)] += s * col[i];
  }

  fwd.alpha =
      1.0 / (1.0 + std::exp(-dot(in.alpha_weight.data(), fwd.attended.data(), d)));

  fwd.gen_probs.resize(static_cast<std::size_t>(V));
  for (int w = 0; w < V; ++w) {
    fwd.gen_probs[static_cast<std::size_t>(w)] =
        dot(in.gen_weight.data() + w * d, in.dec_state.data(), d);
  }
  softmax_inplace(fwd.gen_probs);

  fwd.copy_probs.assign(static_cast<std::size_t>(V), 0.0);
  for (int t = 0; t < T; ++t) {
    fwd.copy_probs[static_cast<std::size_t>(in.source_ids[static_cast<std::size_t>(t)])] +=
        fwd.attention[static_cast<std::size_t>(t)];
  }

  fwd.probs.resize(static_cast<std::size_t>(V));
  for (int w = 0; w < V; ++w) {
    fwd.probs[static_cast<std::size_t>(w)] =
        (1.0 - fwd.alpha) * fwd.gen_probs[static_cast<std::size_t>(w)] +
        fwd.alpha * fwd.copy_probs[static_cast<std::size_t>(w)];
  }
  return fwd;
}

double copymix_loss(const CopyMixInputs& in, int target) {
  if (target < 0 || target >= in.vocab) {
    throw ValidationError("copymix target out of vocabulary range");
  }
  const CopyMixForward fwd = copymix_forward(in);
  return -std::log(fwd.probs[static_cast<std::size_t>(target)]);
}

CopyMixGradients copymix_backward(const CopyMixInputs& in, int target) {
  if (target < 0 || target >= in.vocab) {
    throw ValidationError("copymix target out of vocabulary range");
  }
  const CopyMixForward fwd = copymix_forward(in);
  const int d = in.hidden;
  const int V = in.vocab;
  const int T = in.source_len;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const auto st = static_cast<std::size_t>(target);

  CopyMixGradients grad;
  grad.dec_state.assign(static_cast<std::size_t>(d), 0.0);
  grad.gen_weight.assign(static_cast<std::size_t>(V) * static_cast<std::size_t>(d), 0.0);
  grad.alpha_weight.assign(static_cast<std::size_t>(d), 0.0);

  // L = -log p_target, p = (1 - alpha) gen + alpha copy. Only the target
  // component of dL/dp is nonzero.
  const double inv_p = 1.0 / fwd.probs[st];
  const double dgen_target = -(1.0 - fwd.alpha) * inv_p;
  const double dcopy_target = -fwd.alpha * inv_p;
  const double dalpha = -inv_p * (fwd.copy_probs[st] - fwd.gen_probs[st]);

  // Generator softmax: dlogit_w = gen_w * (dgen_w - sum_u dgen_u gen_u)
  // with dgen a one-hot times dgen_target.
  const double gen_inner = dgen_target * fwd.gen_probs[st];
  for (int w = 0; w < V; ++w) {
    const auto sw = static_cast<std::size_t>(w);
    const double dlogit =
        fwd.gen_probs[sw] * ((w == target ? dgen_target : 0.0) - gen_inner);
    const double* row = in.gen_weight.data() + w * d;
    double* grow = grad.gen_weight.data() + w * d;
    for (int i = 0; i < d; ++i) {
      grow[i] += dlogit * in.dec_state[static_cast<std::size_t>(i)];
      grad.dec_state[static_cast<std::size_t>(i)] += dlogit * row[i];
    }
  }

  // Gate: alpha = sigmoid(w_a . o).
  const double dpre = dalpha * fwd.alpha * (1.0 - fwd.alpha);
  std::vector<double> dattended(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    grad.alpha_weight[static_cast<std::size_t>(i)] =
        dpre * fwd.attended[static_cast<std::size_t>(i)];
    dattended[static_cast<std::size_t>(i)] =
        dpre * in.alpha_weight[static_cast<std::size_t>(i)];
  }

  // Attention grads arrive on two paths: the copy scatter and o = H s.
  std::vector<double> dattn(static_cast<std::size_t>(T), 0.0);
  for (int t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    if (in.source_ids[ts] == target) dattn[ts] += dcopy_target;
    dattn[ts] += dot(in.enc_states.data() + t * d, dattended.data(), d);
  }

  // Attention softmax, then z_t = dec_state . enc_t * scale.
  double attn_inner = 0.0;
  for (int t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    attn_inner += dattn[ts] * fwd.attention[ts];
  }
  for (int t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const double dz = fwd.attention[ts] * (dattn[ts] - attn_inner);
    const double* col = in.enc_states.data() + t * d;
    for (int i = 0; i < d; ++i) {
      grad.dec_state[static_cast<std::size_t>(i)] += dz * scale * col[i];
    }
  }

  return grad;
}

GradCheckReport copymix_grad_check(const CopyMixInputs& in, int target,
                                   double step) {
  const CopyMixGradients analytic = copymix_backward(in, target);
  CopyMixInputs probe = in;

  GradCheckReport report;
  const auto check_block = [&](std::vector<double>& block,
                               const std::vector<double>& grads) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double saved = block[i];
      block[i] = saved + step;
      const double up = copymix_loss(probe, target);
      block[i] = saved - step;
      const double down = copymix_loss(probe, target);
      block[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double abs_err = std::abs(numeric - grads[i]);
      const double rel_err =
          abs_err / std::max({std::abs(numeric), std::abs(grads[i]), 1e-8});
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      report.max_rel_error = std::max(report.max_rel_error, rel_err);
      ++report.checked;
    }
  };

  check_block(probe.dec_state, analytic.dec_state);
  check_block(probe.gen_weight, analytic.gen_weight);
  check_block(probe.alpha_weight, analytic.alpha_weight);
  return report;
}

}  // namespace gecforge
