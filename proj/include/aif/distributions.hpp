#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aif/numeric.hpp"

namespace aif {

inline constexpr double kLogVarMin = -6.0;
inline constexpr double kLogVarMax = 2.0;
inline constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)

struct SoftmaxResult {
  Vec probs;
  Vec log_probs;
};

// Stable softmax via max subtraction; log_probs = logits - logsumexp(logits).
inline SoftmaxResult softmax_with_log(const Vec& logits) {
  require_finite(logits, "softmax logits");
  const double mx = *std::max_element(logits.begin(), logits.end());
  SoftmaxResult r;
  r.probs.resize(logits.size());
  r.log_probs.resize(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.probs[i] = std::exp(logits[i] - mx);
    sum += r.probs[i];
  }
  const double logsum = mx + std::log(sum);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.probs[i] /= sum;
    r.log_probs[i] = logits[i] - logsum;
  }
  return r;
}

// H = -sum p log p in nats, with 0 log 0 := 0.
inline double categorical_entropy(const Vec& probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument("categorical_entropy: negative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-8) {
    throw std::invalid_argument("categorical_entropy: probabilities must sum to 1");
  }
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// Diagonal Gaussian as mean + per-dimension log-variance. Log-variances are
// clamped to [-6, 2] at construction to keep densities non-degenerate.
struct DiagGaussian {
  Vec mean;
  Vec log_var;

  DiagGaussian() = default;
  DiagGaussian(Vec mu, Vec lv) : mean(std::move(mu)), log_var(std::move(lv)) {
    if (mean.size() != log_var.size()) {
      throw std::invalid_argument("DiagGaussian: mean/log_var dim mismatch");
    }
    for (double& v : log_var) v = std::clamp(v, kLogVarMin, kLogVarMax);
  }

  int dim() const { return int(mean.size()); }
};

inline DiagGaussian isotropic_gaussian(const Vec& mean, double std_dev) {
  return DiagGaussian(mean, Vec(mean.size(), 2.0 * std::log(std_dev)));
}

// KL(p || q), closed form, summed over dimensions. The variance ratio is
// computed as exp(lv_p - lv_q) so identical inputs give exactly zero.
inline double diag_gaussian_kl(const DiagGaussian& p, const DiagGaussian& q) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("diag_gaussian_kl: dim mismatch");
  }
  double kl = 0.0;
  for (int d = 0; d < p.dim(); ++d) {
    const double dm = p.mean[d] - q.mean[d];
    kl += 0.5 * (q.log_var[d] - p.log_var[d] +
                 std::exp(p.log_var[d] - q.log_var[d]) +
                 dm * dm * std::exp(-q.log_var[d]) - 1.0);
  }
  return kl;
}

inline double diag_gaussian_logpdf(const Vec& x, const DiagGaussian& g) {
  if (int(x.size()) != g.dim()) {
    throw std::invalid_argument("diag_gaussian_logpdf: dim mismatch");
  }
  double lp = 0.0;
  for (int d = 0; d < g.dim(); ++d) {
    const double dm = x[d] - g.mean[d];
    lp += -0.5 * (kLog2Pi + g.log_var[d] + dm * dm * std::exp(-g.log_var[d]));
  }
  return lp;
}

}  // namespace aif
