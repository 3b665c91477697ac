#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

#include "aif/mlp.hpp"
#include "aif/rng.hpp"

namespace aif {

// Loss with analytic gradients: returns the scalar loss and, when grads is
// non-null, fills parameter gradients. Must be deterministic in params.
using LossGradFn = std::function<double(const MlpParams&, MlpGrads* grads)>;

namespace detail {

inline double* param_coord(MlpParams& p, std::size_t flat) {
  for (auto& l : p.layers) {
    if (flat < l.weight.data.size()) return &l.weight.data[flat];
    flat -= l.weight.data.size();
    if (flat < l.bias.size()) return &l.bias[flat];
    flat -= l.bias.size();
  }
  return nullptr;
}

inline double grad_coord(const MlpGrads& g, std::size_t flat) {
  for (const auto& l : g) {
    if (flat < l.weight.data.size()) return l.weight.data[flat];
    flat -= l.weight.data.size();
    if (flat < l.bias.size()) return l.bias[flat];
    flat -= l.bias.size();
  }
  return 0.0;
}

}  // namespace detail

// Central finite differences (h = 1e-5) against the analytic gradient on
// `probes` randomly chosen coordinates. Returns the max relative error with
// denominator max(|analytic|, |numeric|, 1e-8).
inline double gradient_check(const LossGradFn& fn, MlpParams params,
                             int probes, Rng& rng) {
  constexpr double h = 1e-5;
  MlpGrads analytic;
  fn(params, &analytic);

  const std::size_t n_params = params.param_count();
  double max_rel = 0.0;
  for (int probe = 0; probe < probes; ++probe) {
    const std::size_t flat = std::size_t(rng.next_index(int(n_params)));
    double* coord = detail::param_coord(params, flat);
    const double saved = *coord;

    *coord = saved + h;
    const double lp = fn(params, nullptr);
    *coord = saved - h;
    const double lm = fn(params, nullptr);
    *coord = saved;

    const double numeric = (lp - lm) / (2.0 * h);
    const double a = detail::grad_coord(analytic, flat);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, std::abs(a - numeric) / denom);
  }
  return max_rel;
}

}  // namespace aif
