#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "aif/mlp.hpp"
#include "aif/numeric.hpp"

namespace aif {

struct AdamState {
  MlpGrads m;  // first moments
  MlpGrads v;  // second moments
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

inline AdamState make_adam_state(const MlpParams& params) {
  AdamState s;
  s.m = zeros_like(params);
  s.v = zeros_like(params);
  return s;
}

namespace detail {

inline void adam_update_array(double* p, const double* g, double* m, double* v,
                              std::size_t n, const AdamState& s, double lr,
                              double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + s.epsilon);
  }
}

}  // namespace detail

// Standard Adam with bias correction. Non-finite gradients reject the whole
// update before any state is touched.
inline void adam_step(MlpParams& params, const MlpGrads& grads,
                      AdamState& state, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be > 0");
  if (grads.size() != params.layers.size() ||
      state.m.size() != params.layers.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  for (std::size_t li = 0; li < grads.size(); ++li) {
    if (!grads[li].weight.same_shape(params.layers[li].weight) ||
        grads[li].bias.size() != params.layers[li].bias.size()) {
      throw std::invalid_argument("adam_step: shape mismatch");
    }
    if (!all_finite(grads[li].weight) || !all_finite(grads[li].bias)) {
      throw NumericsError("adam_step: non-finite gradient, update rejected");
    }
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
  for (std::size_t li = 0; li < grads.size(); ++li) {
    Layer& l = params.layers[li];
    detail::adam_update_array(l.weight.data.data(),
                              grads[li].weight.data.data(),
                              state.m[li].weight.data.data(),
                              state.v[li].weight.data.data(),
                              l.weight.data.size(), state, lr, bc1, bc2);
    detail::adam_update_array(l.bias.data(), grads[li].bias.data(),
                              state.m[li].bias.data(),
                              state.v[li].bias.data(), l.bias.size(), state,
                              lr, bc1, bc2);
  }
}

}  // namespace aif
