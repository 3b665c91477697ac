#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aif/numeric.hpp"
#include "aif/rng.hpp"

namespace aif {

enum class Activation { Relu, Identity };

// One dense layer: y = act(W x + b) with W stored out-by-in.
struct Layer {
  Matrix weight;
  Vec bias;
  Activation act = Activation::Identity;

  int in_dim() const { return weight.cols; }
  int out_dim() const { return weight.rows; }
};

struct MlpParams {
  std::vector<Layer> layers;

  int input_dim() const { return layers.front().in_dim(); }
  int output_dim() const { return layers.back().out_dim(); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.data.size() + l.bias.size();
    return n;
  }

  // Adjacent dims must chain and the final layer must be identity; heads
  // apply softmax or Gaussian parameterization on top of raw outputs.
  void validate() const {
    if (layers.empty()) throw std::invalid_argument("mlp: no layers");
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
      if (layers[i].out_dim() != layers[i + 1].in_dim()) {
        throw std::invalid_argument("mlp: layer dimensions do not chain");
      }
    }
    if (layers.back().act != Activation::Identity) {
      throw std::invalid_argument("mlp: final layer must be identity");
    }
  }
};

// Gradients and optimizer moments share the parameter shapes.
struct LayerTensors {
  Matrix weight;
  Vec bias;
};
using MlpGrads = std::vector<LayerTensors>;

inline MlpGrads zeros_like(const MlpParams& params) {
  MlpGrads g;
  g.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    g.push_back({Matrix(l.out_dim(), l.in_dim()), Vec(l.out_dim(), 0.0)});
  }
  return g;
}

// Weights uniform in +-1/sqrt(fan_in), biases zero, relu on hidden layers.
inline MlpParams make_mlp(int in_dim, const std::vector<int>& hidden,
                          int out_dim, Rng& rng) {
  std::vector<int> dims;
  dims.push_back(in_dim);
  for (int h : hidden) dims.push_back(h);
  dims.push_back(out_dim);

  MlpParams params;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer l;
    l.weight = Matrix(dims[i + 1], dims[i]);
    l.bias = Vec(dims[i + 1], 0.0);
    l.act = (i + 2 == dims.size()) ? Activation::Identity : Activation::Relu;
    const double bound = 1.0 / std::sqrt(double(dims[i]));
    for (double& w : l.weight.data) w = rng.next_uniform(-bound, bound);
    params.layers.push_back(std::move(l));
  }
  params.validate();
  return params;
}

// Post-activations of every layer from a forward pass; enough for exact
// backprop (the relu mask is post > 0). input is the batch that produced it.
struct ForwardCache {
  Matrix input;
  std::vector<Matrix> post;
};

namespace detail {

// y[B x out] = x[B x in] * W^T + b. W is out-by-in, so transpose once into a
// scratch buffer and accumulate along rows.
inline void linear_forward(const Layer& l, const Matrix& x, Matrix& y) {
  const int in = l.in_dim(), out = l.out_dim(), batch = x.rows;
  thread_local Vec wt;
  wt.resize(std::size_t(in) * out);
  for (int o = 0; o < out; ++o) {
    for (int i = 0; i < in; ++i) wt[std::size_t(i) * out + o] = l.weight(o, i);
  }
  y.rows = batch;
  y.cols = out;
  y.data.resize(std::size_t(batch) * out);
  for (int r = 0; r < batch; ++r) {
    double* yrow = y.row(r);
    for (int o = 0; o < out; ++o) yrow[o] = l.bias[o];
  }
  gemm_accum(x.data.data(), wt.data(), y.data.data(), batch, in, out);
}

}  // namespace detail

// Batched forward pass; rows are samples. Dimension mismatch is a
// configuration error, non-finite output is a numerics error.
inline Matrix mlp_forward(const MlpParams& params, const Matrix& input,
                          ForwardCache* cache = nullptr) {
  if (input.cols != params.input_dim()) {
    throw std::invalid_argument("mlp_forward: input dim mismatch");
  }
  if (cache) {
    cache->input = input;
    cache->post.clear();
  }
  const Matrix* cur = &input;
  Matrix buf_a, buf_b;
  for (std::size_t li = 0; li < params.layers.size(); ++li) {
    const Layer& l = params.layers[li];
    Matrix& y = (li % 2 == 0) ? buf_a : buf_b;
    detail::linear_forward(l, *cur, y);
    if (l.act == Activation::Relu) {
      for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    }
    if (cache) {
      cache->post.push_back(std::move(y));
      cur = &cache->post.back();
    } else {
      cur = &y;
    }
  }
  Matrix out = std::move(cache ? cache->post.back() : *const_cast<Matrix*>(cur));
  if (cache) cache->post.back() = out;  // keep the cache complete
  require_finite(out, "mlp_forward output");
  return out;
}

inline Vec mlp_forward(const MlpParams& params, const Vec& input) {
  Matrix x(1, int(input.size()));
  x.data = input;
  return mlp_forward(params, x).data;
}

// Exact gradients for a scalar loss whose gradient w.r.t. the network output
// is grad_output. grad_input, when requested, receives dL/d(input).
inline MlpGrads mlp_backward(const MlpParams& params, const ForwardCache& cache,
                             const Matrix& grad_output,
                             Matrix* grad_input = nullptr) {
  const int n_layers = int(params.layers.size());
  if (int(cache.pre.size()) != n_layers ||
      !grad_output.same_shape(cache.pre.back())) {
    throw std::logic_error("mlp_backward: cache does not match params");
  }

  MlpGrads grads = zeros_like(params);
  Matrix delta = grad_output;  // dL/d(pre-activation), final layer is identity

  for (int li = n_layers - 1; li >= 0; --li) {
    const Layer& l = params.layers[li];
    const Matrix& x = (li == 0) ? cache.input : cache.post[li - 1];
    const int batch = delta.rows, in = l.in_dim(), out = l.out_dim();

    // dW[o][i] = sum_b delta[b][o] * x[b][i]
    Matrix& dw = grads[li].weight;
    for (int b = 0; b < batch; ++b) {
      const double* drow = delta.row(b);
      const double* xrow = x.row(b);
      for (int o = 0; o < out; ++o) {
        const double dv = drow[o];
        double* dwrow = dw.row(o);
        for (int i = 0; i < in; ++i) dwrow[i] += dv * xrow[i];
      }
    }
    Vec& db = grads[li].bias;
    for (int b = 0; b < batch; ++b) {
      const double* drow = delta.row(b);
      for (int o = 0; o < out; ++o) db[o] += drow[o];
    }

    if (li == 0 && !grad_input) break;

    // dx[b][i] = sum_o delta[b][o] * W[o][i]
    Matrix dx(batch, in);
    gemm_accum(delta.data.data(), l.weight.data.data(), dx.data.data(), batch,
               out, in);
    if (li == 0) {
      *grad_input = std::move(dx);
      break;
    }
    // Through the previous layer's relu.
    const Matrix& prev_pre = cache.pre[li - 1];
    if (params.layers[li - 1].act == Activation::Relu) {
      for (std::size_t i = 0; i < dx.data.size(); ++i) {
        if (prev_pre.data[i] <= 0.0) dx.data[i] = 0.0;
      }
    }
    delta = std::move(dx);
  }
  return grads;
}

}  // namespace aif
