// Copyright 2026 The MVAE-AIF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maif/diffnet/network.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "maif/error.h"

namespace maif::diffnet {
namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Geometry of a sliding window over a (channels, height, width) image.
struct Window {
  int channels;
  int height;
  int width;
  int kernel;
  int stride;
  int padding;
  int grid_h;  // number of window positions vertically
  int grid_w;
};

// cols(c*k*k + ky*k + kx, n*grid + gy*grid_w + gx) = image value under the
// window, zero in the padding.
RowMat Im2Col(const double* images, int batch, const Window& w) {
  const int grid = w.grid_h * w.grid_w;
  const int image_size = w.channels * w.height * w.width;
  RowMat cols(w.channels * w.kernel * w.kernel, batch * grid);
  for (int c = 0; c < w.channels; ++c) {
    for (int ky = 0; ky < w.kernel; ++ky) {
      for (int kx = 0; kx < w.kernel; ++kx) {
        double* row = cols.row((c * w.kernel + ky) * w.kernel + kx).data();
        for (int n = 0; n < batch; ++n) {
          const double* image = images + static_cast<std::ptrdiff_t>(n) * image_size +
                                c * w.height * w.width;
          double* out = row + static_cast<std::ptrdiff_t>(n) * grid;
          for (int gy = 0; gy < w.grid_h; ++gy) {
            const int iy = gy * w.stride - w.padding + ky;
            if (iy < 0 || iy >= w.height) {
              std::fill(out + gy * w.grid_w, out + (gy + 1) * w.grid_w, 0.0);
              continue;
            }
            for (int gx = 0; gx < w.grid_w; ++gx) {
              const int ix = gx * w.stride - w.padding + kx;
              out[gy * w.grid_w + gx] =
                  (ix >= 0 && ix < w.width) ? image[iy * w.width + ix] : 0.0;
            }
          }
        }
      }
    }
  }
  return cols;
}

// Adjoint of Im2Col: accumulates cols into images.
void Col2Im(const RowMat& cols, int batch, const Window& w, double* images) {
  const int grid = w.grid_h * w.grid_w;
  const int image_size = w.channels * w.height * w.width;
  for (int c = 0; c < w.channels; ++c) {
    for (int ky = 0; ky < w.kernel; ++ky) {
      for (int kx = 0; kx < w.kernel; ++kx) {
        const double* row = cols.row((c * w.kernel + ky) * w.kernel + kx).data();
        for (int n = 0; n < batch; ++n) {
          double* image = images + static_cast<std::ptrdiff_t>(n) * image_size +
                          c * w.height * w.width;
          const double* in = row + static_cast<std::ptrdiff_t>(n) * grid;
          for (int gy = 0; gy < w.grid_h; ++gy) {
            const int iy = gy * w.stride - w.padding + ky;
            if (iy < 0 || iy >= w.height) continue;
            for (int gx = 0; gx < w.grid_w; ++gx) {
              const int ix = gx * w.stride - w.padding + kx;
              if (ix >= 0 && ix < w.width) {
                image[iy * w.width + ix] += in[gy * w.grid_w + gx];
              }
            }
          }
        }
      }
    }
  }
}

// (channels * spatial x batch) sample-major matrix <-> (channels x batch *
// spatial) channel-major matrix.
RowMat ToChannelMajor(const Mat& m, int channels, int spatial) {
  const int batch = static_cast<int>(m.cols());
  RowMat out(channels, static_cast<Eigen::Index>(batch) * spatial);
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < channels; ++c) {
      out.row(c).segment(static_cast<Eigen::Index>(n) * spatial, spatial) =
          m.col(n).segment(static_cast<Eigen::Index>(c) * spatial, spatial).transpose();
    }
  }
  return out;
}

Mat FromChannelMajor(const RowMat& m, int spatial, int batch) {
  const int channels = static_cast<int>(m.rows());
  Mat out(static_cast<Eigen::Index>(channels) * spatial, batch);
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < channels; ++c) {
      out.col(n).segment(static_cast<Eigen::Index>(c) * spatial, spatial) =
          m.row(c).segment(static_cast<Eigen::Index>(n) * spatial, spatial).transpose();
    }
  }
  return out;
}

Eigen::Map<const RowMat> WeightMatrix(const Tensor& w, Eigen::Index rows,
                                      Eigen::Index cols) {
  return Eigen::Map<const RowMat>(w.data().data(), rows, cols);
}

Eigen::Map<RowMat> WeightMatrix(Tensor& w, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<RowMat>(w.data().data(), rows, cols);
}

Eigen::Map<const Vec> BiasVector(const Tensor& b) {
  return Eigen::Map<const Vec>(b.data().data(), static_cast<Eigen::Index>(b.size()));
}

int I(std::size_t v) { return static_cast<int>(v); }

Window ConvWindow(const LayerSpec& spec, const Shape& in, const Shape& out) {
  return {I(in[0]), I(in[1]), I(in[2]), spec.kernel, spec.stride, spec.padding,
          I(out[1]), I(out[2])};
}

// A transposed convolution is the adjoint of a convolution whose image is the
// transposed layer's output and whose window grid is its input.
Window TransposedWindow(const LayerSpec& spec, const Shape& in, const Shape& out) {
  return {I(out[0]), I(out[1]), I(out[2]), spec.kernel, spec.stride, spec.padding,
          I(in[1]), I(in[2])};
}

void ApplyActivation(Activation act, Mat& y) {
  switch (act) {
    case Activation::kIdentity: break;
    case Activation::kRelu: y = y.cwiseMax(0.0); break;
    case Activation::kTanhRelu: y = y.cwiseMax(0.0).array().tanh().matrix(); break;
  }
}

// Multiplies grad by the activation derivative, evaluated from the stored
// post-activation output. A single-column output broadcasts over grad.
void ActivationBackward(Activation act, const Mat& y, Mat& grad) {
  if (act == Activation::kIdentity) return;
  const bool broadcast = y.cols() == 1 && grad.cols() != 1;
  for (Eigen::Index n = 0; n < grad.cols(); ++n) {
    const auto yc = y.col(broadcast ? 0 : n);
    auto g = grad.col(n);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double v = yc[i];
      if (v <= 0.0) {
        g[i] = 0.0;
      } else if (act == Activation::kTanhRelu) {
        g[i] *= 1.0 - v * v;
      }
    }
  }
}

void PoolForward(const LayerSpec& spec, const Shape& in, const Shape& out,
                 const Mat& x, Mat& y, std::vector<int>* argmax) {
  const int c_n = I(in[0]), h = I(in[1]), w = I(in[2]);
  const int ho = I(out[1]), wo = I(out[2]);
  const int k = spec.kernel, s = spec.stride;
  const bool is_max = spec.kind == LayerKind::kMaxPool;
  const Eigen::Index batch = x.cols();
  y.resize(static_cast<Eigen::Index>(c_n) * ho * wo, batch);
  if (is_max && argmax) argmax->assign(static_cast<std::size_t>(y.size()), 0);
  const double inv_area = 1.0 / (k * k);
  for (Eigen::Index n = 0; n < batch; ++n) {
    const double* src = x.col(n).data();
    for (int c = 0; c < c_n; ++c) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          const int out_index = (c * ho + oy) * wo + ox;
          double acc = is_max ? -std::numeric_limits<double>::infinity() : 0.0;
          int best = -1;
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const int idx = (c * h + oy * s + ky) * w + ox * s + kx;
              const double v = src[idx];
              if (is_max) {
                if (best < 0 || v > acc) {
                  acc = v;
                  best = idx;
                }
              } else {
                acc += v;
              }
            }
          }
          y(out_index, n) = is_max ? acc : acc * inv_area;
          if (is_max && argmax) {
            (*argmax)[static_cast<std::size_t>(n * y.rows() + out_index)] = best;
          }
        }
      }
    }
  }
}

void PoolBackward(const LayerSpec& spec, const Shape& in, const Shape& out,
                  const std::vector<int>& argmax, std::size_t tape_batch,
                  const Mat& grad, Mat& dx) {
  const int c_n = I(in[0]), h = I(in[1]), w = I(in[2]);
  const int ho = I(out[1]), wo = I(out[2]);
  const int k = spec.kernel, s = spec.stride;
  dx.setZero(static_cast<Eigen::Index>(c_n) * h * w, grad.cols());
  const Eigen::Index out_size = static_cast<Eigen::Index>(c_n) * ho * wo;
  for (Eigen::Index n = 0; n < grad.cols(); ++n) {
    const Eigen::Index tape_col = tape_batch == 1 ? 0 : n;
    if (spec.kind == LayerKind::kMaxPool) {
      for (Eigen::Index i = 0; i < out_size; ++i) {
        dx(argmax[static_cast<std::size_t>(tape_col * out_size + i)], n) += grad(i, n);
      }
      continue;
    }
    const double inv_area = 1.0 / (k * k);
    for (int c = 0; c < c_n; ++c) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          const double g = grad((c * ho + oy) * wo + ox, n) * inv_area;
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              dx((c * h + oy * s + ky) * w + ox * s + kx, n) += g;
            }
          }
        }
      }
    }
  }
}

void LayerForward(const LayerSpec& spec, const Shape& in, const Shape& out,
                  const LayerParams& params, const Mat& x, Mat& y,
                  std::vector<int>* argmax) {
  const int batch = static_cast<int>(x.cols());
  switch (spec.kind) {
    case LayerKind::kDense: {
      y.noalias() = WeightMatrix(params.weight, spec.out_channels, spec.in_channels) * x;
      y.colwise() += BiasVector(params.bias);
      break;
    }
    case LayerKind::kConv: {
      const Window win = ConvWindow(spec, in, out);
      const int spatial = win.grid_h * win.grid_w;
      const RowMat cols = Im2Col(x.data(), batch, win);
      RowMat ym = WeightMatrix(params.weight, spec.out_channels, cols.rows()) * cols;
      ym.colwise() += BiasVector(params.bias);
      y = FromChannelMajor(ym, spatial, batch);
      break;
    }
    case LayerKind::kTransposedConv: {
      const Window win = TransposedWindow(spec, in, out);
      const int in_spatial = I(in[1] * in[2]);
      const RowMat xm = ToChannelMajor(x, spec.in_channels, in_spatial);
      const RowMat cols =
          WeightMatrix(params.weight, spec.in_channels,
                       static_cast<Eigen::Index>(spec.out_channels) * spec.kernel * spec.kernel)
              .transpose() * xm;
      y.setZero(static_cast<Eigen::Index>(NumElements(out)), batch);
      Col2Im(cols, batch, win, y.data());
      const int out_spatial = I(out[1] * out[2]);
      for (int n = 0; n < batch; ++n) {
        for (int c = 0; c < spec.out_channels; ++c) {
          y.col(n).segment(static_cast<Eigen::Index>(c) * out_spatial, out_spatial).array() +=
              params.bias[static_cast<std::size_t>(c)];
        }
      }
      break;
    }
    case LayerKind::kMaxPool:
    case LayerKind::kAvgPool:
      PoolForward(spec, in, out, x, y, argmax);
      break;
  }
  ApplyActivation(spec.activation, y);
}

// grad enters as d/d(post-activation output) and is turned into
// d/d(pre-activation) in place.
void LayerBackward(const LayerSpec& spec, const Shape& in, const Shape& out,
                   const LayerParams& params, const Mat& x, const Mat& y,
                   const std::vector<int>& argmax, Mat& grad, Mat* dx,
                   LayerParams* dparams) {
  ActivationBackward(spec.activation, y, grad);
  const int batch = static_cast<int>(grad.cols());
  switch (spec.kind) {
    case LayerKind::kDense: {
      const auto w = WeightMatrix(params.weight, spec.out_channels, spec.in_channels);
      if (dparams) {
        WeightMatrix(dparams->weight, spec.out_channels, spec.in_channels).noalias() +=
            grad * x.transpose();
        Eigen::Map<Vec>(dparams->bias.data().data(), spec.out_channels) +=
            grad.rowwise().sum();
      }
      if (dx) dx->noalias() = w.transpose() * grad;
      break;
    }
    case LayerKind::kConv: {
      const Window win = ConvWindow(spec, in, out);
      const int spatial = win.grid_h * win.grid_w;
      const RowMat gm = ToChannelMajor(grad, spec.out_channels, spatial);
      const Eigen::Index patch = static_cast<Eigen::Index>(spec.in_channels) *
                                 spec.kernel * spec.kernel;
      if (dparams) {
        const RowMat cols = Im2Col(x.data(), batch, win);
        WeightMatrix(dparams->weight, spec.out_channels, patch).noalias() +=
            gm * cols.transpose();
        Eigen::Map<Vec>(dparams->bias.data().data(), spec.out_channels) +=
            gm.rowwise().sum();
      }
      if (dx) {
        const RowMat dcols =
            WeightMatrix(params.weight, spec.out_channels, patch).transpose() * gm;
        dx->setZero(static_cast<Eigen::Index>(NumElements(in)), batch);
        Col2Im(dcols, batch, win, dx->data());
      }
      break;
    }
    case LayerKind::kTransposedConv: {
      const Window win = TransposedWindow(spec, in, out);
      const Eigen::Index patch = static_cast<Eigen::Index>(spec.out_channels) *
                                 spec.kernel * spec.kernel;
      const RowMat dcols = Im2Col(grad.data(), batch, win);
      const int in_spatial = I(in[1] * in[2]);
      if (dparams) {
        const RowMat xm = ToChannelMajor(x, spec.in_channels, in_spatial);
        WeightMatrix(dparams->weight, spec.in_channels, patch).noalias() +=
            xm * dcols.transpose();
        const int out_spatial = I(out[1] * out[2]);
        for (int n = 0; n < batch; ++n) {
          for (int c = 0; c < spec.out_channels; ++c) {
            dparams->bias[static_cast<std::size_t>(c)] +=
                grad.col(n).segment(static_cast<Eigen::Index>(c) * out_spatial, out_spatial).sum();
          }
        }
      }
      if (dx) {
        const RowMat dxm = WeightMatrix(params.weight, spec.in_channels, patch) * dcols;
        *dx = FromChannelMajor(dxm, in_spatial, batch);
      }
      break;
    }
    case LayerKind::kMaxPool:
    case LayerKind::kAvgPool:
      if (dx) PoolBackward(spec, in, out, argmax, static_cast<std::size_t>(y.cols()), grad, *dx);
      break;
  }
}

}  // namespace

Network::Network(Shape input_shape, std::vector<LayerSpec> layers)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
  if (input_shape_.empty() || NumElements(input_shape_) == 0) {
    throw ShapeError("network input shape must be non-empty");
  }
  if (layers_.empty()) throw ShapeError("network needs at least one layer");
  shapes_.push_back(input_shape_);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& spec = layers_[i];
    if (spec.activation == Activation::kTanhRelu && i + 1 != layers_.size()) {
      throw ShapeError("tanh-relu activation is only allowed on the last layer");
    }
    shapes_.push_back(InferOutputShape(spec, shapes_.back()));
    LayerParams p;
    if (HasParameters(spec)) {
      p.weight = Tensor(WeightShape(spec));
      p.bias = Tensor(BiasShape(spec));
    }
    params_.push_back(std::move(p));
  }
}

std::size_t Network::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.weight.size() + p.bias.size();
  return n;
}

ParamSet Network::ZeroParams() const {
  ParamSet zeros;
  zeros.reserve(params_.size());
  for (const auto& p : params_) {
    LayerParams z;
    if (!p.weight.empty()) z.weight = Tensor(p.weight.shape());
    if (!p.bias.empty()) z.bias = Tensor(p.bias.shape());
    zeros.push_back(std::move(z));
  }
  return zeros;
}

void Network::Initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& spec = layers_[i];
    if (!HasParameters(spec)) continue;
    double fan_in = spec.in_channels;
    if (spec.kind == LayerKind::kConv) {
      fan_in *= spec.kernel * spec.kernel;
    } else if (spec.kind == LayerKind::kTransposedConv) {
      fan_in *= std::max(1.0, static_cast<double>(spec.kernel * spec.kernel) /
                                  (spec.stride * spec.stride));
    }
    const double gain = spec.activation == Activation::kIdentity ? 3.0 : 6.0;
    std::uniform_real_distribution<double> dist(-std::sqrt(gain / fan_in),
                                                std::sqrt(gain / fan_in));
    for (double& w : params_[i].weight.data()) w = dist(rng);
    std::fill(params_[i].bias.data().begin(), params_[i].bias.data().end(), 0.0);
  }
}

Network::BatchView Network::CheckInput(const Tensor& x) const {
  if (x.shape() == input_shape_) return {false, 1};
  if (x.shape().size() == input_shape_.size() + 1 &&
      std::equal(input_shape_.begin(), input_shape_.end(), x.shape().begin() + 1)) {
    return {true, x.shape()[0]};
  }
  throw ShapeError("network expects input " + ToString(input_shape_) +
                   " (optionally batched), got " + ToString(x.shape()));
}

Eigen::MatrixXd Network::RunForward(const Tensor& x, GradTape* tape) const {
  const BatchView view = CheckInput(x);
  if (!x.AllFinite()) throw NumericError("non-finite network input");
  const auto features = static_cast<Eigen::Index>(NumElements(input_shape_));
  Mat current = Eigen::Map<const Mat>(x.data().data(), features,
                                      static_cast<Eigen::Index>(view.batch));
  if (tape) {
    tape->owner_ = this;
    tape->batched_ = view.batched;
    tape->batch_ = view.batch;
    tape->consumed_ = false;
    tape->activations_.clear();
    tape->activations_.reserve(layers_.size() + 1);
    tape->argmax_.assign(layers_.size(), {});
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Mat next;
    LayerForward(layers_[i], shapes_[i], shapes_[i + 1], params_[i], current, next,
                 tape ? &tape->argmax_[i] : nullptr);
    if (!next.allFinite()) {
      throw NumericError("non-finite activation after layer " + std::to_string(i) +
                         " (" + ToString(layers_[i].kind) + ")");
    }
    if (tape) tape->activations_.push_back(std::move(current));
    current = std::move(next);
  }
  if (tape) tape->activations_.push_back(current);
  return current;
}

namespace {

Tensor ToTensor(const Mat& m, const Shape& sample_shape, bool batched) {
  Shape shape;
  if (batched) shape.push_back(static_cast<std::size_t>(m.cols()));
  shape.insert(shape.end(), sample_shape.begin(), sample_shape.end());
  return Tensor(std::move(shape), std::vector<double>(m.data(), m.data() + m.size()));
}

}  // namespace

ForwardResult Network::Forward(const Tensor& x) const {
  ForwardResult result;
  const Mat y = RunForward(x, &result.tape);
  result.output = ToTensor(y, output_shape(), result.tape.batched_);
  return result;
}

Tensor Network::Predict(const Tensor& x) const {
  const BatchView view = CheckInput(x);
  return ToTensor(RunForward(x, nullptr), output_shape(), view.batched);
}

void Network::CheckAndConsume(GradTape& tape) const {
  if (tape.activations_.empty()) throw TapeError("backward on an empty tape");
  if (tape.consumed_) throw TapeError("gradient tape already consumed");
  if (tape.owner_ != this) throw TapeError("tape was recorded by another network");
  tape.consumed_ = true;
}

void Network::RunBackward(const GradTape& tape, Mat grad, Mat* input_grad,
                          ParamSet* param_grads) const {
  if (!grad.allFinite()) throw NumericError("non-finite upstream gradient");
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const bool need_dx = li > 0 || input_grad != nullptr;
    Mat dx;
    LayerParams* dp = (param_grads && HasParameters(layers_[li])) ? &(*param_grads)[li] : nullptr;
    LayerBackward(layers_[li], shapes_[li], shapes_[li + 1], params_[li],
                  tape.activations_[li], tape.activations_[li + 1], tape.argmax_[li],
                  grad, need_dx ? &dx : nullptr, dp);
    if (need_dx) grad = std::move(dx);
  }
  if (input_grad) *input_grad = std::move(grad);
}

Gradients Network::Backward(GradTape& tape, const Tensor& upstream, bool want_input,
                            bool want_params) const {
  CheckAndConsume(tape);
  Shape expected;
  if (tape.batched_) expected.push_back(tape.batch_);
  expected.insert(expected.end(), output_shape().begin(), output_shape().end());
  if (upstream.shape() != expected) {
    throw ShapeError("upstream gradient must have shape " + ToString(expected) +
                     ", got " + ToString(upstream.shape()));
  }
  const Mat grad = Eigen::Map<const Mat>(
      upstream.data().data(), static_cast<Eigen::Index>(NumElements(output_shape())),
      static_cast<Eigen::Index>(tape.batch_));
  Gradients out;
  Mat dx;
  if (want_params) out.params = ZeroParams();
  RunBackward(tape, grad, want_input ? &dx : nullptr, want_params ? &out.params : nullptr);
  if (want_input) out.input = ToTensor(dx, input_shape_, tape.batched_);
  return out;
}

Tensor Network::BackwardInput(GradTape& tape, const Tensor& upstream) const {
  return Backward(tape, upstream, true, false).input;
}

ParamSet Network::BackwardParams(GradTape& tape, const Tensor& upstream) const {
  return Backward(tape, upstream, false, true).params;
}

std::vector<Tensor> Network::BackwardInput(GradTape& tape,
                                           std::span<const Tensor> upstreams) const {
  CheckAndConsume(tape);
  if (tape.batched_ || tape.batch_ != 1) {
    throw TapeError("multi-cotangent backward needs an unbatched tape");
  }
  if (upstreams.empty()) return {};
  const auto features = static_cast<Eigen::Index>(NumElements(output_shape()));
  Mat grad(features, static_cast<Eigen::Index>(upstreams.size()));
  for (std::size_t j = 0; j < upstreams.size(); ++j) {
    if (upstreams[j].shape() != output_shape()) {
      throw ShapeError("upstream gradient must have shape " + ToString(output_shape()) +
                       ", got " + ToString(upstreams[j].shape()));
    }
    grad.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(upstreams[j].data().data(), features);
  }
  Mat dx;
  RunBackward(tape, std::move(grad), &dx, nullptr);
  std::vector<Tensor> out;
  out.reserve(upstreams.size());
  for (Eigen::Index j = 0; j < dx.cols(); ++j) {
    const Eigen::VectorXd col = dx.col(j);
    out.emplace_back(input_shape_, std::vector<double>(col.data(), col.data() + col.size()));
  }
  return out;
}

}  // namespace maif::diffnet
