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

#ifndef MAIF_DIFFNET_NETWORK_H_
#define MAIF_DIFFNET_NETWORK_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "maif/diffnet/layer.h"
#include "maif/diffnet/tensor.h"

namespace maif::diffnet {

struct LayerParams {
  Tensor weight;  // empty for pooling layers
  Tensor bias;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

using ParamSet = std::vector<LayerParams>;

class Network;

// Activations recorded by one forward pass. A tape can be consumed by exactly
// one backward call; a second call throws TapeError.
class GradTape {
 public:
  GradTape() = default;
  GradTape(GradTape&&) noexcept = default;
  GradTape& operator=(GradTape&&) noexcept = default;
  GradTape(const GradTape&) = delete;
  GradTape& operator=(const GradTape&) = delete;

  bool valid() const { return !activations_.empty() && !consumed_; }
  std::size_t batch() const { return batch_; }

 private:
  friend class Network;

  const Network* owner_ = nullptr;
  bool batched_ = false;
  std::size_t batch_ = 0;
  bool consumed_ = false;
  // activations_[0] is the input, activations_[i + 1] the output of layer i.
  // Columns are samples.
  std::vector<Eigen::MatrixXd> activations_;
  std::vector<std::vector<int>> argmax_;
};

struct ForwardResult {
  Tensor output;
  GradTape tape;
};

struct Gradients {
  Tensor input;     // empty when not requested
  ParamSet params;  // empty when not requested
};

// A feed-forward stack of layers. Inputs are either exactly input_shape() or
// a batch {N} + input_shape(); outputs mirror the batching.
class Network {
 public:
  Network() = default;
  Network(Shape input_shape, std::vector<LayerSpec> layers);

  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return shapes_.back(); }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  // Output shape of layer i (unbatched).
  const Shape& layer_output_shape(std::size_t i) const { return shapes_[i + 1]; }

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  std::size_t ParameterCount() const;

  // He-uniform weights (LeCun-uniform for identity layers), zero biases.
  void Initialize(std::uint64_t seed);

  ForwardResult Forward(const Tensor& x) const;
  // Forward pass without recording a tape.
  Tensor Predict(const Tensor& x) const;

  // d(upstream . f(x))/dx at the taped input. Consumes the tape.
  Tensor BackwardInput(GradTape& tape, const Tensor& upstream) const;
  // Several cotangents against one single-sample tape in one pass; returns one
  // input gradient per cotangent. Consumes the tape.
  std::vector<Tensor> BackwardInput(GradTape& tape,
                                    std::span<const Tensor> upstreams) const;
  // Parameter gradients, summed over the batch. Consumes the tape.
  ParamSet BackwardParams(GradTape& tape, const Tensor& upstream) const;
  // Both at once. Consumes the tape.
  Gradients Backward(GradTape& tape, const Tensor& upstream,
                     bool want_input, bool want_params) const;

  ParamSet ZeroParams() const;

 private:
  struct BatchView {
    bool batched = false;
    std::size_t batch = 1;
  };

  BatchView CheckInput(const Tensor& x) const;
  Eigen::MatrixXd RunForward(const Tensor& x, GradTape* tape) const;
  void RunBackward(const GradTape& tape, Eigen::MatrixXd grad,
                   Eigen::MatrixXd* input_grad, ParamSet* param_grads) const;
  void CheckAndConsume(GradTape& tape) const;

  Shape input_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<Shape> shapes_;  // shapes_[0] = input, shapes_[i + 1] = layer i
  ParamSet params_;
};

}  // namespace maif::diffnet

#endif  // MAIF_DIFFNET_NETWORK_H_
