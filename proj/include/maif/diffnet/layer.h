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

#ifndef MAIF_DIFFNET_LAYER_H_
#define MAIF_DIFFNET_LAYER_H_

#include <string>

#include "maif/diffnet/tensor.h"

namespace maif::diffnet {

enum class LayerKind {
  kDense = 0,
  kConv = 1,
  kTransposedConv = 2,
  kMaxPool = 3,
  kAvgPool = 4,
};

enum class Activation {
  kIdentity = 0,
  kRelu = 1,
  // tanh(relu(x)); only legal on the last layer of a network.
  kTanhRelu = 2,
};

std::string ToString(LayerKind kind);
std::string ToString(Activation activation);

// Static description of one layer. Dense layers use in_channels/out_channels
// as feature counts and may reinterpret their output as a (C, H, W) map via
// output_view. Pooling layers carry no parameters and keep the channel count.
//
// Gradient conventions: relu'(0) = 0, and max-pool ties resolve to the
// lowest flat index inside the window.
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  Activation activation = Activation::kIdentity;
  Shape output_view;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

LayerSpec Dense(int in_features, int out_features, Activation activation,
                Shape output_view = {});
LayerSpec Conv(int in_channels, int out_channels, int kernel, int stride,
               int padding, Activation activation);
LayerSpec TransposedConv(int in_channels, int out_channels, int kernel,
                         int stride, int padding, Activation activation);
LayerSpec MaxPool(int kernel, int stride);
LayerSpec AvgPool(int kernel, int stride);

bool HasParameters(const LayerSpec& spec);

// Output shape of the layer for a single (unbatched) input; throws
// ShapeError when the input does not fit the layer.
Shape InferOutputShape(const LayerSpec& spec, const Shape& input);

// Weight and bias shapes; empty shapes for pooling layers.
Shape WeightShape(const LayerSpec& spec);
Shape BiasShape(const LayerSpec& spec);

}  // namespace maif::diffnet

#endif  // MAIF_DIFFNET_LAYER_H_
