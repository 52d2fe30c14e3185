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

#include "maif/diffnet/layer.h"

#include "maif/error.h"

namespace maif::diffnet {

std::string ToString(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv: return "conv";
    case LayerKind::kTransposedConv: return "transposed-conv";
    case LayerKind::kMaxPool: return "max-pool";
    case LayerKind::kAvgPool: return "avg-pool";
  }
  return "unknown";
}

std::string ToString(Activation activation) {
  switch (activation) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kTanhRelu: return "tanh-relu";
  }
  return "unknown";
}

LayerSpec Dense(int in_features, int out_features, Activation activation,
                Shape output_view) {
  LayerSpec spec;
  spec.kind = LayerKind::kDense;
  spec.in_channels = in_features;
  spec.out_channels = out_features;
  spec.activation = activation;
  spec.output_view = std::move(output_view);
  return spec;
}

LayerSpec Conv(int in_channels, int out_channels, int kernel, int stride,
               int padding, Activation activation) {
  return {LayerKind::kConv, in_channels, out_channels, kernel, stride, padding,
          activation, {}};
}

LayerSpec TransposedConv(int in_channels, int out_channels, int kernel,
                         int stride, int padding, Activation activation) {
  return {LayerKind::kTransposedConv, in_channels, out_channels, kernel, stride,
          padding, activation, {}};
}

LayerSpec MaxPool(int kernel, int stride) {
  return {LayerKind::kMaxPool, 0, 0, kernel, stride, 0, Activation::kIdentity,
          {}};
}

LayerSpec AvgPool(int kernel, int stride) {
  return {LayerKind::kAvgPool, 0, 0, kernel, stride, 0, Activation::kIdentity,
          {}};
}

bool HasParameters(const LayerSpec& spec) {
  return spec.kind == LayerKind::kDense || spec.kind == LayerKind::kConv ||
         spec.kind == LayerKind::kTransposedConv;
}

namespace {

[[noreturn]] void Fail(const LayerSpec& spec, const Shape& input,
                       const std::string& why) {
  throw ShapeError(ToString(spec.kind) + " layer cannot take input " +
                   ToString(input) + ": " + why);
}

void CheckWindow(const LayerSpec& spec, const Shape& input) {
  if (spec.kernel < 1) Fail(spec, input, "kernel must be >= 1");
  if (spec.stride < 1) Fail(spec, input, "stride must be >= 1");
  if (spec.padding < 0) Fail(spec, input, "padding must be >= 0");
}

}  // namespace

Shape InferOutputShape(const LayerSpec& spec, const Shape& input) {
  if (spec.kind != LayerKind::kDense && !spec.output_view.empty()) {
    Fail(spec, input, "output_view is only valid on dense layers");
  }
  if (!HasParameters(spec) && spec.activation != Activation::kIdentity) {
    Fail(spec, input, "pooling layers take no activation");
  }
  switch (spec.kind) {
    case LayerKind::kDense: {
      if (spec.in_channels < 1 || spec.out_channels < 1) {
        Fail(spec, input, "feature counts must be positive");
      }
      if (NumElements(input) != static_cast<std::size_t>(spec.in_channels)) {
        Fail(spec, input,
             "expects " + std::to_string(spec.in_channels) + " features");
      }
      if (spec.output_view.empty()) {
        return {static_cast<std::size_t>(spec.out_channels)};
      }
      if (NumElements(spec.output_view) !=
          static_cast<std::size_t>(spec.out_channels)) {
        Fail(spec, input, "output_view " + ToString(spec.output_view) +
                              " does not hold out_channels values");
      }
      return spec.output_view;
    }
    case LayerKind::kConv: {
      CheckWindow(spec, input);
      if (input.size() != 3) Fail(spec, input, "expects (C, H, W)");
      if (input[0] != static_cast<std::size_t>(spec.in_channels)) {
        Fail(spec, input, "channel mismatch");
      }
      if (spec.out_channels < 1) Fail(spec, input, "out_channels must be >= 1");
      const long h = static_cast<long>(input[1]) + 2 * spec.padding - spec.kernel;
      const long w = static_cast<long>(input[2]) + 2 * spec.padding - spec.kernel;
      if (h < 0 || w < 0) Fail(spec, input, "kernel larger than padded input");
      return {static_cast<std::size_t>(spec.out_channels),
              static_cast<std::size_t>(h / spec.stride + 1),
              static_cast<std::size_t>(w / spec.stride + 1)};
    }
    case LayerKind::kTransposedConv: {
      CheckWindow(spec, input);
      if (input.size() != 3) Fail(spec, input, "expects (C, H, W)");
      if (input[0] != static_cast<std::size_t>(spec.in_channels)) {
        Fail(spec, input, "channel mismatch");
      }
      if (spec.out_channels < 1) Fail(spec, input, "out_channels must be >= 1");
      if (spec.padding >= spec.kernel) Fail(spec, input, "padding >= kernel");
      const long h = (static_cast<long>(input[1]) - 1) * spec.stride -
                     2 * spec.padding + spec.kernel;
      const long w = (static_cast<long>(input[2]) - 1) * spec.stride -
                     2 * spec.padding + spec.kernel;
      if (h < 1 || w < 1) Fail(spec, input, "empty output");
      return {static_cast<std::size_t>(spec.out_channels),
              static_cast<std::size_t>(h), static_cast<std::size_t>(w)};
    }
    case LayerKind::kMaxPool:
    case LayerKind::kAvgPool: {
      CheckWindow(spec, input);
      if (spec.padding != 0) Fail(spec, input, "pooling takes no padding");
      if (input.size() != 3) Fail(spec, input, "expects (C, H, W)");
      if (input[1] < static_cast<std::size_t>(spec.kernel) ||
          input[2] < static_cast<std::size_t>(spec.kernel)) {
        Fail(spec, input, "window larger than input");
      }
      return {input[0], (input[1] - spec.kernel) / spec.stride + 1,
              (input[2] - spec.kernel) / spec.stride + 1};
    }
  }
  Fail(spec, input, "unknown layer kind");
}

Shape WeightShape(const LayerSpec& spec) {
  const auto in = static_cast<std::size_t>(spec.in_channels);
  const auto out = static_cast<std::size_t>(spec.out_channels);
  const auto k = static_cast<std::size_t>(spec.kernel);
  switch (spec.kind) {
    case LayerKind::kDense: return {out, in};
    case LayerKind::kConv: return {out, in, k, k};
    case LayerKind::kTransposedConv: return {in, out, k, k};
    default: return {};
  }
}

Shape BiasShape(const LayerSpec& spec) {
  if (!HasParameters(spec)) return {};
  return {static_cast<std::size_t>(spec.out_channels)};
}

}  // namespace maif::diffnet
