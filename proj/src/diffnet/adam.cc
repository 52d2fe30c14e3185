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

#include "maif/diffnet/adam.h"

#include <cmath>
#include <string>

#include "maif/error.h"

namespace maif::diffnet {
namespace {

LayerParams ZerosLike(const LayerParams& p) {
  LayerParams z;
  if (!p.weight.empty()) z.weight = Tensor(p.weight.shape());
  if (!p.bias.empty()) z.bias = Tensor(p.bias.shape());
  return z;
}

void UpdateTensor(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v,
                  const AdamConfig& c, double correction1, double correction2) {
  auto p = param.data();
  auto g = grad.data();
  auto md = m.data();
  auto vd = v.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    md[i] = c.beta1 * md[i] + (1.0 - c.beta1) * g[i];
    vd[i] = c.beta2 * vd[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double m_hat = md[i] / correction1;
    const double v_hat = vd[i] / correction2;
    p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace

AdamState::AdamState(const ParamSet& like) {
  for (const auto& p : like) {
    first.push_back(ZerosLike(p));
    second.push_back(ZerosLike(p));
  }
}

void AdamStep(ParamSet& params, const ParamSet& grads, AdamState& state,
              const AdamConfig& config) {
  if (grads.size() != params.size() || state.first.size() != params.size()) {
    throw ShapeError("Adam: parameter, gradient and moment layer counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].weight.shape() != params[i].weight.shape() ||
        grads[i].bias.shape() != params[i].bias.shape()) {
      throw ShapeError("Adam: gradient shape mismatch in layer " + std::to_string(i));
    }
    if (!grads[i].weight.AllFinite() || !grads[i].bias.AllFinite()) {
      throw NumericError("Adam: non-finite gradient in layer " + std::to_string(i));
    }
  }
  ++state.step;
  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    UpdateTensor(params[i].weight, grads[i].weight, state.first[i].weight,
                 state.second[i].weight, config, correction1, correction2);
    UpdateTensor(params[i].bias, grads[i].bias, state.first[i].bias,
                 state.second[i].bias, config, correction1, correction2);
  }
}

}  // namespace maif::diffnet
