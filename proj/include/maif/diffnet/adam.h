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

#ifndef MAIF_DIFFNET_ADAM_H_
#define MAIF_DIFFNET_ADAM_H_

#include <cstdint>

#include "maif/diffnet/network.h"

namespace maif::diffnet {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment estimates, shaped like the parameters they track.
struct AdamState {
  AdamState() = default;
  explicit AdamState(const ParamSet& like);

  std::int64_t step = 0;
  ParamSet first;
  ParamSet second;
};

// One bias-corrected Adam update. If any gradient is non-finite nothing is
// modified and NumericError names the first offending layer.
void AdamStep(ParamSet& params, const ParamSet& grads, AdamState& state,
              const AdamConfig& config);

}  // namespace maif::diffnet

#endif  // MAIF_DIFFNET_ADAM_H_
