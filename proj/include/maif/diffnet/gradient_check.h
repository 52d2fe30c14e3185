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

#ifndef MAIF_DIFFNET_GRADIENT_CHECK_H_
#define MAIF_DIFFNET_GRADIENT_CHECK_H_

// Central finite-difference checks of Network::Backward. The checks only use
// Network::Predict, so they stay independent of the reverse-mode code path.

#include <cstdint>
#include <string>

#include "maif/diffnet/network.h"

namespace maif::diffnet {

struct GradCheckOptions {
  double epsilon = 1e-5;
  double relative_tolerance = 1e-4;
  // Denominator floor for components that are essentially zero.
  double absolute_floor = 1e-6;
  // Parameters sampled per layer in CheckParamGradient (0 = all).
  std::size_t params_per_layer = 24;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  std::size_t checked = 0;
  std::size_t failed = 0;
  // Components where the one-sided differences disagree, i.e. the
  // perturbation crossed a ReLU or max-pool switch. Not counted as failures.
  std::size_t kinks = 0;
  double max_relative_error = 0.0;
  std::string worst;

  bool ok() const { return failed == 0; }
  void Merge(const GradCheckReport& other);
};

double RelativeError(double analytic, double numeric, double floor);

// Compares d(upstream . net(x))/dx from BackwardInput against central
// differences on every input component.
GradCheckReport CheckInputGradient(const Network& net, const Tensor& x,
                                   const Tensor& upstream,
                                   const GradCheckOptions& options = {});

// Same for BackwardParams, on a random subset of each layer's parameters.
GradCheckReport CheckParamGradient(const Network& net, const Tensor& x,
                                   const Tensor& upstream,
                                   const GradCheckOptions& options = {});

}  // namespace maif::diffnet

#endif  // MAIF_DIFFNET_GRADIENT_CHECK_H_
