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

#include "maif/diffnet/gradient_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace maif::diffnet {
namespace {

double Objective(const Network& net, const Tensor& x, const Tensor& upstream) {
  return Dot(net.Predict(x), upstream);
}

// Perturbs *value in place, evaluates, and restores it.
template <typename Eval>
void CheckComponent(double* value, double analytic, Eval&& eval,
                    const GradCheckOptions& options, const std::string& label,
                    GradCheckReport& report) {
  const double original = *value;
  const double h = options.epsilon;
  *value = original + h;
  const double plus = eval();
  *value = original - h;
  const double minus = eval();
  *value = original;
  const double center = eval();
  const double numeric = (plus - minus) / (2.0 * h);
  const double err = RelativeError(analytic, numeric, options.absolute_floor);
  ++report.checked;
  if (err <= options.relative_tolerance) {
    if (err > report.max_relative_error) report.max_relative_error = err;
    return;
  }
  const double forward = (plus - center) / h;
  const double backward = (center - minus) / h;
  if (RelativeError(forward, backward, options.absolute_floor) >
      options.relative_tolerance * 10.0) {
    ++report.kinks;
    return;
  }
  ++report.failed;
  if (err > report.max_relative_error) {
    report.max_relative_error = err;
    std::ostringstream s;
    s << label << ": analytic " << analytic << " vs numeric " << numeric;
    report.worst = s.str();
  }
}

}  // namespace

void GradCheckReport::Merge(const GradCheckReport& other) {
  checked += other.checked;
  failed += other.failed;
  kinks += other.kinks;
  if (other.max_relative_error > max_relative_error) {
    max_relative_error = other.max_relative_error;
    if (!other.worst.empty()) worst = other.worst;
  }
}

double RelativeError(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport CheckInputGradient(const Network& net, const Tensor& x,
                                   const Tensor& upstream,
                                   const GradCheckOptions& options) {
  auto [y, tape] = net.Forward(x);
  const Tensor analytic = net.BackwardInput(tape, upstream);
  Tensor probe = x;
  GradCheckReport report;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    CheckComponent(&probe[i], analytic[i],
                   [&] { return Objective(net, probe, upstream); }, options,
                   "input[" + std::to_string(i) + "]", report);
  }
  return report;
}

GradCheckReport CheckParamGradient(const Network& net, const Tensor& x,
                                   const Tensor& upstream,
                                   const GradCheckOptions& options) {
  auto [y, tape] = net.Forward(x);
  const ParamSet analytic = net.BackwardParams(tape, upstream);
  Network probe = net;
  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  auto eval = [&] { return Objective(probe, x, upstream); };
  for (std::size_t layer = 0; layer < probe.params().size(); ++layer) {
    for (int which = 0; which < 2; ++which) {
      Tensor& values = which == 0 ? probe.params()[layer].weight : probe.params()[layer].bias;
      const Tensor& grads = which == 0 ? analytic[layer].weight : analytic[layer].bias;
      if (values.empty()) continue;
      std::vector<std::size_t> indices(values.size());
      std::iota(indices.begin(), indices.end(), 0);
      if (options.params_per_layer > 0 && indices.size() > options.params_per_layer) {
        std::shuffle(indices.begin(), indices.end(), rng);
        indices.resize(options.params_per_layer);
      }
      for (std::size_t i : indices) {
        CheckComponent(&values[i], grads[i], eval, options,
                       "layer " + std::to_string(layer) + (which ? " bias[" : " weight[") +
                           std::to_string(i) + "]",
                       report);
      }
    }
  }
  return report;
}

}  // namespace maif::diffnet
