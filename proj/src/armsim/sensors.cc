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

#include "maif/armsim/sensors.h"

#include <algorithm>

#include "maif/error.h"

namespace maif::armsim {
namespace {

// Tolerance for comparing accumulated floating-point simulation times.
constexpr double kTimeSlack = 1e-9;

std::uint64_t Mix(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

void NoiseSpec::Validate() const {
  if (!(q_std >= 0.0) || !(qd_std >= 0.0) || !(image_std >= 0.0)) {
    throw ConfigError("noise standard deviations must be >= 0");
  }
}

SensorFrame Occlude(const SensorFrame& frame) {
  SensorFrame out = frame;
  if (frame.image) {
    out.image = std::make_shared<const diffnet::Tensor>(frame.image->shape());
  }
  out.occluded = true;
  return out;
}

SensorSuite::SensorSuite(ArmModel model, CameraOptions camera, NoiseSpec noise,
                         SensorRates rates)
    : model_(std::move(model)),
      camera_(std::move(camera)),
      noise_(noise),
      rates_(rates),
      proprio_rng_(Mix(noise.seed, 1)),
      image_rng_(Mix(noise.seed, 2)) {
  noise_.Validate();
  model_.Validate();
  if (!(rates_.proprio_period > 0.0) || !(rates_.image_period > 0.0)) {
    throw ConfigError("sensor periods must be positive");
  }
}

const SensorFrame& SensorSuite::Sample(const ArmState& state) {
  if (primed_ && state.t + kTimeSlack < last_time_) {
    throw ConfigError("sensor clock went backwards");
  }
  last_time_ = state.t;
  const bool refresh_proprio =
      !primed_ || state.t - frame_.proprio_time >= rates_.proprio_period - kTimeSlack;
  const bool refresh_image =
      !primed_ || state.t - frame_.image_time >= rates_.image_period - kTimeSlack;
  if (refresh_proprio) {
    std::normal_distribution<double> unit(0.0, 1.0);
    frame_.q = state.q;
    frame_.qd = state.qd;
    if (noise_.q_std > 0.0) {
      for (int i = 0; i < frame_.q.size(); ++i) frame_.q[i] += noise_.q_std * unit(proprio_rng_);
    }
    if (noise_.qd_std > 0.0) {
      for (int i = 0; i < frame_.qd.size(); ++i) frame_.qd[i] += noise_.qd_std * unit(proprio_rng_);
    }
    frame_.proprio_time = state.t;
    ++proprio_refreshes_;
  }
  if (refresh_image) {
    diffnet::Tensor image = Render(model_, state.q, camera_);
    if (noise_.image_std > 0.0) {
      std::normal_distribution<double> unit(0.0, 1.0);
      for (double& v : image.data()) {
        v = std::clamp(v + noise_.image_std * unit(image_rng_), 0.0, 1.0);
      }
    }
    frame_.image = std::make_shared<const diffnet::Tensor>(std::move(image));
    frame_.image_time = state.t;
    ++image_refreshes_;
  }
  frame_.occluded = false;
  primed_ = true;
  return frame_;
}

}  // namespace maif::armsim
