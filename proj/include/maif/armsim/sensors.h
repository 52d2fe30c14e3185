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

#ifndef MAIF_ARMSIM_SENSORS_H_
#define MAIF_ARMSIM_SENSORS_H_

#include <cstdint>
#include <memory>
#include <random>

#include "maif/armsim/arm.h"
#include "maif/armsim/render.h"
#include "maif/diffnet/tensor.h"

namespace maif::armsim {

// Standard deviations of the additive Gaussian measurement noise.
struct NoiseSpec {
  double q_std = 0.0;      // rad
  double qd_std = 0.0;     // rad/s
  double image_std = 0.0;  // intensity units, image clamped to [0, 1] after
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SensorRates {
  double proprio_period = 1e-3;  // 1000 Hz joint encoders
  double image_period = 0.1;     // 10 Hz camera
};

// Latest synchronised observation. The image is shared so that a held camera
// sample is literally the same object between controller ticks.
struct SensorFrame {
  VectorXd q;
  VectorXd qd;
  std::shared_ptr<const diffnet::Tensor> image;
  double proprio_time = 0.0;
  double image_time = 0.0;
  bool occluded = false;
};

// Same frame with an all-zero image (camera covered or broken).
SensorFrame Occlude(const SensorFrame& frame);

// Rate-limited, noisy sensing of the true arm state. Proprioception and the
// camera draw from independent random streams.
class SensorSuite {
 public:
  SensorSuite(ArmModel model, CameraOptions camera, NoiseSpec noise,
              SensorRates rates = {});

  // Refreshes each channel whose period has elapsed since its last sample
  // (the first call refreshes both) and returns the current frame. Throws
  // ConfigError if time runs backwards.
  const SensorFrame& Sample(const ArmState& state);

  const SensorFrame& frame() const { return frame_; }
  std::size_t proprio_refreshes() const { return proprio_refreshes_; }
  std::size_t image_refreshes() const { return image_refreshes_; }
  const ArmModel& model() const { return model_; }
  const CameraOptions& camera() const { return camera_; }

 private:
  ArmModel model_;
  CameraOptions camera_;
  NoiseSpec noise_;
  SensorRates rates_;
  std::mt19937_64 proprio_rng_;
  std::mt19937_64 image_rng_;
  SensorFrame frame_;
  bool primed_ = false;
  double last_time_ = 0.0;
  std::size_t proprio_refreshes_ = 0;
  std::size_t image_refreshes_ = 0;
};

}  // namespace maif::armsim

#endif  // MAIF_ARMSIM_SENSORS_H_
