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

#ifndef MAIF_ARMSIM_WORLD_H_
#define MAIF_ARMSIM_WORLD_H_

#include <cstddef>
#include <ostream>

#include "maif/armsim/arm.h"
#include "maif/armsim/render.h"
#include "maif/armsim/sensors.h"
#include "maif/config.h"

namespace maif::armsim {

// Everything the simulated world needs: arm, camera, sensor noise and rates,
// integration step and controller period.
struct WorldConfig {
  ArmModel arm = ArmModel::Desk3();
  CameraOptions camera;
  NoiseSpec noise;
  SensorRates rates;
  double physics_dt = 1e-3;
  double control_period = 9e-3;

  void Validate() const;
  // Physics steps per controller tick (control_period / physics_dt, rounded).
  int substeps() const;
};

// Keys (all optional on read, defaults from WorldConfig):
//   arm.lengths, arm.masses, arm.com          per-link lists
//   arm.damping, arm.stiffness, arm.torque_limit, arm.lower, arm.upper
//                                             per-joint lists
//   arm.gravity
//   camera.height, camera.width, camera.span, camera.half_widths
//   noise.q_std, noise.qd_std, noise.image_std, noise.seed
//   rates.proprio_period, rates.image_period
//   sim.physics_dt, sim.control_period
KeyValueConfig ToConfig(const WorldConfig& world);
WorldConfig WorldFromConfig(const KeyValueConfig& config);

// Ground-truth world with a sensor suite. Every access to the true state or
// to the sensors increments the read counter.
class Simulator {
 public:
  Simulator(WorldConfig config, const ArmState& initial);

  // Holds `torque` (clamped) for one controller period.
  void Advance(const VectorXd& torque);
  const SensorFrame& Sense();
  const ArmState& Truth();

  const WorldConfig& config() const { return config_; }
  std::size_t reads() const { return reads_; }
  double time() const { return state_.t; }

 private:
  WorldConfig config_;
  SensorSuite sensors_;
  ArmState state_;
  double start_time_;
  std::size_t reads_ = 0;
  long long steps_ = 0;
};

// CSV: t, q0.., qd0.., tau0.., ee_x, ee_y.
class TrajectoryWriter {
 public:
  TrajectoryWriter(std::ostream& out, const ArmModel& model);
  void Write(const ArmState& state, const VectorXd& torque);

 private:
  std::ostream& out_;
  ArmModel model_;
};

}  // namespace maif::armsim

#endif  // MAIF_ARMSIM_WORLD_H_
