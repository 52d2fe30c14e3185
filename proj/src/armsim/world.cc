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

#include "maif/armsim/world.h"

#include <cmath>
#include <string>

#include "maif/error.h"

namespace maif::armsim {
namespace {

template <typename T, typename F>
std::vector<double> Collect(const std::vector<T>& items, F field) {
  std::vector<double> out;
  out.reserve(items.size());
  for (const T& item : items) out.push_back(field(item));
  return out;
}

// Reads a per-link list; a single value is broadcast to every link.
std::vector<double> PerLink(const KeyValueConfig& config, const std::string& key,
                            std::size_t n, const std::vector<double>& fallback) {
  std::vector<double> values = config.GetDoubles(key, fallback);
  if (values.size() == 1 && n > 1) values.assign(n, values[0]);
  if (values.size() != n) {
    throw ConfigError("config key '" + key + "' needs " + std::to_string(n) + " values");
  }
  return values;
}

}  // namespace

void WorldConfig::Validate() const {
  arm.Validate();
  noise.Validate();
  if (camera.height <= 0 || camera.width <= 0 || !(camera.span > 0.0) ||
      camera.half_widths.empty()) {
    throw ConfigError("invalid camera options");
  }
  if (!(rates.proprio_period > 0.0) || !(rates.image_period > 0.0)) {
    throw ConfigError("sensor periods must be positive");
  }
  if (!(physics_dt > 0.0) || !(control_period >= physics_dt)) {
    throw ConfigError("need 0 < physics_dt <= control_period");
  }
}

int WorldConfig::substeps() const {
  return static_cast<int>(std::lround(control_period / physics_dt));
}

KeyValueConfig ToConfig(const WorldConfig& world) {
  KeyValueConfig c;
  const auto& links = world.arm.links;
  const auto& joints = world.arm.joints;
  c.Set("arm.lengths", Collect(links, [](const Link& l) { return l.length; }));
  c.Set("arm.masses", Collect(links, [](const Link& l) { return l.mass; }));
  c.Set("arm.com", Collect(links, [](const Link& l) { return l.com; }));
  c.Set("arm.damping", Collect(joints, [](const Joint& j) { return j.damping; }));
  c.Set("arm.stiffness", Collect(joints, [](const Joint& j) { return j.stiffness; }));
  c.Set("arm.torque_limit", Collect(joints, [](const Joint& j) { return j.torque_limit; }));
  c.Set("arm.lower", Collect(joints, [](const Joint& j) { return j.lower; }));
  c.Set("arm.upper", Collect(joints, [](const Joint& j) { return j.upper; }));
  c.Set("arm.gravity", world.arm.gravity);
  c.Set("camera.height", static_cast<std::int64_t>(world.camera.height));
  c.Set("camera.width", static_cast<std::int64_t>(world.camera.width));
  c.Set("camera.span", world.camera.span);
  c.Set("camera.half_widths", world.camera.half_widths);
  c.Set("noise.q_std", world.noise.q_std);
  c.Set("noise.qd_std", world.noise.qd_std);
  c.Set("noise.image_std", world.noise.image_std);
  c.Set("noise.seed", static_cast<std::int64_t>(world.noise.seed));
  c.Set("rates.proprio_period", world.rates.proprio_period);
  c.Set("rates.image_period", world.rates.image_period);
  c.Set("sim.physics_dt", world.physics_dt);
  c.Set("sim.control_period", world.control_period);
  return c;
}

WorldConfig WorldFromConfig(const KeyValueConfig& config) {
  WorldConfig w;
  const WorldConfig defaults;
  const KeyValueConfig base = ToConfig(defaults);
  const std::vector<double> lengths = config.GetDoubles("arm.lengths", base.GetDoubles("arm.lengths"));
  const std::size_t n = lengths.size();
  if (n == 0) throw ConfigError("arm.lengths is empty");
  // Defaults for other per-link keys only make sense for the default chain.
  const bool default_chain = n == defaults.arm.links.size();
  auto list = [&](const std::string& key) {
    const std::vector<double> fallback =
        default_chain ? base.GetDoubles(key)
                      : std::vector<double>{base.GetDoubles(key).back()};
    return PerLink(config, key, n, fallback);
  };
  const auto masses = list("arm.masses");
  std::vector<double> com;
  if (config.Has("arm.com") || default_chain) {
    com = list("arm.com");
  } else {
    for (double l : lengths) com.push_back(0.5 * l);
  }
  const auto damping = list("arm.damping");
  const auto stiffness = list("arm.stiffness");
  const auto torque = list("arm.torque_limit");
  const auto lower = list("arm.lower");
  const auto upper = list("arm.upper");
  w.arm.links.assign(n, Link{});
  w.arm.joints.assign(n, Joint{});
  for (std::size_t i = 0; i < n; ++i) {
    w.arm.links[i] = Link{lengths[i], masses[i], com[i]};
    w.arm.joints[i] = Joint{damping[i], stiffness[i], torque[i], lower[i], upper[i]};
  }
  w.arm.gravity = config.GetDouble("arm.gravity", defaults.arm.gravity);
  w.camera.height = static_cast<int>(config.GetInt("camera.height", defaults.camera.height));
  w.camera.width = static_cast<int>(config.GetInt("camera.width", defaults.camera.width));
  w.camera.span = config.GetDouble("camera.span", defaults.camera.span);
  w.camera.half_widths = config.GetDoubles("camera.half_widths", defaults.camera.half_widths);
  w.noise.q_std = config.GetDouble("noise.q_std", defaults.noise.q_std);
  w.noise.qd_std = config.GetDouble("noise.qd_std", defaults.noise.qd_std);
  w.noise.image_std = config.GetDouble("noise.image_std", defaults.noise.image_std);
  w.noise.seed = static_cast<std::uint64_t>(
      config.GetInt("noise.seed", static_cast<std::int64_t>(defaults.noise.seed)));
  w.rates.proprio_period = config.GetDouble("rates.proprio_period", defaults.rates.proprio_period);
  w.rates.image_period = config.GetDouble("rates.image_period", defaults.rates.image_period);
  w.physics_dt = config.GetDouble("sim.physics_dt", defaults.physics_dt);
  w.control_period = config.GetDouble("sim.control_period", defaults.control_period);
  w.Validate();
  return w;
}

Simulator::Simulator(WorldConfig config, const ArmState& initial)
    : config_(std::move(config)),
      sensors_(config_.arm, config_.camera, config_.noise, config_.rates),
      state_(initial),
      start_time_(initial.t) {
  config_.Validate();
  if (state_.q.size() != config_.arm.dof() || state_.qd.size() != config_.arm.dof()) {
    throw ShapeError("initial state does not match the arm");
  }
}

void Simulator::Advance(const VectorXd& torque) {
  const VectorXd tau = ClampTorque(config_.arm, torque);
  const int n = config_.substeps();
  for (int i = 0; i < n; ++i) {
    state_ = Step(config_.arm, state_, tau, config_.physics_dt);
  }
  // Keep the clock on the integer step grid so that long runs do not drift.
  steps_ += n;
  state_.t = start_time_ + static_cast<double>(steps_) * config_.physics_dt;
}

const SensorFrame& Simulator::Sense() {
  ++reads_;
  return sensors_.Sample(state_);
}

const ArmState& Simulator::Truth() {
  ++reads_;
  return state_;
}

TrajectoryWriter::TrajectoryWriter(std::ostream& out, const ArmModel& model)
    : out_(out), model_(model) {
  out_ << "t";
  const int n = model_.dof();
  for (int i = 0; i < n; ++i) out_ << ",q" << i;
  for (int i = 0; i < n; ++i) out_ << ",qd" << i;
  for (int i = 0; i < n; ++i) out_ << ",tau" << i;
  out_ << ",ee_x,ee_y\n";
}

void TrajectoryWriter::Write(const ArmState& state, const VectorXd& torque) {
  out_ << FormatDouble(state.t);
  for (int i = 0; i < state.q.size(); ++i) out_ << ',' << FormatDouble(state.q[i]);
  for (int i = 0; i < state.qd.size(); ++i) out_ << ',' << FormatDouble(state.qd[i]);
  for (int i = 0; i < torque.size(); ++i) out_ << ',' << FormatDouble(torque[i]);
  const Vector2d ee = ForwardKinematics(model_, state.q);
  out_ << ',' << FormatDouble(ee.x()) << ',' << FormatDouble(ee.y()) << '\n';
}

}  // namespace maif::armsim
