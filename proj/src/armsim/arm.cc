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

#include "maif/armsim/arm.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "maif/error.h"

namespace maif::armsim {

double ArmModel::reach() const {
  double r = 0.0;
  for (const Link& l : links) r += l.length;
  return r;
}

double ArmModel::link_inertia(int i) const {
  const Link& l = links[static_cast<std::size_t>(i)];
  return l.mass * l.length * l.length / 12.0;
}

void ArmModel::Validate() const {
  if (links.empty()) throw ConfigError("arm needs at least one link");
  if (links.size() != joints.size()) throw ConfigError("links and joints differ in count");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    const Joint& j = joints[i];
    const std::string where = " (joint " + std::to_string(i) + ")";
    if (!(l.length > 0.0) || !(l.mass > 0.0)) {
      throw ConfigError("link length and mass must be positive" + where);
    }
    if (l.com < 0.0 || l.com > l.length) throw ConfigError("com outside the link" + where);
    if (j.damping < 0.0 || j.stiffness < 0.0) {
      throw ConfigError("damping and stiffness must be >= 0" + where);
    }
    if (!(j.torque_limit > 0.0)) throw ConfigError("torque limit must be positive" + where);
    if (!(j.lower < j.upper)) throw ConfigError("joint limits are empty" + where);
  }
  if (!(gravity >= 0.0) || !std::isfinite(gravity)) throw ConfigError("gravity must be >= 0");
}

ArmModel ArmModel::Desk3() {
  ArmModel arm;
  arm.links = {{0.45, 3.0, 0.225}, {0.40, 2.0, 0.20}, {0.30, 1.0, 0.15}};
  arm.joints = {{10.0, 0.61, 150.0, -2.9, 2.9},
                {8.0, 0.61, 150.0, -2.9, 2.9},
                {5.0, 0.61, 150.0, -2.9, 2.9}};
  return arm;
}

ArmModel ArmModel::Uniform(int dof, double total_length) {
  ArmModel arm;
  const double l = total_length / dof;
  for (int i = 0; i < dof; ++i) {
    arm.links.push_back({l, 1.0, l / 2});
    arm.joints.push_back({5.0, 0.61, 150.0, -2.9, 2.9});
  }
  return arm;
}

ArmState ArmState::AtRest(const VectorXd& q) {
  return {q, VectorXd::Zero(q.size()), 0.0};
}

VectorXd InverseDynamics(const ArmModel& model, const VectorXd& q, const VectorXd& qd,
                         const VectorXd& qdd, double gravity) {
  const int n = model.dof();
  // Outward pass: absolute angle, angular velocity and acceleration of each
  // link, and the linear acceleration of its centre of mass. Gravity enters as
  // an upward base acceleration.
  std::vector<double> angle(n), omega(n), alpha(n);
  std::vector<Vector2d> com_acc(n);
  Vector2d joint_acc(gravity, 0.0);
  double a = 0.0, w = 0.0, wd = 0.0;
  for (int i = 0; i < n; ++i) {
    a += q[i];
    w += qd[i];
    wd += qdd[i];
    angle[i] = a;
    omega[i] = w;
    alpha[i] = wd;
    const Vector2d u(std::cos(a), std::sin(a));
    const Vector2d perp(-u.y(), u.x());
    const Link& link = model.links[static_cast<std::size_t>(i)];
    com_acc[i] = joint_acc + wd * link.com * perp - w * w * link.com * u;
    joint_acc += wd * link.length * perp - w * w * link.length * u;
  }
  // Inward pass: force and moment each link receives from its parent.
  auto cross = [](const Vector2d& r, const Vector2d& f) { return r.x() * f.y() - r.y() * f.x(); };
  VectorXd tau(n);
  Vector2d child_force = Vector2d::Zero();
  double child_moment = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    const Link& link = model.links[static_cast<std::size_t>(i)];
    const Vector2d u(std::cos(angle[i]), std::sin(angle[i]));
    const Vector2d inertial = link.mass * com_acc[i];
    const double moment = model.link_inertia(i) * alpha[i] + cross(link.com * u, inertial) +
                          cross(link.length * u, child_force) + child_moment;
    tau[i] = moment;
    child_force += inertial;
    child_moment = moment;
  }
  return tau;
}

MatrixXd MassMatrix(const ArmModel& model, const VectorXd& q) {
  const int n = model.dof();
  MatrixXd m(n, n);
  const VectorXd zero = VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    m.col(j) = InverseDynamics(model, q, zero, VectorXd::Unit(n, j), 0.0);
  }
  return 0.5 * (m + m.transpose());
}

VectorXd GravityTorque(const ArmModel& model, const VectorXd& q) {
  const VectorXd zero = VectorXd::Zero(model.dof());
  return InverseDynamics(model, q, zero, zero, model.gravity);
}

double KineticEnergy(const ArmModel& model, const VectorXd& q, const VectorXd& qd) {
  return 0.5 * qd.dot(MassMatrix(model, q) * qd);
}

std::vector<Vector2d> JointPositions(const ArmModel& model, const VectorXd& q) {
  std::vector<Vector2d> points{Vector2d::Zero()};
  double angle = 0.0;
  for (int i = 0; i < model.dof(); ++i) {
    angle += q[i];
    const double l = model.links[static_cast<std::size_t>(i)].length;
    points.push_back(points.back() + l * Vector2d(std::cos(angle), std::sin(angle)));
  }
  return points;
}

Vector2d ForwardKinematics(const ArmModel& model, const VectorXd& q) {
  return JointPositions(model, q).back();
}

VectorXd ClampTorque(const ArmModel& model, const VectorXd& torque) {
  VectorXd out = torque;
  for (int i = 0; i < model.dof(); ++i) {
    const double lim = model.joints[static_cast<std::size_t>(i)].torque_limit;
    out[i] = std::clamp(out[i], -lim, lim);
  }
  return out;
}

ArmState Step(const ArmModel& model, const ArmState& state, const VectorXd& torque,
              double dt) {
  if (!(dt > 0.0)) throw ConfigError("step needs dt > 0");
  const int n = model.dof();
  if (state.q.size() != n || state.qd.size() != n || torque.size() != n) {
    throw ShapeError("arm state/torque size does not match the model");
  }
  const VectorXd tau = ClampTorque(model, torque);
  VectorXd passive(n);
  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[static_cast<std::size_t>(i)];
    passive[i] = j.stiffness * state.q[i] + j.damping * state.qd[i];
  }
  const VectorXd bias = InverseDynamics(model, state.q, state.qd, VectorXd::Zero(n), model.gravity);
  const VectorXd qdd = MassMatrix(model, state.q).llt().solve(tau - bias - passive);
  ArmState next;
  next.qd = state.qd + dt * qdd;
  next.q = state.q + dt * next.qd;
  next.t = state.t + dt;
  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[static_cast<std::size_t>(i)];
    if (next.q[i] < j.lower || next.q[i] > j.upper) {
      next.q[i] = std::clamp(next.q[i], j.lower, j.upper);
      next.qd[i] = 0.0;
    }
  }
  if (!next.q.allFinite() || !next.qd.allFinite()) {
    throw NumericError("arm state became non-finite at t = " + std::to_string(next.t));
  }
  return next;
}

}  // namespace maif::armsim
