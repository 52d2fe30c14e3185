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

#ifndef MAIF_ARMSIM_ARM_H_
#define MAIF_ARMSIM_ARM_H_

#include <vector>

#include <Eigen/Core>

namespace maif::armsim {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

struct Link {
  double length = 0.4;  // m
  double mass = 1.0;    // kg
  double com = 0.2;     // distance of the centre of mass from the joint, m
};

struct Joint {
  double damping = 0.0;       // N*m*s/rad
  double stiffness = 0.0;     // N*m/rad, spring toward the zero pose
  double torque_limit = 100;  // N*m
  double lower = -2.9;        // rad
  double upper = 2.9;         // rad
};

// Planar serial chain of revolute joints. The plane's x axis points up,
// against gravity; q = 0 is the arm straight up and positive angles rotate
// from +x toward +y. Links are uniform rods for inertia purposes.
struct ArmModel {
  std::vector<Link> links;
  std::vector<Joint> joints;
  double gravity = 9.81;  // m/s^2

  int dof() const { return static_cast<int>(links.size()); }
  double reach() const;
  double link_inertia(int i) const;  // about the link's own centre of mass

  // Throws ConfigError on non-positive lengths/masses or negative damping.
  void Validate() const;

  // Desk-scale 3-DOF arm used by every experiment.
  static ArmModel Desk3();
  // n identical links sharing the desk arm's joint settings.
  static ArmModel Uniform(int dof, double total_length);
};

struct ArmState {
  VectorXd q;
  VectorXd qd;
  double t = 0.0;

  static ArmState AtRest(const VectorXd& q);
};

// tau = M(q) qdd + C(q, qd) qd + G(q), without joint springs or damping.
VectorXd InverseDynamics(const ArmModel& model, const VectorXd& q,
                         const VectorXd& qd, const VectorXd& qdd, double gravity);
MatrixXd MassMatrix(const ArmModel& model, const VectorXd& q);
VectorXd GravityTorque(const ArmModel& model, const VectorXd& q);
double KineticEnergy(const ArmModel& model, const VectorXd& q, const VectorXd& qd);

// Joint positions p_0 (base) .. p_n (end effector).
std::vector<Vector2d> JointPositions(const ArmModel& model, const VectorXd& q);
Vector2d ForwardKinematics(const ArmModel& model, const VectorXd& q);

VectorXd ClampTorque(const ArmModel& model, const VectorXd& torque);

// Semi-implicit Euler step of
//   M(q) qdd + C(q, qd) qd + G(q) + K q + D qd = tau.
// Torques are clamped to the joint limits; a joint that hits an angle stop is
// held there with zero velocity. Throws NumericError on a non-finite state.
ArmState Step(const ArmModel& model, const ArmState& state, const VectorXd& torque,
              double dt);

}  // namespace maif::armsim

#endif  // MAIF_ARMSIM_ARM_H_
