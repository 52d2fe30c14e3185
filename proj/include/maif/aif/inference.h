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

#ifndef MAIF_AIF_INFERENCE_H_
#define MAIF_AIF_INFERENCE_H_

// Free energy and the gradient flows of the multimodal controller. All
// covariance parameters are variances (Sigma), not precisions; each flow
// divides by them.

#include <memory>
#include <optional>

#include "maif/armsim/arm.h"
#include "maif/armsim/render.h"
#include "maif/armsim/sensors.h"
#include "maif/diffnet/tensor.h"
#include "maif/mvae/model.h"

namespace maif::aif {

using armsim::VectorXd;
using diffnet::Tensor;

struct Variances {
  VectorXd q;              // Sigma_q, per joint
  double v = 1.0;          // Sigma_v, every pixel
  double mu = 2.5;         // Sigma_mu
  double mu_prime = 1.0;   // Sigma_mu'
  double qdot = 1.0;       // Sigma_qdot
  // Variances of the goal (dynamics) errors; unset means the sensory ones.
  std::optional<VectorXd> goal_q;
  std::optional<double> goal_v;

  // Sigma_q and Sigma_v from the training data statistics stored in the
  // model; the rest at their defaults.
  static Variances FromModel(const mvae::GenerativeModel& model);
  const VectorXd& goal_q_or_q() const { return goal_q ? *goal_q : q; }
  double goal_v_or_v() const { return goal_v ? *goal_v : v; }
  // Throws ConfigError unless every entry is positive and finite.
  void Validate(int joints) const;
};

struct Gains {
  double k_mu = 11.67;
  double k_q = 0.6;
  double k_v = 0.1;
  double k_a = 900.0;

  void Validate() const;
};

// Desired joints and the image the camera would see there.
struct GoalSpec {
  VectorXd q;
  std::shared_ptr<const Tensor> image;

  static GoalSpec FromJoints(const armsim::ArmModel& arm, const armsim::CameraOptions& camera,
                             const VectorXd& q_d);
};

// mu is always g_q(z); mu_p and mu_pp are integrated.
struct ProprioBelief {
  VectorXd mu;
  VectorXd mu_p;
  VectorXd mu_pp;
};

struct Decoded {
  VectorXd s_q;
  Tensor s_v;
};

Decoded Decode(const mvae::GenerativeModel& model, const VectorXd& z);

// Four contributions to z-dot, each a decoder backprop of a weighted error:
//   sensory_q = k_q dg_q/dz^T Sigma_q^-1 (q - g_q(z))
//   sensory_v = k_v dg_v/dz^T Sigma_v^-1 (I - g_v(z))
//   goal_q    = k_q dg_q/dz^T Sigma_q^-1 (q_d - g_q(z))
//   goal_v    = k_v dg_v/dz^T Sigma_v^-1 (I_d - g_v(z))
struct LatentFlow {
  VectorXd sensory_q;
  VectorXd sensory_v;
  VectorXd goal_q;
  VectorXd goal_v;
  Decoded decoded;  // g_q(z), g_v(z) at the evaluation point

  VectorXd total() const { return sensory_q + sensory_v + goal_q + goal_v; }
};

LatentFlow LatentUpdate(const mvae::GenerativeModel& model, const VectorXd& z,
                        const VectorXd& q_meas, const Tensor& image, const GoalSpec& goal,
                        const Gains& gains, const Variances& variances);

// Goal terms only, for running the model without sensations.
LatentFlow GoalFlow(const mvae::GenerativeModel& model, const VectorXd& z, const GoalSpec& goal,
                    const Gains& gains, const Variances& variances);

//   mu'-dot  = mu'' + k_mu (Sigma_qdot^-1 (qdot - mu') - Sigma_mu^-1 (mu' + mu - q_d)
//                           - Sigma_mu'^-1 (mu'' + mu'))
//   mu''-dot = -k_mu Sigma_mu'^-1 (mu'' + mu')
struct BeliefFlow {
  VectorXd shift;       // mu''
  VectorXd velocity;    // k_mu Sigma_qdot^-1 (qdot - mu')
  VectorXd attractor;   // -k_mu Sigma_mu^-1 (mu' + mu - q_d)
  VectorXd smoothness;  // -k_mu Sigma_mu'^-1 (mu'' + mu')
  VectorXd mu_pp_dot;

  VectorXd mu_p_dot() const { return shift + velocity + attractor + smoothness; }
};

BeliefFlow BeliefUpdate(const ProprioBelief& belief, const VectorXd& qdot_meas,
                        const VectorXd& q_d, const Gains& gains, const Variances& variances);

//   a-dot = -k_a (Sigma_q^-1 (q - mu) + Sigma_mu'^-1 (qdot - mu'))
struct ActionFlow {
  VectorXd position;
  VectorXd velocity;

  VectorXd total() const { return position + velocity; }
};

ActionFlow ActionUpdate(const VectorXd& q_meas, const VectorXd& qdot_meas,
                        const ProprioBelief& belief, const Gains& gains,
                        const Variances& variances);

// Laplace-form free energy with every additive term kept separately. The
// quadratic terms carry no 1/2; the log-determinant terms do.
struct FreeEnergyTerms {
  double sensory_q = 0.0;     // (q - g_q)' Sigma_q^-1 (q - g_q)
  double sensory_qdot = 0.0;  // (qdot - mu')' Sigma_qdot^-1 (qdot - mu')
  double sensory_v = 0.0;     // (I - g_v)' Sigma_v^-1 (I - g_v)
  double goal_q = 0.0;        // (q_d - g_q)' Sigma_q^-1 (q_d - g_q)
  double goal_v = 0.0;        // (I_d - g_v)' Sigma_v^-1 (I_d - g_v)
  double belief_attractor = 0.0;  // (mu' + mu - q_d)' Sigma_mu^-1 (...)
  double belief_smoothness = 0.0; // (mu'' + mu')' Sigma_mu'^-1 (...)
  double log_det_x = 0.0;     // 1/2 ln |Sigma_x|, sensory covariance
  double log_det_z = 0.0;     // 1/2 ln |Sigma_z|, dynamics covariance

  double sensory() const { return sensory_q + sensory_qdot + sensory_v; }
  double dynamics() const { return goal_q + goal_v + belief_attractor + belief_smoothness; }
  double total() const { return sensory() + dynamics() + log_det_x + log_det_z; }
};

// Throws NumericError listing the terms when the total is not finite.
FreeEnergyTerms FreeEnergy(const VectorXd& q_meas, const VectorXd& qdot_meas, const Tensor& image,
                           const Decoded& decoded, const ProprioBelief& belief,
                           const GoalSpec& goal, const Variances& variances);

FreeEnergyTerms FreeEnergy(const armsim::SensorFrame& frame, const VectorXd& z,
                           const ProprioBelief& belief, const GoalSpec& goal,
                           const Variances& variances, const mvae::GenerativeModel& model);

}  // namespace maif::aif

#endif  // MAIF_AIF_INFERENCE_H_
