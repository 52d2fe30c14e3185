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

#ifndef MAIF_AIF_CONTROLLERS_H_
#define MAIF_AIF_CONTROLLERS_H_

#include <memory>
#include <string>

#include "maif/aif/inference.h"
#include "maif/armsim/arm.h"
#include "maif/armsim/sensors.h"
#include "maif/config.h"
#include "maif/mvae/model.h"

namespace maif::aif {

enum class Mode { kMaif, kPaif, kPd, kMental };

std::string ToString(Mode mode);
Mode ParseMode(const std::string& text);

// Everything that parameterises a controller. Serialised through
// ToConfig/ControllerFromConfig; the bench hashes that text to detect
// retuning between experiments.
struct ControllerConfig {
  Mode mode = Mode::kMaif;
  Gains gains;
  // Sigma_q, Sigma_v from the model when unset.
  std::optional<VectorXd> sigma_q;
  std::optional<double> sigma_v;
  double sigma_mu = 2.5;
  double sigma_mu_prime = 1.0;
  // Sigma_qdot; defaults to sigma_mu_prime when unset.
  std::optional<double> sigma_qdot;
  std::optional<VectorXd> sigma_goal_q;
  std::optional<double> sigma_goal_v;
  // Longest Euler step of the internal states, s. A control period longer
  // than this is split into equal substeps against the same observation;
  // 0 means one step per control period.
  double integration_dt = 0.0;
  // Replace every camera image with zeros before the controller sees it.
  bool occlude = false;
  // PD gains, one value per joint or a single value for all. The defaults
  // are tuned for the desk arm.
  VectorXd kp = (VectorXd(3) << 150.0, 60.0, 15.0).finished();
  VectorXd kd = (VectorXd(3) << 15.0, 6.0, 2.0).finished();
  // Gravity assumed by the PD gravity compensation; stays at the nominal
  // value when the world changes.
  double pd_gravity = 9.81;

  Variances ResolveVariances(const mvae::GenerativeModel* model, int joints) const;
};

// Keys: controller.mode, gains.k_mu, gains.k_q, gains.k_v, gains.k_a,
// variance.q, variance.v, variance.mu, variance.mu_prime, variance.qdot,
// variance.goal_q, variance.goal_v, controller.integration_dt,
// controller.occlude, pd.kp, pd.kd, pd.gravity. Unset optional variances are omitted.
KeyValueConfig ToConfig(const ControllerConfig& config);
ControllerConfig ControllerFromConfig(const KeyValueConfig& config);

// Per-tick internals. Vectors hold the raw terms; the bench reduces them to
// norms for logging.
struct TickDiagnostics {
  FreeEnergyTerms free_energy;
  LatentFlow latent;
  BeliefFlow belief_flow;
  ActionFlow action;
  ProprioBelief belief;  // before the update
  VectorXd z;            // before the update
  bool image_blank = false;  // the image used was all zeros
  bool safe_stop = false;
  std::string safe_stop_reason;
};

struct TickResult {
  VectorXd torque;
  TickDiagnostics diagnostics;
};

// Multimodal active inference torque controller.
class MaifController {
 public:
  MaifController(std::shared_ptr<const mvae::GenerativeModel> model, const ControllerConfig& config,
                 const armsim::ArmModel& arm);

  // z from encoding the first frame, mu' = mu'' = 0, a = 0.
  void Reset(const armsim::SensorFrame& first);
  // Decode, backprop the four errors, update beliefs and action, then an
  // Euler step of [z, mu', mu'', a] of length dt (or several substeps, see
  // integration_dt). Diagnostics describe the first substep. A non-finite
  // state latches a safe stop: zero torque from then on.
  TickResult Tick(const armsim::SensorFrame& frame, const GoalSpec& goal, double dt);

  const VectorXd& z() const { return z_; }
  const ProprioBelief& belief() const { return belief_; }
  const VectorXd& torque() const { return a_; }
  bool safe_stopped() const { return safe_stopped_; }
  const Variances& variances() const { return variances_; }
  const mvae::GenerativeModel& model() const { return *model_; }

  // Overwrites the internal state, e.g. to start from a known belief.
  void SetState(const VectorXd& z, const VectorXd& mu_p, const VectorXd& mu_pp, const VectorXd& a);

 private:
  void Step(const armsim::SensorFrame& frame, const GoalSpec& goal, double h, TickDiagnostics& d);

  std::shared_ptr<const mvae::GenerativeModel> model_;
  Gains gains_;
  Variances variances_;
  armsim::ArmModel arm_;
  bool occlude_;
  double integration_dt_;
  VectorXd z_;
  ProprioBelief belief_;
  VectorXd a_;
  bool initialized_ = false;
  bool safe_stopped_ = false;
};

// One step of the model run without sensations: z follows the goal terms
// only, and the new z is decoded into imagined joints and image.
struct MentalStep {
  VectorXd z;
  VectorXd q;
  Tensor image;
};

MentalStep MentalTick(const VectorXd& z, const GoalSpec& goal, const Gains& gains,
                      const Variances& variances, const mvae::GenerativeModel& model, double dt);

// Proprioceptive-only active inference: mu is a free state,
//   mu-dot = mu' + k_mu (Sigma_q^-1 (q - mu) - Sigma_mu^-1 (mu' + mu - q_d)),
// with the same mu', mu'' and action laws as the multimodal controller.
class PaifController {
 public:
  PaifController(const ControllerConfig& config, const Variances& variances,
                 const armsim::ArmModel& arm);

  // mu = q, mu' = mu'' = 0, a = 0.
  void Reset(const armsim::SensorFrame& first);
  TickResult Tick(const armsim::SensorFrame& frame, const GoalSpec& goal, double dt);

  const ProprioBelief& belief() const { return belief_; }
  const VectorXd& torque() const { return a_; }
  bool safe_stopped() const { return safe_stopped_; }

 private:
  void Step(const armsim::SensorFrame& frame, const GoalSpec& goal, double h, TickDiagnostics& d);

  Gains gains_;
  Variances variances_;
  armsim::ArmModel arm_;
  double integration_dt_;
  ProprioBelief belief_;
  VectorXd a_;
  bool initialized_ = false;
  bool safe_stopped_ = false;
};

// tau = Kp (q_d - q) - Kd qdot + G(q), using the controller's own (nominal)
// arm model for the gravity term.
VectorXd PdTorque(const VectorXd& q_meas, const VectorXd& qdot_meas, const VectorXd& q_d,
                  const VectorXd& kp, const VectorXd& kd, const armsim::ArmModel& nominal);

class PdController {
 public:
  PdController(const ControllerConfig& config, const armsim::ArmModel& nominal);
  VectorXd Tick(const armsim::SensorFrame& frame, const GoalSpec& goal) const;

  const VectorXd& kp() const { return kp_; }
  const VectorXd& kd() const { return kd_; }

 private:
  VectorXd kp_;
  VectorXd kd_;
  armsim::ArmModel nominal_;
};

}  // namespace maif::aif

#endif  // MAIF_AIF_CONTROLLERS_H_
