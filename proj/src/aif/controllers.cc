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

#include "maif/aif/controllers.h"

#include <algorithm>
#include <cmath>
#include <exception>

#include "maif/error.h"

namespace maif::aif {
namespace {

VectorXd Broadcast(const VectorXd& v, int joints, const char* name) {
  if (v.size() == joints) return v;
  if (v.size() == 1) return VectorXd::Constant(joints, v[0]);
  throw ConfigError(std::string(name) + " needs 1 or " + std::to_string(joints) + " values");
}

std::vector<double> ToList(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd FromList(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool Finite(const VectorXd& v) { return v.allFinite(); }

int Substeps(double dt, double integration_dt) {
  if (integration_dt <= 0.0 || dt <= integration_dt) return 1;
  return static_cast<int>(std::ceil(dt / integration_dt - 1e-9));
}

// Proprioceptive part of the free energy, for the controller without vision.
FreeEnergyTerms ProprioFreeEnergy(const VectorXd& q, const VectorXd& qd, const ProprioBelief& b,
                                  const VectorXd& q_d, const Variances& var) {
  FreeEnergyTerms f;
  f.sensory_q = ((q - b.mu).array().square() / var.q.array()).sum();
  f.sensory_qdot = (qd - b.mu_p).squaredNorm() / var.qdot;
  f.belief_attractor = (b.mu_p + b.mu - q_d).squaredNorm() / var.mu;
  f.belief_smoothness = (b.mu_pp + b.mu_p).squaredNorm() / var.mu_prime;
  const auto n = static_cast<double>(q.size());
  f.log_det_x = 0.5 * (var.q.array().log().sum() + n * std::log(var.qdot));
  f.log_det_z = 0.5 * n * (std::log(var.mu) + std::log(var.mu_prime));
  return f;
}

}  // namespace

std::string ToString(Mode mode) {
  switch (mode) {
    case Mode::kMaif:
      return "maif";
    case Mode::kPaif:
      return "paif";
    case Mode::kPd:
      return "pd";
    case Mode::kMental:
      return "mental";
  }
  return "?";
}

Mode ParseMode(const std::string& text) {
  for (Mode m : {Mode::kMaif, Mode::kPaif, Mode::kPd, Mode::kMental}) {
    if (ToString(m) == text) return m;
  }
  throw ConfigError("unknown controller mode '" + text + "'");
}

Variances ControllerConfig::ResolveVariances(const mvae::GenerativeModel* model, int joints) const {
  Variances v;
  if (sigma_q) {
    v.q = Broadcast(*sigma_q, joints, "variance.q");
  } else if (model) {
    v.q = model->joint_variance;
  } else {
    throw ConfigError("variance.q is unset and no model provides it");
  }
  if (sigma_v) {
    v.v = *sigma_v;
  } else if (model) {
    v.v = model->image_variance;
  }
  v.mu = sigma_mu;
  v.mu_prime = sigma_mu_prime;
  v.qdot = sigma_qdot.value_or(sigma_mu_prime);
  if (sigma_goal_q) v.goal_q = Broadcast(*sigma_goal_q, joints, "variance.goal_q");
  v.goal_v = sigma_goal_v;
  v.Validate(joints);
  return v;
}

KeyValueConfig ToConfig(const ControllerConfig& c) {
  KeyValueConfig k;
  k.Set("controller.mode", ToString(c.mode));
  k.Set("controller.integration_dt", c.integration_dt);
  k.Set("controller.occlude", c.occlude);
  k.Set("gains.k_mu", c.gains.k_mu);
  k.Set("gains.k_q", c.gains.k_q);
  k.Set("gains.k_v", c.gains.k_v);
  k.Set("gains.k_a", c.gains.k_a);
  if (c.sigma_q) k.Set("variance.q", ToList(*c.sigma_q));
  if (c.sigma_v) k.Set("variance.v", *c.sigma_v);
  k.Set("variance.mu", c.sigma_mu);
  k.Set("variance.mu_prime", c.sigma_mu_prime);
  if (c.sigma_qdot) k.Set("variance.qdot", *c.sigma_qdot);
  if (c.sigma_goal_q) k.Set("variance.goal_q", ToList(*c.sigma_goal_q));
  if (c.sigma_goal_v) k.Set("variance.goal_v", *c.sigma_goal_v);
  k.Set("pd.kp", ToList(c.kp));
  k.Set("pd.kd", ToList(c.kd));
  k.Set("pd.gravity", c.pd_gravity);
  return k;
}

ControllerConfig ControllerFromConfig(const KeyValueConfig& k) {
  ControllerConfig c;
  c.mode = ParseMode(k.GetString("controller.mode", ToString(c.mode)));
  c.integration_dt = k.GetDouble("controller.integration_dt", c.integration_dt);
  c.occlude = k.GetBool("controller.occlude", c.occlude);
  c.gains.k_mu = k.GetDouble("gains.k_mu", c.gains.k_mu);
  c.gains.k_q = k.GetDouble("gains.k_q", c.gains.k_q);
  c.gains.k_v = k.GetDouble("gains.k_v", c.gains.k_v);
  c.gains.k_a = k.GetDouble("gains.k_a", c.gains.k_a);
  if (k.Has("variance.q")) c.sigma_q = FromList(k.GetDoubles("variance.q"));
  if (k.Has("variance.v")) c.sigma_v = k.GetDouble("variance.v");
  c.sigma_mu = k.GetDouble("variance.mu", c.sigma_mu);
  c.sigma_mu_prime = k.GetDouble("variance.mu_prime", c.sigma_mu_prime);
  if (k.Has("variance.qdot")) c.sigma_qdot = k.GetDouble("variance.qdot");
  if (k.Has("variance.goal_q")) c.sigma_goal_q = FromList(k.GetDoubles("variance.goal_q"));
  if (k.Has("variance.goal_v")) c.sigma_goal_v = k.GetDouble("variance.goal_v");
  if (k.Has("pd.kp")) c.kp = FromList(k.GetDoubles("pd.kp"));
  if (k.Has("pd.kd")) c.kd = FromList(k.GetDoubles("pd.kd"));
  c.pd_gravity = k.GetDouble("pd.gravity", c.pd_gravity);
  c.gains.Validate();
  if (!(c.integration_dt >= 0.0)) throw ConfigError("controller.integration_dt must be >= 0");
  return c;
}

MaifController::MaifController(std::shared_ptr<const mvae::GenerativeModel> model,
                               const ControllerConfig& config, const armsim::ArmModel& arm)
    : model_(std::move(model)),
      gains_(config.gains),
      arm_(arm),
      occlude_(config.occlude),
      integration_dt_(config.integration_dt) {
  if (!model_) throw ConfigError("the multimodal controller needs a model");
  model_->Validate();
  if (model_->config.joints != arm.dof()) throw ShapeError("model and arm differ in joint count");
  gains_.Validate();
  variances_ = config.ResolveVariances(model_.get(), arm.dof());
}

void MaifController::Reset(const armsim::SensorFrame& first) {
  const armsim::SensorFrame frame = occlude_ ? armsim::Occlude(first) : first;
  if (!frame.image) throw ShapeError("sensor frame has no image");
  z_ = mvae::Encode(*model_, frame.q, *frame.image);
  const int n = arm_.dof();
  belief_.mu = mvae::DecodeJoints(*model_, z_);
  belief_.mu_p = VectorXd::Zero(n);
  belief_.mu_pp = VectorXd::Zero(n);
  a_ = VectorXd::Zero(n);
  initialized_ = true;
  safe_stopped_ = false;
}

void MaifController::SetState(const VectorXd& z, const VectorXd& mu_p, const VectorXd& mu_pp,
                              const VectorXd& a) {
  const int n = arm_.dof();
  if (z.size() != model_->config.latent_dim || mu_p.size() != n || mu_pp.size() != n ||
      a.size() != n) {
    throw ShapeError("controller state has the wrong size");
  }
  z_ = z;
  belief_.mu = mvae::DecodeJoints(*model_, z_);
  belief_.mu_p = mu_p;
  belief_.mu_pp = mu_pp;
  a_ = armsim::ClampTorque(arm_, a);
  initialized_ = true;
  safe_stopped_ = false;
}

TickResult MaifController::Tick(const armsim::SensorFrame& raw, const GoalSpec& goal, double dt) {
  if (!(dt > 0.0)) throw ConfigError("controller step needs dt > 0");
  if (!initialized_) Reset(raw);
  TickResult result;
  TickDiagnostics& d = result.diagnostics;
  if (safe_stopped_) {
    result.torque = VectorXd::Zero(arm_.dof());
    d.safe_stop = true;
    d.safe_stop_reason = "latched";
    return result;
  }
  const armsim::SensorFrame frame = occlude_ ? armsim::Occlude(raw) : raw;
  try {
    if (!frame.image) throw ShapeError("sensor frame has no image");
    if (!Finite(frame.q) || !Finite(frame.qd)) throw NumericError("non-finite measurement");
    const int n = Substeps(dt, integration_dt_);
    TickDiagnostics scratch;
    for (int i = 0; i < n; ++i) Step(frame, goal, dt / n, i == 0 ? d : scratch);
    const auto& pixels = frame.image->data();
    d.image_blank = std::all_of(pixels.begin(), pixels.end(), [](double v) { return v == 0.0; });
    result.torque = a_;
  } catch (const NumericError& e) {
    safe_stopped_ = true;
    d.safe_stop = true;
    d.safe_stop_reason = e.what();
    result.torque = VectorXd::Zero(arm_.dof());
  }
  return result;
}

void MaifController::Step(const armsim::SensorFrame& frame, const GoalSpec& goal, double h,
                          TickDiagnostics& d) {
  d.z = z_;
  d.belief = belief_;
  d.latent = LatentUpdate(*model_, z_, frame.q, *frame.image, goal, gains_, variances_);
  d.belief.mu = d.latent.decoded.s_q;
  d.belief_flow = BeliefUpdate(d.belief, frame.qd, goal.q, gains_, variances_);
  d.action = ActionUpdate(frame.q, frame.qd, d.belief, gains_, variances_);
  d.free_energy =
      FreeEnergy(frame.q, frame.qd, *frame.image, d.latent.decoded, d.belief, goal, variances_);

  VectorXd z = z_ + h * d.latent.total();
  VectorXd mu_p = belief_.mu_p + h * d.belief_flow.mu_p_dot();
  VectorXd mu_pp = belief_.mu_pp + h * d.belief_flow.mu_pp_dot;
  VectorXd a = a_ + h * d.action.total();
  if (!Finite(z) || !Finite(mu_p) || !Finite(mu_pp) || !Finite(a)) {
    throw NumericError("controller state became non-finite");
  }
  z_ = std::move(z);
  belief_.mu = mvae::DecodeJoints(*model_, z_);
  belief_.mu_p = std::move(mu_p);
  belief_.mu_pp = std::move(mu_pp);
  a_ = armsim::ClampTorque(arm_, a);
}

MentalStep MentalTick(const VectorXd& z, const GoalSpec& goal, const Gains& gains,
                      const Variances& variances, const mvae::GenerativeModel& model, double dt) {
  if (!(dt > 0.0)) throw ConfigError("mental step needs dt > 0");
  const LatentFlow flow = GoalFlow(model, z, goal, gains, variances);
  MentalStep step;
  step.z = z + dt * (flow.goal_q + flow.goal_v);
  if (!Finite(step.z)) throw NumericError("imagined latent state became non-finite");
  const Decoded decoded = Decode(model, step.z);
  step.q = decoded.s_q;
  step.image = decoded.s_v;
  return step;
}

PaifController::PaifController(const ControllerConfig& config, const Variances& variances,
                               const armsim::ArmModel& arm)
    : gains_(config.gains),
      variances_(variances),
      arm_(arm),
      integration_dt_(config.integration_dt) {
  gains_.Validate();
  variances_.Validate(arm.dof());
}

void PaifController::Reset(const armsim::SensorFrame& first) {
  const int n = arm_.dof();
  if (first.q.size() != n) throw ShapeError("frame does not match the arm");
  belief_.mu = first.q;
  belief_.mu_p = VectorXd::Zero(n);
  belief_.mu_pp = VectorXd::Zero(n);
  a_ = VectorXd::Zero(n);
  initialized_ = true;
  safe_stopped_ = false;
}

TickResult PaifController::Tick(const armsim::SensorFrame& frame, const GoalSpec& goal, double dt) {
  if (!(dt > 0.0)) throw ConfigError("controller step needs dt > 0");
  if (!initialized_) Reset(frame);
  TickResult result;
  TickDiagnostics& d = result.diagnostics;
  if (safe_stopped_) {
    result.torque = VectorXd::Zero(arm_.dof());
    d.safe_stop = true;
    d.safe_stop_reason = "latched";
    return result;
  }
  try {
    if (!Finite(frame.q) || !Finite(frame.qd)) throw NumericError("non-finite measurement");
    const int n = Substeps(dt, integration_dt_);
    TickDiagnostics scratch;
    for (int i = 0; i < n; ++i) Step(frame, goal, dt / n, i == 0 ? d : scratch);
    result.torque = a_;
  } catch (const NumericError& e) {
    safe_stopped_ = true;
    d.safe_stop = true;
    d.safe_stop_reason = e.what();
    result.torque = VectorXd::Zero(arm_.dof());
  }
  return result;
}

void PaifController::Step(const armsim::SensorFrame& frame, const GoalSpec& goal, double h,
                          TickDiagnostics& d) {
  d.belief = belief_;
  const VectorXd mu_dot =
      belief_.mu_p + gains_.k_mu * ((frame.q - belief_.mu).cwiseQuotient(variances_.q) -
                                    (belief_.mu_p + belief_.mu - goal.q) / variances_.mu);
  d.belief_flow = BeliefUpdate(belief_, frame.qd, goal.q, gains_, variances_);
  d.action = ActionUpdate(frame.q, frame.qd, belief_, gains_, variances_);
  d.free_energy = ProprioFreeEnergy(frame.q, frame.qd, belief_, goal.q, variances_);
  ProprioBelief next;
  next.mu = belief_.mu + h * mu_dot;
  next.mu_p = belief_.mu_p + h * d.belief_flow.mu_p_dot();
  next.mu_pp = belief_.mu_pp + h * d.belief_flow.mu_pp_dot;
  VectorXd a = a_ + h * d.action.total();
  if (!Finite(next.mu) || !Finite(next.mu_p) || !Finite(next.mu_pp) || !Finite(a)) {
    throw NumericError("controller state became non-finite");
  }
  belief_ = std::move(next);
  a_ = armsim::ClampTorque(arm_, a);
}

VectorXd PdTorque(const VectorXd& q_meas, const VectorXd& qdot_meas, const VectorXd& q_d,
                  const VectorXd& kp, const VectorXd& kd, const armsim::ArmModel& nominal) {
  if (q_meas.size() != nominal.dof() || qdot_meas.size() != nominal.dof() ||
      q_d.size() != nominal.dof() || kp.size() != nominal.dof() || kd.size() != nominal.dof()) {
    throw ShapeError("PD: vector sizes do not match the arm");
  }
  const VectorXd tau = kp.cwiseProduct(q_d - q_meas) - kd.cwiseProduct(qdot_meas) +
                       armsim::GravityTorque(nominal, q_meas);
  return armsim::ClampTorque(nominal, tau);
}

PdController::PdController(const ControllerConfig& config, const armsim::ArmModel& nominal)
    : kp_(Broadcast(config.kp, nominal.dof(), "pd.kp")),
      kd_(Broadcast(config.kd, nominal.dof(), "pd.kd")),
      nominal_(nominal) {
  for (int i = 0; i < kp_.size(); ++i) {
    if (!(kp_[i] >= 0.0) || !(kd_[i] >= 0.0)) throw ConfigError("PD gains must be >= 0");
  }
}

VectorXd PdController::Tick(const armsim::SensorFrame& frame, const GoalSpec& goal) const {
  return PdTorque(frame.q, frame.qd, goal.q, kp_, kd_, nominal_);
}

}  // namespace maif::aif
