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

#include "maif/aif/inference.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "maif/error.h"

namespace maif::aif {
namespace {

using mvae::ToTensor;
using mvae::ToVector;

void CheckPositive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("variance ") + name + " must be positive and finite");
  }
}

void CheckPositive(const VectorXd& v, int joints, const char* name) {
  if (v.size() != joints) {
    throw ConfigError(std::string("variance ") + name + " needs one entry per joint");
  }
  for (int i = 0; i < v.size(); ++i) CheckPositive(v[i], name);
}

void CheckJoints(const mvae::GenerativeModel& model, const VectorXd& v, const char* what) {
  if (v.size() != model.config.joints) {
    throw ShapeError(std::string(what) + " has " + std::to_string(v.size()) +
                     " entries, model has " + std::to_string(model.config.joints) + " joints");
  }
}

Tensor Residual(const Tensor& target, const Tensor& prediction, double scale) {
  if (target.shape() != prediction.shape()) {
    throw ShapeError("image shape " + diffnet::ToString(target.shape()) +
                     " does not match the decoder output " + diffnet::ToString(prediction.shape()));
  }
  Tensor r = target - prediction;
  r *= scale;
  return r;
}

double WeightedSquare(const VectorXd& e, const VectorXd& variance) {
  return (e.array().square() / variance.array()).sum();
}

}  // namespace

Variances Variances::FromModel(const mvae::GenerativeModel& model) {
  Variances v;
  v.q = model.joint_variance;
  v.v = model.image_variance;
  return v;
}

void Variances::Validate(int joints) const {
  CheckPositive(q, joints, "Sigma_q");
  CheckPositive(v, "Sigma_v");
  CheckPositive(mu, "Sigma_mu");
  CheckPositive(mu_prime, "Sigma_mu'");
  CheckPositive(qdot, "Sigma_qdot");
  if (goal_q) CheckPositive(*goal_q, joints, "goal Sigma_q");
  if (goal_v) CheckPositive(*goal_v, "goal Sigma_v");
}

void Gains::Validate() const {
  for (double k : {k_mu, k_q, k_v, k_a}) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("gains must be finite and >= 0");
  }
}

GoalSpec GoalSpec::FromJoints(const armsim::ArmModel& arm, const armsim::CameraOptions& camera,
                              const VectorXd& q_d) {
  if (q_d.size() != arm.dof()) throw ShapeError("goal has the wrong number of joints");
  for (int i = 0; i < q_d.size(); ++i) {
    const armsim::Joint& j = arm.joints[static_cast<std::size_t>(i)];
    if (!(q_d[i] >= j.lower && q_d[i] <= j.upper)) {
      throw ConfigError("goal joint " + std::to_string(i) + " is outside the joint limits");
    }
  }
  return {q_d, std::make_shared<const Tensor>(armsim::Render(arm, q_d, camera))};
}

Decoded Decode(const mvae::GenerativeModel& model, const VectorXd& z) {
  return {mvae::DecodeJoints(model, z), mvae::DecodeImage(model, z)};
}

LatentFlow LatentUpdate(const mvae::GenerativeModel& model, const VectorXd& z,
                        const VectorXd& q_meas, const Tensor& image, const GoalSpec& goal,
                        const Gains& gains, const Variances& variances) {
  CheckJoints(model, q_meas, "joint measurement");
  CheckJoints(model, goal.q, "goal");
  const Tensor zt = ToTensor(z);
  auto fq = model.decoder_q.Forward(zt);
  auto fv = model.decoder_v.Forward(zt);
  LatentFlow flow;
  flow.decoded.s_q = ToVector(fq.output);
  flow.decoded.s_v = fv.output;

  const VectorXd up_q = (q_meas - flow.decoded.s_q).cwiseQuotient(variances.q);
  const VectorXd up_qd = (goal.q - flow.decoded.s_q).cwiseQuotient(variances.goal_q_or_q());
  const std::vector<Tensor> q_ups = {ToTensor(up_q), ToTensor(up_qd)};
  const std::vector<Tensor> gq = model.decoder_q.BackwardInput(fq.tape, q_ups);

  const std::vector<Tensor> v_ups = {Residual(image, fv.output, 1.0 / variances.v),
                                     Residual(*goal.image, fv.output, 1.0 / variances.goal_v_or_v())};
  const std::vector<Tensor> gv = model.decoder_v.BackwardInput(fv.tape, v_ups);

  flow.sensory_q = gains.k_q * ToVector(gq[0]);
  flow.goal_q = gains.k_q * ToVector(gq[1]);
  flow.sensory_v = gains.k_v * ToVector(gv[0]);
  flow.goal_v = gains.k_v * ToVector(gv[1]);
  return flow;
}

LatentFlow GoalFlow(const mvae::GenerativeModel& model, const VectorXd& z, const GoalSpec& goal,
                    const Gains& gains, const Variances& variances) {
  CheckJoints(model, goal.q, "goal");
  const Tensor zt = ToTensor(z);
  auto fq = model.decoder_q.Forward(zt);
  auto fv = model.decoder_v.Forward(zt);
  LatentFlow flow;
  flow.decoded.s_q = ToVector(fq.output);
  flow.decoded.s_v = fv.output;
  const VectorXd up_qd = (goal.q - flow.decoded.s_q).cwiseQuotient(variances.goal_q_or_q());
  flow.goal_q = gains.k_q * ToVector(model.decoder_q.BackwardInput(fq.tape, ToTensor(up_qd)));
  flow.goal_v = gains.k_v * ToVector(model.decoder_v.BackwardInput(
                                fv.tape, Residual(*goal.image, fv.output, 1.0 / variances.goal_v_or_v())));
  flow.sensory_q = VectorXd::Zero(z.size());
  flow.sensory_v = VectorXd::Zero(z.size());
  return flow;
}

BeliefFlow BeliefUpdate(const ProprioBelief& belief, const VectorXd& qdot_meas,
                        const VectorXd& q_d, const Gains& gains, const Variances& variances) {
  const VectorXd& mu = belief.mu;
  const VectorXd& mp = belief.mu_p;
  const VectorXd& mpp = belief.mu_pp;
  if (mp.size() != mu.size() || mpp.size() != mu.size() || qdot_meas.size() != mu.size() ||
      q_d.size() != mu.size()) {
    throw ShapeError("belief update: joint vectors differ in size");
  }
  BeliefFlow flow;
  flow.shift = mpp;
  flow.velocity = (gains.k_mu / variances.qdot) * (qdot_meas - mp);
  flow.attractor = (-gains.k_mu / variances.mu) * (mp + mu - q_d);
  flow.smoothness = (-gains.k_mu / variances.mu_prime) * (mpp + mp);
  flow.mu_pp_dot = flow.smoothness;
  return flow;
}

ActionFlow ActionUpdate(const VectorXd& q_meas, const VectorXd& qdot_meas,
                        const ProprioBelief& belief, const Gains& gains,
                        const Variances& variances) {
  if (q_meas.size() != belief.mu.size() || qdot_meas.size() != belief.mu.size() ||
      belief.mu_p.size() != belief.mu.size() || variances.q.size() != belief.mu.size()) {
    throw ShapeError("action update: joint vectors differ in size");
  }
  ActionFlow flow;
  flow.position = -gains.k_a * (q_meas - belief.mu).cwiseQuotient(variances.q);
  flow.velocity = (-gains.k_a / variances.mu_prime) * (qdot_meas - belief.mu_p);
  return flow;
}

FreeEnergyTerms FreeEnergy(const VectorXd& q_meas, const VectorXd& qdot_meas, const Tensor& image,
                           const Decoded& decoded, const ProprioBelief& belief,
                           const GoalSpec& goal, const Variances& variances) {
  const Eigen::Index n = q_meas.size();
  if (decoded.s_q.size() != n || qdot_meas.size() != n || goal.q.size() != n ||
      belief.mu_p.size() != n || belief.mu_pp.size() != n || belief.mu.size() != n) {
    throw ShapeError("free energy: joint vectors differ in size");
  }
  if (image.shape() != decoded.s_v.shape() || goal.image->shape() != decoded.s_v.shape()) {
    throw ShapeError("free energy: image shapes differ");
  }
  const VectorXd& gq = variances.goal_q_or_q();
  const double gv = variances.goal_v_or_v();
  const auto pixels = static_cast<double>(image.size());
  FreeEnergyTerms f;
  f.sensory_q = WeightedSquare(q_meas - decoded.s_q, variances.q);
  f.sensory_qdot = (qdot_meas - belief.mu_p).squaredNorm() / variances.qdot;
  f.sensory_v = diffnet::SquaredNorm(image - decoded.s_v) / variances.v;
  f.goal_q = WeightedSquare(goal.q - decoded.s_q, gq);
  f.goal_v = diffnet::SquaredNorm(*goal.image - decoded.s_v) / gv;
  f.belief_attractor = (belief.mu_p + belief.mu - goal.q).squaredNorm() / variances.mu;
  f.belief_smoothness = (belief.mu_pp + belief.mu_p).squaredNorm() / variances.mu_prime;
  const auto dn = static_cast<double>(n);
  f.log_det_x = 0.5 * (variances.q.array().log().sum() + dn * std::log(variances.qdot) +
                       pixels * std::log(variances.v));
  f.log_det_z = 0.5 * (gq.array().log().sum() + pixels * std::log(gv) +
                       dn * std::log(variances.mu) + dn * std::log(variances.mu_prime));
  if (!std::isfinite(f.total())) {
    std::ostringstream s;
    s << "non-finite free energy: sensory_q " << f.sensory_q << ", sensory_qdot "
      << f.sensory_qdot << ", sensory_v " << f.sensory_v << ", goal_q " << f.goal_q
      << ", goal_v " << f.goal_v << ", belief_attractor " << f.belief_attractor
      << ", belief_smoothness " << f.belief_smoothness << ", log_det_x " << f.log_det_x
      << ", log_det_z " << f.log_det_z;
    throw NumericError(s.str());
  }
  return f;
}

FreeEnergyTerms FreeEnergy(const armsim::SensorFrame& frame, const VectorXd& z,
                           const ProprioBelief& belief, const GoalSpec& goal,
                           const Variances& variances, const mvae::GenerativeModel& model) {
  if (!frame.image) throw ShapeError("sensor frame has no image");
  return FreeEnergy(frame.q, frame.qd, *frame.image, Decode(model, z), belief, goal, variances);
}

}  // namespace maif::aif
