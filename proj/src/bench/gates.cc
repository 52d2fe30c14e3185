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

#include "maif/bench/gates.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "maif/aif/inference.h"
#include "maif/bench/runner.h"
#include "maif/error.h"

namespace maif::bench {
namespace {

using diffnet::Activation;
using diffnet::Network;
using diffnet::Shape;
using diffnet::Tensor;

std::string Fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

Tensor RandomTensor(const Shape& shape, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor t(shape);
  for (double& v : t.data()) v = u(rng);
  return t;
}

struct LayerCase {
  Shape input;
  std::vector<diffnet::LayerSpec> layers;
};

std::vector<LayerCase> LayerCases() {
  using namespace diffnet;
  return {
      {{5}, {Dense(5, 4, Activation::kRelu)}},
      {{5}, {Dense(5, 3, Activation::kIdentity)}},
      {{6}, {Dense(6, 9, Activation::kTanhRelu, {1, 3, 3})}},
      {{2, 7, 7}, {Conv(2, 3, 3, 1, 1, Activation::kRelu)}},
      {{2, 8, 8}, {Conv(2, 2, 3, 2, 1, Activation::kIdentity)}},
      {{1, 6, 6}, {Conv(1, 2, 2, 1, 0, Activation::kTanhRelu)}},
      {{2, 4, 4}, {TransposedConv(2, 3, 4, 2, 1, Activation::kRelu)}},
      {{3, 3, 3}, {TransposedConv(3, 2, 4, 1, 2, Activation::kIdentity)}},
      {{1, 3, 3}, {TransposedConv(1, 1, 4, 4, 0, Activation::kTanhRelu)}},
      {{2, 6, 6}, {MaxPool(2, 2)}},
      {{2, 6, 6}, {AvgPool(2, 2)}},
      {{1, 7, 7}, {MaxPool(3, 2)}},
  };
}

void CheckNetwork(Network& net, std::mt19937_64& rng, double bias_scale,
                  diffnet::GradCheckReport& total) {
  net.Initialize(rng());
  for (diffnet::LayerParams& p : net.params()) {
    for (double& v : p.bias.data()) v = std::uniform_real_distribution<double>(-bias_scale, bias_scale)(rng);
  }
  const Tensor x = RandomTensor(net.input_shape(), rng);
  const Tensor u = RandomTensor(net.output_shape(), rng);
  diffnet::GradCheckOptions options;
  options.epsilon = kGradientEpsilon;
  options.relative_tolerance = kGradientTolerance;
  options.seed = rng();
  total.Merge(diffnet::CheckInputGradient(net, x, u, options));
  if (net.ParameterCount() > 0) total.Merge(diffnet::CheckParamGradient(net, x, u, options));
}

VectorXd UniformJoints(const std::vector<mvae::JointRange>& ranges, std::mt19937_64& rng) {
  VectorXd q(static_cast<Eigen::Index>(ranges.size()));
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    q[static_cast<Eigen::Index>(j)] =
        std::uniform_real_distribution<double>(ranges[j].lower, ranges[j].upper)(rng);
  }
  return q;
}

VectorXd Gaussian(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, scale);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

double RelativeGap(const VectorXd& a, const VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

bool Reached(const RunOutcome& o) {
  return !o.failed && o.ee_reach_time && *o.ee_reach_time <= kReachSeconds;
}

}  // namespace

std::string FormatGate(const GateResult& gate) {
  return std::string(gate.pass ? "PASS " : "FAIL ") + std::to_string(gate.criterion) + " " +
         gate.name + ": " + gate.detail;
}

GradientSuiteReport RunGradientSuite(const mvae::ModelConfig& config, int layer_repeats,
                                     int decoder_repeats, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GradientSuiteReport r;
  std::mt19937_64 rng(seed);
  for (int rep = 0; rep < layer_repeats; ++rep) {
    for (const LayerCase& c : LayerCases()) {
      Network net(c.input, c.layers);
      CheckNetwork(net, rng, 0.3, r.report);
      ++r.layer_instances;
    }
  }
  const mvae::Architecture arch = mvae::DefaultArchitecture(config);
  const Shape latent{static_cast<std::size_t>(config.latent_dim)};
  for (int rep = 0; rep < decoder_repeats; ++rep) {
    Network dq(latent, arch.decoder_q);
    CheckNetwork(dq, rng, 0.1, r.report);
    Network dv(latent, arch.decoder_v);
    CheckNetwork(dv, rng, 0.1, r.report);
    r.decoder_instances += 2;
  }
  r.instances = r.layer_instances + r.decoder_instances;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

GateResult GradientGate(const GradientSuiteReport& r) {
  GateResult g{1, "gradients", false, ""};
  g.pass = r.report.ok() && r.instances >= kGradientMinInstances && r.decoder_instances > 0 &&
           r.seconds < kGradientMaxSeconds;
  g.detail = std::to_string(r.instances) + " instances (" + std::to_string(r.decoder_instances) +
             " full decoders), " + std::to_string(r.report.checked) + " components, " +
             std::to_string(r.report.failed) + " failed, " + std::to_string(r.report.kinks) +
             " kinks skipped, max rel " + Fixed(r.report.max_relative_error, 3) + ", " +
             Fixed(r.seconds, 3) + " s";
  if (!r.report.ok()) g.detail += ", worst " + r.report.worst;
  return g;
}

GateResult TrainingGate(double initial_heldout, double final_heldout, double seconds) {
  GateResult g{2, "training", false, ""};
  const double ratio = final_heldout / initial_heldout;
  g.pass = std::isfinite(ratio) && ratio <= kTrainingMaxRatio && seconds < kTrainingMaxSeconds;
  g.detail = "held-out " + Fixed(initial_heldout) + " -> " + Fixed(final_heldout) + " (ratio " +
             Fixed(ratio, 3) + "), " + Fixed(seconds) + " s";
  return g;
}

PropertyReport CheckAifProperties(const mvae::GenerativeModel& model,
                                  const armsim::WorldConfig& world,
                                  const aif::ControllerConfig& controller, int trials,
                                  std::uint64_t seed) {
  const int n = world.arm.dof();
  const auto ranges = mvae::DefaultBabblingRange(n);
  const aif::Variances var = controller.ResolveVariances(&model, n);
  const aif::Gains& gains = controller.gains;
  std::mt19937_64 rng(seed);
  PropertyReport r;

  for (int t = 0; t < trials; ++t) {
    const VectorXd q = UniformJoints(ranges, rng);
    const VectorXd z = mvae::Encode(model, q, armsim::Render(world.arm, q, world.camera));
    const aif::Decoded d = aif::Decode(model, z);
    const aif::GoalSpec goal{d.s_q, std::make_shared<const Tensor>(d.s_v)};
    const aif::LatentFlow lf = aif::LatentUpdate(model, z, d.s_q, d.s_v, goal, gains, var);
    const aif::ProprioBelief b{d.s_q, VectorXd::Zero(n), VectorXd::Zero(n)};
    const aif::BeliefFlow bf = aif::BeliefUpdate(b, VectorXd::Zero(n), d.s_q, gains, var);
    const aif::ActionFlow af = aif::ActionUpdate(d.s_q, VectorXd::Zero(n), b, gains, var);
    for (const VectorXd* v : {&lf.sensory_q, &lf.sensory_v, &lf.goal_q, &lf.goal_v}) {
      r.fixed_point_max = std::max(r.fixed_point_max, v->cwiseAbs().maxCoeff());
    }
    r.fixed_point_max = std::max({r.fixed_point_max, bf.mu_p_dot().cwiseAbs().maxCoeff(),
                                  bf.mu_pp_dot.cwiseAbs().maxCoeff(),
                                  af.total().cwiseAbs().maxCoeff()});
    ++r.fixed_point_trials;
  }

  for (int t = 0; t < trials; ++t) {
    const VectorXd q0 = UniformJoints(ranges, rng);
    const VectorXd q = UniformJoints(ranges, rng);
    const VectorXd qdot = Gaussian(n, 0.2, rng);
    const Tensor image = armsim::Render(world.arm, q, world.camera);
    const aif::GoalSpec goal =
        aif::GoalSpec::FromJoints(world.arm, world.camera, UniformJoints(ranges, rng));
    const VectorXd z = mvae::Encode(model, q0, armsim::Render(world.arm, q0, world.camera));
    const aif::ProprioBelief b0{mvae::DecodeJoints(model, z), Gaussian(n, 0.2, rng),
                                VectorXd::Zero(n)};
    const double f0 =
        aif::FreeEnergy(q, qdot, image, aif::Decode(model, z), b0, goal, var).total();
    const aif::LatentFlow lf = aif::LatentUpdate(model, z, q, image, goal, gains, var);
    const aif::BeliefFlow bf = aif::BeliefUpdate(b0, qdot, goal.q, gains, var);
    bool descended = false;
    for (int h = 0; h <= kDescentMaxHalvings && !descended; ++h) {
      const double dt = world.control_period / std::pow(2.0, h);
      const VectorXd z1 = z + dt * lf.total();
      const aif::ProprioBelief b1{mvae::DecodeJoints(model, z1), b0.mu_p + dt * bf.mu_p_dot(),
                                  b0.mu_pp + dt * bf.mu_pp_dot};
      descended =
          aif::FreeEnergy(q, qdot, image, aif::Decode(model, z1), b1, goal, var).total() <= f0;
      if (!descended) ++r.descent_halvings;
    }
    r.descent_failures += descended ? 0 : 1;
    ++r.descent_trials;
  }

  for (int t = 0; t < trials; ++t) {
    const double c = std::uniform_real_distribution<double>(0.1, 20.0)(rng);
    const VectorXd q = UniformJoints(ranges, rng);
    const VectorXd z = mvae::Encode(model, UniformJoints(ranges, rng),
                                    armsim::Render(world.arm, q, world.camera));
    const Tensor image = armsim::Render(world.arm, q, world.camera);
    const aif::GoalSpec goal =
        aif::GoalSpec::FromJoints(world.arm, world.camera, UniformJoints(ranges, rng));
    const aif::ProprioBelief b{Gaussian(n, 0.5, rng), Gaussian(n, 0.2, rng), VectorXd::Zero(n)};
    const VectorXd qdot = Gaussian(n, 0.2, rng);
    aif::Variances base = var;
    base.goal_q.reset();
    base.goal_v.reset();
    const aif::LatentFlow f0 = aif::LatentUpdate(model, z, q, image, goal, gains, base);
    const aif::ActionFlow a0 = aif::ActionUpdate(q, qdot, b, gains, base);
    aif::Variances scaled = base;
    scaled.q *= c;
    scaled.v *= c;
    const aif::LatentFlow f1 = aif::LatentUpdate(model, z, q, image, goal, gains, scaled);
    const aif::ActionFlow a1 = aif::ActionUpdate(q, qdot, b, gains, scaled);
    r.scaling_max_error = std::max({r.scaling_max_error, RelativeGap(c * f1.sensory_q, f0.sensory_q),
                                    RelativeGap(c * f1.sensory_v, f0.sensory_v),
                                    RelativeGap(c * f1.goal_q, f0.goal_q),
                                    RelativeGap(c * f1.goal_v, f0.goal_v),
                                    RelativeGap(c * a1.position, a0.position),
                                    RelativeGap(a1.velocity, a0.velocity)});
    ++r.scaling_trials;
  }
  return r;
}

GateResult PropertyGate(const PropertyReport& r) {
  GateResult g{3, "aif properties", false, ""};
  g.pass = r.fixed_point_max == 0.0 && r.descent_failures == 0 &&
           r.scaling_max_error <= kScalingTolerance;
  g.detail = "fixed point max |flow| " + Fixed(r.fixed_point_max) + " over " +
             std::to_string(r.fixed_point_trials) + ", descent failures " +
             std::to_string(r.descent_failures) + "/" + std::to_string(r.descent_trials) + " (" +
             std::to_string(r.descent_halvings) + " halvings), scaling max rel " +
             Fixed(r.scaling_max_error, 3) + " over " + std::to_string(r.scaling_trials);
  return g;
}

double ReachFraction(const ControllerSweep& sweep) {
  if (sweep.runs.empty()) return 0.0;
  const auto ok = std::count_if(sweep.runs.begin(), sweep.runs.end(), Reached);
  return static_cast<double>(ok) / static_cast<double>(sweep.runs.size());
}

GateResult ReachingGate(const ControllerSweep& maif) {
  GateResult g{4, "reaching", false, ""};
  const double fraction = ReachFraction(maif);
  int final_ok = 0;
  for (const RunOutcome& o : maif.runs) final_ok += (!o.failed && o.ee_final <= 0.15 * o.ee_start) ? 1 : 0;
  g.pass = fraction >= kReachFraction && maif.failed == 0;
  g.detail = maif.controller.name + " reached 15% within " + Fixed(kReachSeconds) + " s in " +
             std::to_string(static_cast<int>(std::lround(fraction * maif.runs.size()))) + "/" +
             std::to_string(maif.runs.size()) + " runs (still below at the end: " +
             std::to_string(final_ok) + "), safe stops " + std::to_string(maif.failed);
  return g;
}

GateResult NoiseGate(const SweepResult& sweep) {
  GateResult g{5, "noise ordering", false, ""};
  const ControllerSweep& m = sweep.at("maif");
  const ControllerSweep& p = sweep.at("paif");
  const ControllerSweep& d = sweep.at("pd");
  g.pass = m.steady_rmse <= p.steady_rmse && m.steady_rmse <= d.steady_rmse &&
           m.steady_std <= p.steady_std && m.steady_std <= d.steady_std;
  g.detail = "steady rmse/std maif " + Fixed(m.steady_rmse) + "/" + Fixed(m.steady_std) +
             ", paif " + Fixed(p.steady_rmse) + "/" + Fixed(p.steady_std) + ", pd " +
             Fixed(d.steady_rmse) + "/" + Fixed(d.steady_std) + " (noise q_std " +
             Fixed(sweep.world.noise.q_std) + ")";
  return g;
}

GateResult OcclusionGate(const std::vector<ModalityRun>& runs) {
  GateResult g{6, "occlusion ordering", false, ""};
  auto err = [&](const std::string& name) {
    for (const ModalityRun& r : runs) {
      if (r.name == name) return SteadyEndEffectorError(r.series, r.scenario);
    }
    throw ConfigError("modality study has no run '" + name + "'");
  };
  const double clean = err("maif"), noisy = err("maif_noisy_vision"),
               occluded = err("maif_occluded"), paif = err("paif");
  g.pass = clean <= noisy && noisy <= occluded && occluded <= kOccludedVsPaif * paif;
  g.detail = "steady ee error clean " + Fixed(clean) + ", noisy vision " + Fixed(noisy) +
             ", occluded " + Fixed(occluded) + ", paif " + Fixed(paif) + " (occluded/paif " +
             Fixed(occluded / paif, 3) + ")";
  return g;
}

GateResult AdaptationGate(const std::vector<VariationResult>& results) {
  GateResult g{7, "adaptation", true, ""};
  int used = 0;
  for (const VariationResult& v : results) {
    if (v.variation.name != "gravity" && v.variation.name != "stiffness") continue;
    const ControllerSweep& m = v.sweep.at("maif");
    const double fraction = ReachFraction(m);
    g.pass = g.pass && fraction >= kAdaptFraction;
    if (!g.detail.empty()) g.detail += ", ";
    g.detail += v.variation.name + " " + std::to_string(static_cast<int>(std::lround(fraction * m.runs.size()))) +
                "/" + std::to_string(m.runs.size()) + " (safe stops " + std::to_string(m.failed) + ")";
    ++used;
  }
  g.pass = g.pass && used == 2;
  return g;
}

GateResult MentalGate(const Scenario& scenario, const MetricSeries& mental,
                      const MetricSeries& closed_loop) {
  GateResult g{8, "mental simulation", false, ""};
  const auto ms = Summarize(mental, scenario);
  const auto cs = Summarize(closed_loop, scenario);
  int faster = 0;
  std::string ticks;
  for (std::size_t i = 0; i < ms.size() && i < cs.size(); ++i) {
    const auto& m = ms[i].joint_reach_ticks;
    const auto& c = cs[i].joint_reach_ticks;
    if (m && (!c || *m < *c)) ++faster;
    ticks += (i ? " " : "") + (m ? std::to_string(*m) : std::string("-")) + "/" +
             (c ? std::to_string(*c) : std::string("-"));
  }
  g.pass = faster >= kMentalMinGoals && mental.simulator_reads == 0;
  g.detail = "mental faster on " + std::to_string(faster) + "/" + std::to_string(ms.size()) +
             " goals (ticks mental/closed " + ticks + "), simulator reads " +
             std::to_string(mental.simulator_reads);
  return g;
}

GateResult DeterminismGate(const Scenario& scenario,
                           const std::shared_ptr<const mvae::GenerativeModel>& model) {
  GateResult g{9, "determinism", false, ""};
  std::string text[2];
  for (std::string& t : text) {
    const MetricSeries s = RunScenario(scenario, model);
    std::ostringstream out;
    WriteDiagCsv(out, s);
    WriteSummaryCsv(out, Summarize(s, scenario));
    t = out.str();
  }
  g.pass = !text[0].empty() && text[0] == text[1];
  g.detail = std::to_string(text[0].size()) + " CSV bytes, " +
             (g.pass ? "identical" : "different") + " across two runs of '" + scenario.tag + "'";
  return g;
}

}  // namespace maif::bench
