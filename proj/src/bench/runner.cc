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

#include "maif/bench/runner.h"

#include <fstream>

#include "maif/aif/controllers.h"
#include "maif/armsim/render.h"
#include "maif/error.h"

namespace maif::bench {
namespace {

std::vector<aif::GoalSpec> GoalSpecs(const Scenario& s) {
  std::vector<aif::GoalSpec> goals;
  for (const VectorXd& q : s.goals) {
    goals.push_back(aif::GoalSpec::FromJoints(s.world.arm, s.world.camera, q));
  }
  return goals;
}

std::vector<double> TermNorms(const aif::LatentFlow& f) {
  return {f.sensory_q.norm(), f.sensory_v.norm(), f.goal_q.norm(), f.goal_v.norm()};
}

bool FrameTick(const Scenario& s, const RunOptions& options, int k) {
  if (!options.frames_dir) return false;
  if (options.frame_every > 0 && k % options.frame_every == 0) return true;
  return s.slice(s.goal_at(k)).second == k + 1;
}

std::string FrameName(int k, const char* what) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d_", k);
  return std::string(buf) + what + ".pgm";
}

}  // namespace

MetricSeries RunScenario(const Scenario& scenario,
                         const std::shared_ptr<const mvae::GenerativeModel>& model,
                         const RunOptions& options) {
  scenario.Validate();
  const aif::Mode mode = scenario.controller.mode;
  if (mode == aif::Mode::kMental) throw ConfigError("mental runs have no simulator; use MentalRun");
  armsim::WorldConfig world = scenario.world;
  world.noise.seed = scenario.seed;
  const armsim::ArmModel& arm = world.arm;
  const int n = arm.dof();

  MetricSeries series;
  series.controller = aif::ToString(mode);
  series.joints = n;
  const int ticks = scenario.ticks();
  if (ticks == 0) return series;

  const std::vector<aif::GoalSpec> goals = GoalSpecs(scenario);
  std::optional<aif::MaifController> maif;
  std::optional<aif::PaifController> paif;
  std::optional<aif::PdController> pd;
  switch (mode) {
    case aif::Mode::kMaif:
      maif.emplace(model, scenario.controller, arm);
      break;
    case aif::Mode::kPaif:
      paif.emplace(scenario.controller, scenario.controller.ResolveVariances(model.get(), n), arm);
      break;
    default: {
      armsim::ArmModel nominal = arm;
      nominal.gravity = scenario.controller.pd_gravity;
      pd.emplace(scenario.controller, nominal);
    }
  }
  if (options.frames_dir) std::filesystem::create_directories(*options.frames_dir);

  armsim::Simulator sim(world, armsim::ArmState::AtRest(scenario.start_or_home()));
  const double dt = world.control_period;
  series.records.reserve(static_cast<std::size_t>(ticks));
  for (int k = 0; k < ticks; ++k) {
    const int g = scenario.goal_at(k);
    const aif::GoalSpec& goal = goals[static_cast<std::size_t>(g)];
    const armsim::SensorFrame frame = sim.Sense();
    const VectorXd q_true = sim.Truth().q;
    MetricRecord r;
    VectorXd tau;
    std::optional<diffnet::Tensor> decoded;
    if (maif) {
      const aif::TickResult res = maif->Tick(frame, goal, dt);
      const auto& d = res.diagnostics;
      tau = res.torque;
      if (d.safe_stop) {
        r = ComputeMetrics(arm, q_true, goal.q, nullptr, nullptr, nullptr);
      } else {
        const diffnet::Tensor clean = armsim::Render(arm, q_true, world.camera);
        r = ComputeMetrics(arm, q_true, goal.q, &d.belief.mu, &d.latent.decoded.s_v, &clean);
        r.free_energy = d.free_energy.total();
        r.latent_terms = TermNorms(d.latent);
        decoded = d.latent.decoded.s_v;
      }
      r.safe_stop = d.safe_stop;
      if (!d.safe_stop) r.image_blank = d.image_blank;
      if (d.safe_stop && !series.failed) {
        series.failed = true;
        series.failure = d.safe_stop_reason;
      }
    } else if (paif) {
      const aif::TickResult res = paif->Tick(frame, goal, dt);
      const auto& d = res.diagnostics;
      tau = res.torque;
      r = ComputeMetrics(arm, q_true, goal.q, d.safe_stop ? nullptr : &d.belief.mu, nullptr,
                         nullptr);
      if (!d.safe_stop) r.free_energy = d.free_energy.total();
      r.safe_stop = d.safe_stop;
      if (d.safe_stop && !series.failed) {
        series.failed = true;
        series.failure = d.safe_stop_reason;
      }
    } else {
      tau = pd->Tick(frame, goal);
      r = ComputeMetrics(arm, q_true, goal.q, nullptr, nullptr, nullptr);
    }
    r.t = sim.time();
    r.goal = g;
    r.tau = tau;
    if (FrameTick(scenario, options, k)) {
      const auto& dir = *options.frames_dir;
      armsim::WritePgm(dir / FrameName(k, "camera"), *frame.image);
      armsim::WritePgm(dir / FrameName(k, "goal"), *goal.image);
      if (decoded) armsim::WritePgm(dir / FrameName(k, "decoded"), *decoded);
    }
    series.records.push_back(std::move(r));
    sim.Advance(tau);
  }
  series.simulator_reads = sim.reads();
  return series;
}

MetricSeries MentalRun(const Scenario& scenario, const mvae::GenerativeModel& model) {
  scenario.Validate();
  const armsim::ArmModel& arm = scenario.world.arm;
  MetricSeries series;
  series.controller = aif::ToString(aif::Mode::kMental);
  series.joints = arm.dof();
  const int ticks = scenario.ticks();
  if (ticks == 0) return series;
  const std::vector<aif::GoalSpec> goals = GoalSpecs(scenario);
  const aif::Variances variances = scenario.controller.ResolveVariances(&model, arm.dof());
  const VectorXd start = scenario.start_or_home();
  VectorXd z = mvae::Encode(model, start, armsim::Render(arm, start, scenario.world.camera));
  const double dt = scenario.world.control_period;
  for (int k = 0; k < ticks; ++k) {
    const int g = scenario.goal_at(k);
    const aif::GoalSpec& goal = goals[static_cast<std::size_t>(g)];
    MetricRecord r = ComputeMetrics(arm, mvae::DecodeJoints(model, z), goal.q, nullptr, nullptr,
                                    nullptr);
    r.t = static_cast<double>(k) * dt;
    r.goal = g;
    series.records.push_back(std::move(r));
    z = aif::MentalTick(z, goal, scenario.controller.gains, variances, model, dt).z;
  }
  return series;
}

void WriteRun(const std::filesystem::path& dir, const Scenario& scenario,
              const MetricSeries& series) {
  std::filesystem::create_directories(dir);
  ToConfig(scenario).Save(dir / "scenario.cfg");
  {
    std::ofstream out(dir / "diag.csv");
    if (!out) throw FormatError("cannot write " + (dir / "diag.csv").string());
    WriteDiagCsv(out, series);
  }
  std::ofstream out(dir / "summary.csv");
  if (!out) throw FormatError("cannot write " + (dir / "summary.csv").string());
  WriteSummaryCsv(out, Summarize(series, scenario));
}

}  // namespace maif::bench
