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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "maif/bench/experiments.h"
#include "maif/bench/gates.h"
#include "maif/bench/metrics.h"
#include "maif/bench/runner.h"
#include "maif/bench/scenario.h"
#include "maif/error.h"

namespace maif::bench {
namespace {

using diffnet::Activation;
using diffnet::Dense;
using Eigen::VectorXd;

std::shared_ptr<const mvae::GenerativeModel> TinyModel(std::uint64_t seed = 7) {
  mvae::Architecture a;
  a.encoder_q = {Dense(2, 6, Activation::kRelu), Dense(6, 3, Activation::kIdentity)};
  a.encoder_v = {diffnet::Conv(1, 2, 3, 1, 1, Activation::kRelu), diffnet::MaxPool(2, 2),
                 Dense(8, 3, Activation::kIdentity)};
  a.decoder_q = {Dense(3, 5, Activation::kRelu), Dense(5, 2, Activation::kIdentity)};
  a.decoder_v = {Dense(3, 4, Activation::kRelu, {1, 2, 2}),
                 diffnet::TransposedConv(1, 1, 2, 2, 0, Activation::kTanhRelu)};
  auto m = mvae::MakeModel({2, 4, 4, 3}, a, seed);
  m.joint_variance = VectorXd::Constant(2, 0.5);
  m.image_variance = 2.0;
  return std::make_shared<const mvae::GenerativeModel>(std::move(m));
}

VectorXd V(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Scenario TinyScenario(aif::Mode mode = aif::Mode::kMaif) {
  Scenario s;
  s.world.arm = armsim::ArmModel::Uniform(2, 0.6);
  s.world.camera.height = 4;
  s.world.camera.width = 4;
  s.world.noise.q_std = 0.01;
  s.world.noise.image_std = 0.05;
  s.controller.mode = mode;
  s.controller.gains.k_a = 50.0;
  s.controller.kp = VectorXd::Constant(1, 20.0);
  s.controller.kd = VectorXd::Constant(1, 4.0);
  s.goals = {V({0.3, -0.2}), V({-0.4, 0.5})};
  s.duration = 0.2;
  s.seed = 5;
  return s;
}

std::string DiagText(const MetricSeries& series) {
  std::ostringstream out;
  WriteDiagCsv(out, series);
  return out.str();
}

std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("maif_bench_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(ScenarioTest, SlicesPartitionTheRun) {
  Scenario s = TinyScenario();
  s.goals = {V({0, 0}), V({0.1, 0}), V({0.2, 0})};
  s.duration = 1.0;
  const int ticks = s.ticks();
  EXPECT_EQ(ticks, 112);  // ceil(1 / 9e-3)
  int next = 0;
  for (int g = 0; g < 3; ++g) {
    const auto [first, last] = s.slice(g);
    EXPECT_EQ(first, next);
    EXPECT_LT(first, last);
    for (int k = first; k < last; ++k) EXPECT_EQ(s.goal_at(k), g);
    next = last;
  }
  EXPECT_EQ(next, ticks);
}

TEST(ScenarioTest, ValidateRejectsBadInput) {
  Scenario s = TinyScenario();
  s.goals = {V({3.5, 0})};
  EXPECT_THROW(s.Validate(), ConfigError);
  s = TinyScenario();
  s.goals.clear();
  EXPECT_THROW(s.Validate(), ConfigError);
  s = TinyScenario();
  s.duration = -1.0;
  EXPECT_THROW(s.Validate(), ConfigError);
}

TEST(ScenarioTest, ConfigRoundTrip) {
  Scenario s = TinyScenario(aif::Mode::kPaif);
  s.start = V({0.1, 0.2});
  s.tag = "roundtrip";
  const Scenario back = ScenarioFromConfig(ToConfig(s));
  EXPECT_EQ(ToConfig(back).Serialize(), ToConfig(s).Serialize());
  EXPECT_EQ(back.goals.size(), 2u);
  EXPECT_EQ(back.tag, "roundtrip");
  EXPECT_EQ(back.controller.mode, aif::Mode::kPaif);
}

TEST(ScenarioTest, ControllerHashFollowsGains) {
  aif::ControllerConfig a;
  aif::ControllerConfig b = a;
  EXPECT_EQ(ControllerHash(a), ControllerHash(b));
  b.gains.k_a = 901.0;
  EXPECT_NE(ControllerHash(a), ControllerHash(b));
}

TEST(ScenarioTest, RandomGoalsArePureAndInsideTheShrunkRange) {
  const std::vector<mvae::JointRange> ranges = {{-1.0, 1.0}, {0.0, 2.0}};
  const auto a = RandomGoals(200, ranges, 42);
  const auto b = RandomGoals(200, ranges, 42);
  const auto c = RandomGoals(200, ranges, 43);
  ASSERT_EQ(a.size(), 200u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], b[i]);
    differs = differs || a[i] != c[i];
    EXPECT_GE(a[i][0], -0.9);
    EXPECT_LE(a[i][0], 0.9);
    EXPECT_GE(a[i][1], 0.1);
    EXPECT_LE(a[i][1], 1.9);
  }
  EXPECT_TRUE(differs);
}

TEST(ScenarioTest, GoalSetsFitTheirArms) {
  Scenario desk;
  desk.goals = DeskGoals();
  EXPECT_NO_THROW(desk.Validate());
  EXPECT_EQ(desk.goals[3], desk.goals[1]);
  EXPECT_EQ(desk.goals[4], desk.goals[0]);

  Scenario seven;
  seven.world.arm = armsim::ArmModel::Uniform(7, 0.9);
  seven.world.camera.half_widths = std::vector<double>(7, 0.02);
  seven.goals = PaperGoals();
  EXPECT_EQ(seven.goals.size(), 5u);
  for (const VectorXd& g : seven.goals) EXPECT_EQ(g.size(), 7);
  EXPECT_NO_THROW(seven.Validate());
}

TEST(MetricsTest, AllZeroAtTheGoal) {
  const armsim::ArmModel arm = armsim::ArmModel::Uniform(2, 0.6);
  const VectorXd q = V({0.4, -0.3});
  const diffnet::Tensor img = armsim::Render(arm, q, armsim::CameraOptions{});
  const MetricRecord r = ComputeMetrics(arm, q, q, &q, &img, &img);
  EXPECT_EQ(r.ee_error, 0.0);
  EXPECT_EQ(r.goal_error, 0.0);
  EXPECT_EQ(*r.perception, 0.0);
  EXPECT_EQ(*r.belief_goal, 0.0);
  EXPECT_EQ(*r.image_error, 0.0);
}

TEST(MetricsTest, EndEffectorErrorMatchesPlanarGeometry) {
  const armsim::ArmModel arm = armsim::ArmModel::Uniform(2, 0.6);
  const VectorXd q = V({0.7, -1.1});
  const VectorXd q_d = V({-0.2, 0.4});
  auto tip = [](const VectorXd& a) {
    return std::array<double, 2>{0.3 * std::cos(a[0]) + 0.3 * std::cos(a[0] + a[1]),
                                 0.3 * std::sin(a[0]) + 0.3 * std::sin(a[0] + a[1])};
  };
  const auto p = tip(q), p_d = tip(q_d);
  const MetricRecord r = ComputeMetrics(arm, q, q_d, nullptr, nullptr, nullptr);
  EXPECT_NEAR(r.ee_error, std::hypot(p[0] - p_d[0], p[1] - p_d[1]), 1e-12);
  EXPECT_NEAR(r.goal_error, std::hypot(0.9, 1.5), 1e-12);
  EXPECT_FALSE(r.perception);
  EXPECT_FALSE(r.image_error);
}

TEST(MetricsTest, PerceptionAndGoalErrorsAreIndependent) {
  // a belief sitting on the goal while the arm is elsewhere: the belief
  // looks converged while the arm has not moved.
  const armsim::ArmModel arm = armsim::ArmModel::Uniform(2, 0.6);
  const VectorXd q = V({0.0, 0.0});
  const VectorXd q_d = V({0.3, 0.4});
  const MetricRecord r = ComputeMetrics(arm, q, q_d, &q_d, nullptr, nullptr);
  EXPECT_EQ(*r.belief_goal, 0.0);
  EXPECT_NEAR(*r.perception, 0.5, 1e-12);
  EXPECT_NEAR(r.goal_error, 0.5, 1e-12);
  EXPECT_GT(r.ee_error, 0.0);
}

TEST(MetricsTest, SummaryUsesTheFinalTenthOfEachSlice) {
  Scenario s = TinyScenario();
  s.goals = {V({0, 0})};
  s.duration = 20 * s.world.control_period;
  MetricSeries series;
  series.joints = 2;
  for (int k = 0; k < 20; ++k) {
    MetricRecord r;
    r.t = k * s.world.control_period;
    r.ee_error = 1.0 - 0.05 * k;
    r.goal_error = 2.0 - 0.1 * k;
    series.records.push_back(r);
  }
  const auto sum = Summarize(series, s);
  ASSERT_EQ(sum.size(), 1u);
  EXPECT_DOUBLE_EQ(sum[0].ee_start, 1.0);
  EXPECT_NEAR(sum[0].ee_steady, (0.1 + 0.05) / 2, 1e-12);
  ASSERT_TRUE(sum[0].ee_reach_time);
  EXPECT_NEAR(*sum[0].ee_reach_time, 17 * s.world.control_period, 1e-12);
  ASSERT_TRUE(sum[0].joint_reach_ticks);
  EXPECT_EQ(*sum[0].joint_reach_ticks, 18);
  EXPECT_FALSE(sum[0].perception_steady);
}

TEST(RunnerTest, ZeroDurationGivesAnEmptySeries) {
  Scenario s = TinyScenario();
  s.duration = 0.0;
  const MetricSeries series = RunScenario(s, TinyModel());
  EXPECT_TRUE(series.records.empty());
  EXPECT_FALSE(series.failed);
}

TEST(RunnerTest, RunsAreBitIdenticalForEveryController) {
  for (aif::Mode mode : {aif::Mode::kMaif, aif::Mode::kPaif, aif::Mode::kPd}) {
    const Scenario s = TinyScenario(mode);
    const MetricSeries a = RunScenario(s, TinyModel());
    const MetricSeries b = RunScenario(s, TinyModel());
    ASSERT_EQ(a.records.size(), static_cast<std::size_t>(s.ticks()));
    EXPECT_EQ(DiagText(a), DiagText(b)) << aif::ToString(mode);
  }
}

TEST(RunnerTest, NoiseSeedChangesTheRun) {
  Scenario s = TinyScenario(aif::Mode::kPd);
  const std::string a = DiagText(RunScenario(s, TinyModel()));
  s.seed = 6;
  EXPECT_NE(a, DiagText(RunScenario(s, TinyModel())));
}

TEST(RunnerTest, MetricsFollowTheController) {
  const MetricSeries maif = RunScenario(TinyScenario(aif::Mode::kMaif), TinyModel());
  const MetricSeries paif = RunScenario(TinyScenario(aif::Mode::kPaif), TinyModel());
  const MetricSeries pd = RunScenario(TinyScenario(aif::Mode::kPd), TinyModel());
  ASSERT_FALSE(maif.failed);
  ASSERT_FALSE(paif.failed);
  const MetricRecord& m = maif.records.back();
  EXPECT_TRUE(m.image_error && m.perception && m.free_energy && m.latent_terms);
  EXPECT_EQ(m.latent_terms->size(), 4u);
  const MetricRecord& p = paif.records.back();
  EXPECT_FALSE(p.image_error);
  EXPECT_FALSE(p.latent_terms);
  EXPECT_FALSE(p.image_blank);
  EXPECT_TRUE(p.perception && p.free_energy);
  EXPECT_FALSE(pd.records.back().perception);
  EXPECT_EQ(pd.records.back().mu.size(), 0);
  EXPECT_GT(pd.simulator_reads, 0u);
  // the second goal takes over half way through
  EXPECT_EQ(maif.records.front().goal, 0);
  EXPECT_EQ(maif.records.back().goal, 1);
}

TEST(RunnerTest, OcclusionChangesOnlyTheVisualPath) {
  Scenario s = TinyScenario();
  s.world.noise = {};
  const MetricSeries seen = RunScenario(s, TinyModel());
  s.controller.occlude = true;
  const MetricSeries blind = RunScenario(s, TinyModel());
  ASSERT_FALSE(blind.failed);
  EXPECT_NE(DiagText(seen), DiagText(blind));
  EXPECT_TRUE(blind.records.back().image_error);
  for (const MetricRecord& r : blind.records) EXPECT_EQ(r.image_blank, std::optional<bool>(true));
  for (const MetricRecord& r : seen.records) EXPECT_EQ(r.image_blank, std::optional<bool>(false));
}

TEST(RunnerTest, WriteRunProducesTheThreeFiles) {
  const Scenario s = TinyScenario();
  const MetricSeries series = RunScenario(s, TinyModel());
  const auto dir = TempDir("writerun");
  WriteRun(dir, s, series);
  const std::string diag = ReadText(dir / "diag.csv");
  EXPECT_EQ(diag.substr(0, diag.find('\n')),
            "t,goal,ee_error,goal_error,perception,belief_goal,image_error,free_energy,"
            "zq_sensory,zv_sensory,zq_goal,zv_goal,safe_stop,image_blank,q0,q1,mu0,mu1,tau0,tau1");
  EXPECT_EQ(diag, DiagText(series));
  const std::string summary = ReadText(dir / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 3);
  const Scenario back = ScenarioFromConfig(KeyValueConfig::Load(dir / "scenario.cfg"));
  EXPECT_EQ(ToConfig(back).Serialize(), ToConfig(s).Serialize());
  std::filesystem::remove_all(dir);
}

TEST(MentalTest, NeverTouchesTheSimulator) {
  Scenario s = TinyScenario(aif::Mode::kMental);
  const MetricSeries a = MentalRun(s, *TinyModel());
  EXPECT_EQ(a.simulator_reads, 0u);
  EXPECT_EQ(a.controller, "mental");
  ASSERT_EQ(a.records.size(), static_cast<std::size_t>(s.ticks()));
  EXPECT_EQ(a.records.front().tau.size(), 0);
  // noise settings have no effect without sensing
  s.world.noise.q_std = 0.5;
  s.seed = 99;
  EXPECT_EQ(DiagText(a), DiagText(MentalRun(s, *TinyModel())));
  EXPECT_THROW(RunScenario(s, TinyModel()), ConfigError);
}

SweepSpec TinySweep(int runs) {
  SweepSpec spec;
  spec.base = TinyScenario();
  spec.base.duration = 0.1;
  spec.controllers = StandardControllers(spec.base.controller);
  spec.runs = runs;
  spec.seed = 11;
  spec.workers = 2;
  return spec;
}

TEST(SweepTest, StandardControllersDifferOnlyInMode) {
  const auto c = StandardControllers(TinyScenario().controller);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].name, "maif");
  EXPECT_EQ(c[1].name, "paif");
  EXPECT_EQ(c[2].name, "pd");
  aif::ControllerConfig a = c[1].config;
  a.mode = aif::Mode::kMaif;
  EXPECT_EQ(ControllerHash(a), ControllerHash(c[0].config));
}

TEST(SweepTest, SingleRunAggregateEqualsTheRun) {
  const SweepResult r = RandomGoalSweep(TinySweep(1), TinyModel());
  for (const ControllerSweep& cs : r.controllers) {
    const RunOutcome& o = cs.runs.front();
    ASSERT_EQ(cs.curve.runs, 1);
    ASSERT_EQ(cs.curve.t.size(), o.series.records.size());
    for (std::size_t k = 0; k < cs.curve.t.size(); ++k) {
      EXPECT_DOUBLE_EQ(cs.curve.rmse[k], o.series.records[k].ee_error);
      EXPECT_DOUBLE_EQ(cs.curve.mean[k], o.series.records[k].ee_error);
      EXPECT_EQ(cs.curve.std[k], 0.0);
    }
  }
}

TEST(SweepTest, CurveMatchesARecomputation) {
  const SweepResult r = RandomGoalSweep(TinySweep(4), TinyModel());
  const ControllerSweep& cs = r.at("pd");
  ASSERT_EQ(cs.curve.runs, 4);
  for (std::size_t k = 0; k < cs.curve.t.size(); ++k) {
    double s = 0, s2 = 0;
    for (const RunOutcome& o : cs.runs) {
      s += o.series.records[k].ee_error;
      s2 += o.series.records[k].ee_error * o.series.records[k].ee_error;
    }
    const double mean = s / 4;
    EXPECT_NEAR(cs.curve.mean[k], mean, 1e-12);
    EXPECT_NEAR(cs.curve.rmse[k], std::sqrt(s2 / 4), 1e-12);
    EXPECT_NEAR(cs.curve.std[k], std::sqrt(std::max(0.0, s2 / 4 - mean * mean)), 1e-9);
  }
  // every controller sees the same goals and noise seeds
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(r.at("maif").runs[static_cast<std::size_t>(i)].goal, cs.runs[static_cast<std::size_t>(i)].goal);
    EXPECT_EQ(r.at("paif").runs[static_cast<std::size_t>(i)].seed, cs.runs[static_cast<std::size_t>(i)].seed);
  }
  EXPECT_THROW(r.at("nope"), ConfigError);
}

TEST(SweepTest, WorkerCountDoesNotChangeResults) {
  SweepSpec spec = TinySweep(3);
  spec.workers = 1;
  std::ostringstream a, b;
  WriteAggregateCsv(a, RandomGoalSweep(spec, TinyModel()));
  spec.workers = 3;
  WriteAggregateCsv(b, RandomGoalSweep(spec, TinyModel()));
  EXPECT_EQ(a.str(), b.str());
}

TEST(SweepTest, WritesRawAndAggregateFiles) {
  const auto dir = TempDir("sweep");
  RandomGoalSweep(TinySweep(2), TinyModel(), dir);
  for (const char* c : {"maif", "paif", "pd"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / c / "run_000" / "diag.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / c / "run_001" / "summary.csv"));
  }
  const std::string sweep = ReadText(dir / "sweep.csv");
  EXPECT_EQ(sweep.substr(0, sweep.find('\n')),
            "controller,runs,failed,reached,steady_rmse,steady_std");
  EXPECT_TRUE(std::filesystem::exists(dir / "aggregate.csv"));
  std::filesystem::remove_all(dir);
}

TEST(AdaptationTest, NullVariationReproducesTheBaseline) {
  const SweepSpec spec = TinySweep(2);
  const std::string hash = ControllersHash(spec.controllers);
  const SweepResult base = RandomGoalSweep(spec, TinyModel());
  const auto varied = AdaptationSuite(spec, {Variation{"none", {}}}, hash, TinyModel());
  ASSERT_EQ(varied.size(), 1u);
  std::ostringstream a, b;
  WriteAggregateCsv(a, base);
  WriteAggregateCsv(b, varied[0].sweep);
  EXPECT_EQ(a.str(), b.str());
}

TEST(AdaptationTest, OverridesReachTheWorld) {
  const SweepSpec spec = TinySweep(1);
  const auto dir = TempDir("adapt");
  const auto r = AdaptationSuite(spec, AdaptationVariations(24.79, 0.01, 0.1),
                                 ControllersHash(spec.controllers), TinyModel(), dir);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].sweep.world.arm.gravity, 24.79);
  for (const auto& j : r[1].sweep.world.arm.joints) EXPECT_EQ(j.stiffness, 0.01);
  EXPECT_EQ(r[2].sweep.world.noise.q_std, 0.1);
  // controllers are untouched
  EXPECT_EQ(r[0].sweep.controllers[2].controller.config.pd_gravity, 9.81);
  const KeyValueConfig meta = KeyValueConfig::Load(dir / "gravity" / "variation.cfg");
  EXPECT_EQ(meta.GetString("variation.controllers_hash"), ControllersHash(spec.controllers));
  std::filesystem::remove_all(dir);
}

TEST(AdaptationTest, ChangedControllersAreRejected) {
  SweepSpec spec = TinySweep(1);
  const std::string hash = ControllersHash(spec.controllers);
  spec.controllers[0].config.gains.k_q *= 2.0;
  EXPECT_THROW(AdaptationSuite(spec, AdaptationVariations(), hash, TinyModel()), ConfigError);
}

TEST(ModalityTest, FourConditionsOnOneScenario) {
  const Scenario s = TinyScenario();
  const auto runs = ModalityStudy(s, TinyModel(), 0.25);
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0].name, "maif");
  EXPECT_EQ(runs[1].scenario.world.noise.image_std, 0.25);
  EXPECT_TRUE(runs[2].scenario.controller.occlude);
  EXPECT_EQ(runs[3].scenario.controller.mode, aif::Mode::kPaif);
  EXPECT_FALSE(runs[3].series.records.back().image_error);
  for (const ModalityRun& r : runs) {
    EXPECT_EQ(r.series.records.size(), static_cast<std::size_t>(s.ticks()));
    EXPECT_GE(SteadyEndEffectorError(r.series, r.scenario), 0.0);
  }
}


RunOutcome Outcome(bool failed, std::optional<double> reach) {
  RunOutcome o;
  o.failed = failed;
  o.ee_reach_time = reach;
  return o;
}

TEST(GateTest, ReachingCountsOnlyTimelyRunsWithoutSafeStops) {
  ControllerSweep s;
  s.controller.name = "maif";
  for (int i = 0; i < 9; ++i) s.runs.push_back(Outcome(false, 2.0));
  s.runs.push_back(Outcome(false, std::nullopt));
  EXPECT_DOUBLE_EQ(ReachFraction(s), 0.9);
  EXPECT_TRUE(ReachingGate(s).pass);
  s.runs[0].ee_reach_time = kReachSeconds + 0.5;
  EXPECT_FALSE(ReachingGate(s).pass);
  s.runs[0].ee_reach_time = 1.0;
  s.runs[1].failed = true;
  s.failed = 1;
  EXPECT_DOUBLE_EQ(ReachFraction(s), 0.8);
  EXPECT_FALSE(ReachingGate(s).pass);
}

TEST(GateTest, NoiseOrderingNeedsBothStatistics) {
  SweepResult r;
  for (const char* name : {"maif", "paif", "pd"}) {
    ControllerSweep c;
    c.controller.name = name;
    c.steady_rmse = 0.02;
    c.steady_std = 0.01;
    r.controllers.push_back(c);
  }
  EXPECT_TRUE(NoiseGate(r).pass);  // ties pass
  r.controllers[0].steady_std = 0.011;
  EXPECT_FALSE(NoiseGate(r).pass);
  r.controllers[0].steady_std = 0.005;
  r.controllers[2].steady_rmse = 0.019;
  EXPECT_FALSE(NoiseGate(r).pass);
}

TEST(GateTest, MentalComparesTicksPerGoal) {
  Scenario s = TinyScenario();
  s.goals = {V({0, 0}), V({0, 0})};
  s.duration = 20 * s.world.control_period;
  auto series = [&](int drop0, int drop1) {
    MetricSeries m;
    m.joints = 2;
    for (int k = 0; k < 20; ++k) {
      MetricRecord r;
      const int local = k < 10 ? k : k - 10;
      r.goal_error = local >= (k < 10 ? drop0 : drop1) ? 0.05 : 1.0;
      if (local == 0) r.goal_error = 1.0;
      m.records.push_back(r);
    }
    return m;
  };
  const MetricSeries mental = series(2, 3), closed = series(4, 3);
  const auto gate = MentalGate(s, mental, closed);
  EXPECT_NE(gate.detail.find("faster on 1/2"), std::string::npos) << gate.detail;
  EXPECT_FALSE(gate.pass);
}

TEST(GateTest, DeterminismOnATinyScenario) {
  EXPECT_TRUE(DeterminismGate(TinyScenario(), TinyModel()).pass);
}

TEST(GateTest, GradientSuiteCoversLayersAndDecoders) {
  const auto r = RunGradientSuite({3, 32, 32, 8}, 1, 1, 5);
  EXPECT_EQ(r.layer_instances, 12);
  EXPECT_EQ(r.decoder_instances, 2);
  EXPECT_TRUE(r.report.ok()) << r.report.worst;
  EXPECT_FALSE(GradientGate(r).pass);  // too few instances
}

TEST(GateTest, PropertiesHoldOnAnUntrainedDeskModel) {
  const auto model = mvae::MakeModel({3, 32, 32, 8}, 4);
  mvae::GenerativeModel m = model;
  m.joint_variance = VectorXd::Constant(3, 0.75);
  m.image_variance = 28.0;
  const PropertyReport r = CheckAifProperties(m, armsim::WorldConfig{}, aif::ControllerConfig{}, 5, 1);
  EXPECT_EQ(r.fixed_point_max, 0.0);
  EXPECT_LE(r.scaling_max_error, kScalingTolerance);
  EXPECT_EQ(r.descent_trials, 5);
}

}  // namespace
}  // namespace maif::bench
