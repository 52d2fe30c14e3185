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

#ifndef MAIF_BENCH_EXPERIMENTS_H_
#define MAIF_BENCH_EXPERIMENTS_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "maif/bench/metrics.h"
#include "maif/bench/scenario.h"
#include "maif/mvae/model.h"

namespace maif::bench {

struct NamedController {
  std::string name;
  aif::ControllerConfig config;
};

// The three controllers compared throughout: maif, paif and pd, sharing
// every setting except the mode.
std::vector<NamedController> StandardControllers(const aif::ControllerConfig& base);

struct SweepSpec {
  Scenario base;  // world, duration and start; goals are replaced
  std::vector<NamedController> controllers;
  int runs = 50;
  std::uint64_t seed = 1;
  std::vector<mvae::JointRange> ranges;  // empty means the babbling range
  double margin = 0.1;
  int workers = 0;  // 0 means one per hardware thread
  bool keep_series = true;
};

struct RunOutcome {
  int index = 0;
  VectorXd goal;
  std::uint64_t seed = 0;
  double ee_start = 0.0;
  double ee_final = 0.0;
  double ee_steady = 0.0;
  std::optional<double> ee_reach_time;  // first ee_error <= 0.15 ee_start
  bool failed = false;
  std::string failure;
  MetricSeries series;  // empty unless keep_series
};

// Across-run statistics of the end-effector error per tick, over the runs
// that did not fail.
struct AggregateCurve {
  std::vector<double> t;
  std::vector<double> rmse;
  std::vector<double> mean;
  std::vector<double> std;
  int runs = 0;
};

struct ControllerSweep {
  NamedController controller;
  std::vector<RunOutcome> runs;
  AggregateCurve curve;
  int failed = 0;
  int reached = 0;  // runs with ee_reach_time set and no safe stop
  // Curve values averaged over the final 10% of the run.
  double steady_rmse = 0.0;
  double steady_std = 0.0;
};

struct SweepResult {
  armsim::WorldConfig world;
  std::vector<VectorXd> goals;
  std::vector<ControllerSweep> controllers;

  const ControllerSweep& at(const std::string& name) const;
};

// Curve statistics from per-run series (needs keep_series).
AggregateCurve Aggregate(const std::vector<RunOutcome>& runs);

// Runs the same seeded goals, one per run from the start pose, under every
// controller. Run i uses noise seed RunSeed(seed, i) for all controllers.
// With `out`, raw per-run files go to out/<controller>/run_<i>/ and the
// aggregate to out/aggregate.csv and out/sweep.csv.
SweepResult RandomGoalSweep(const SweepSpec& spec,
                            const std::shared_ptr<const mvae::GenerativeModel>& model,
                            const std::optional<std::filesystem::path>& out = std::nullopt);

// Columns: controller, t, rmse, mean, std, runs.
void WriteAggregateCsv(std::ostream& out, const SweepResult& result);
// Columns: controller, runs, failed, reached, steady_rmse, steady_std.
void WriteSweepCsv(std::ostream& out, const SweepResult& result);

// Hash over the controllers' configs in order.
std::string ControllersHash(const std::vector<NamedController>& controllers);

// A named change of world settings, as config overrides.
struct Variation {
  std::string name;
  KeyValueConfig overrides;
};

std::vector<Variation> AdaptationVariations(double gravity = 24.79, double stiffness = 0.01,
                                            double q_std = 0.1);

struct VariationResult {
  Variation variation;
  SweepResult sweep;
};

// Reruns the sweep under each variation with unchanged controllers. Throws
// ConfigError unless ControllersHash(spec.controllers) equals
// `registered_hash`.
std::vector<VariationResult> AdaptationSuite(
    const SweepSpec& spec, const std::vector<Variation>& variations,
    const std::string& registered_hash, const std::shared_ptr<const mvae::GenerativeModel>& model,
    const std::optional<std::filesystem::path>& out = std::nullopt);

struct ModalityRun {
  std::string name;  // maif, maif_noisy_vision, maif_occluded, paif
  Scenario scenario;
  MetricSeries series;
};

// The four vision conditions on one scenario; the noisy case adds image
// noise of standard deviation `image_std`.
std::vector<ModalityRun> ModalityStudy(const Scenario& scenario,
                                       const std::shared_ptr<const mvae::GenerativeModel>& model,
                                       double image_std = 0.25,
                                       const std::optional<std::filesystem::path>& out = std::nullopt);

// Mean steady-state end-effector error over the goal slices of a series.
double SteadyEndEffectorError(const MetricSeries& series, const Scenario& scenario);

}  // namespace maif::bench

#endif  // MAIF_BENCH_EXPERIMENTS_H_
