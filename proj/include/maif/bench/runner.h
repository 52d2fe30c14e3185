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

#ifndef MAIF_BENCH_RUNNER_H_
#define MAIF_BENCH_RUNNER_H_

#include <filesystem>
#include <memory>
#include <optional>

#include "maif/bench/metrics.h"
#include "maif/bench/scenario.h"
#include "maif/mvae/model.h"

namespace maif::bench {

struct RunOptions {
  // When set, PGM frames (camera, decoded and goal images) go here at the
  // last tick of every goal slice, and every `frame_every` ticks if > 0.
  std::optional<std::filesystem::path> frames_dir;
  int frame_every = 0;
};

// Closed-loop run of the simulator and the scenario's controller (maif,
// paif or pd); the model is required for maif and otherwise only supplies
// default variances. Metrics are recorded every controller tick against the
// true state. A safe stop marks the series failed; the run continues with
// zero torque.
MetricSeries RunScenario(const Scenario& scenario,
                         const std::shared_ptr<const mvae::GenerativeModel>& model,
                         const RunOptions& options = {});

// Open-loop imagined run: z starts from encoding the start pose and its
// render, then follows the goal terms only. Uses the world config for the
// goal images and forward kinematics; there is no simulator.
MetricSeries MentalRun(const Scenario& scenario, const mvae::GenerativeModel& model);

// Writes scenario.cfg, diag.csv and summary.csv into `dir`.
void WriteRun(const std::filesystem::path& dir, const Scenario& scenario,
              const MetricSeries& series);

}  // namespace maif::bench

#endif  // MAIF_BENCH_RUNNER_H_
