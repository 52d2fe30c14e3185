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

#ifndef MAIF_BENCH_GATES_H_
#define MAIF_BENCH_GATES_H_

// Pass/fail checks over experiment results, shared by the command line tool
// and the acceptance binary. Every threshold is a named constant below.

#include <cstdint>
#include <string>
#include <vector>

#include "maif/bench/experiments.h"
#include "maif/diffnet/gradient_check.h"
#include "maif/mvae/train.h"

namespace maif::bench {

inline constexpr int kGradientMinInstances = 100;
inline constexpr double kGradientMaxSeconds = 60.0;
inline constexpr double kGradientEpsilon = 1e-5;
inline constexpr double kGradientTolerance = 1e-4;
inline constexpr double kTrainingMaxRatio = 0.5;
inline constexpr double kTrainingMaxSeconds = 15 * 60.0;
inline constexpr double kScalingTolerance = 1e-12;
inline constexpr int kDescentMaxHalvings = 10;
inline constexpr double kReachFraction = 0.9;
inline constexpr double kReachSeconds = 10.0;
inline constexpr double kAdaptFraction = 0.8;
inline constexpr double kOccludedVsPaif = 1.25;
inline constexpr int kMentalMinGoals = 4;

struct GateResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// "PASS 4 reaching: ..." style line.
std::string FormatGate(const GateResult& gate);

struct GradientSuiteReport {
  int instances = 0;
  int layer_instances = 0;
  int decoder_instances = 0;
  diffnet::GradCheckReport report;
  double seconds = 0.0;
};

// Randomized central-difference checks of every layer kind and of both
// full decoders of the default architecture for `config`.
GradientSuiteReport RunGradientSuite(const mvae::ModelConfig& config, int layer_repeats,
                                     int decoder_repeats, std::uint64_t seed);
GateResult GradientGate(const GradientSuiteReport& report);

GateResult TrainingGate(double initial_heldout, double final_heldout, double seconds);

struct PropertyReport {
  int fixed_point_trials = 0;
  double fixed_point_max = 0.0;  // largest |flow| component at the goal fixed point
  int descent_trials = 0;
  int descent_failures = 0;
  int descent_halvings = 0;  // total halvings needed
  int scaling_trials = 0;
  double scaling_max_error = 0.0;  // relative
};

// Fixed point, estimation-step descent of F and precision scaling on a
// model, with states drawn from the babbling range of `world`.
PropertyReport CheckAifProperties(const mvae::GenerativeModel& model,
                                  const armsim::WorldConfig& world,
                                  const aif::ControllerConfig& controller, int trials,
                                  std::uint64_t seed);
GateResult PropertyGate(const PropertyReport& report);

// Share of runs that reach 15% of the initial end-effector error within
// kReachSeconds without a safe stop.
double ReachFraction(const ControllerSweep& sweep);
GateResult ReachingGate(const ControllerSweep& maif);
GateResult NoiseGate(const SweepResult& sweep);
GateResult OcclusionGate(const std::vector<ModalityRun>& runs);
// Uses the gravity and stiffness variations; others are ignored.
GateResult AdaptationGate(const std::vector<VariationResult>& results);
GateResult MentalGate(const Scenario& scenario, const MetricSeries& mental,
                      const MetricSeries& closed_loop);
// Runs the scenario twice and compares the diag and summary CSV bytes.
GateResult DeterminismGate(const Scenario& scenario,
                           const std::shared_ptr<const mvae::GenerativeModel>& model);

}  // namespace maif::bench

#endif  // MAIF_BENCH_GATES_H_
