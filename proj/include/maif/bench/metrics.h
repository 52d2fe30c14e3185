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

#ifndef MAIF_BENCH_METRICS_H_
#define MAIF_BENCH_METRICS_H_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "maif/armsim/arm.h"
#include "maif/bench/scenario.h"
#include "maif/diffnet/tensor.h"

namespace maif::bench {

// Evaluation metrics of one controller tick. Joint errors are Euclidean
// norms over the joints. Metrics a controller cannot produce are absent.
struct MetricRecord {
  double t = 0.0;
  int goal = 0;
  double ee_error = 0.0;                 // |FK(q) - FK(q_d)|, m
  double goal_error = 0.0;               // |q - q_d|
  std::optional<double> perception;      // |mu - q|
  std::optional<double> belief_goal;     // |mu - q_d|
  std::optional<double> image_error;     // mean squared g_v(z) - render(q)
  std::optional<double> free_energy;
  // Norms of the four latent flow terms (sensory q, sensory v, goal q, goal v).
  std::optional<std::vector<double>> latent_terms;
  VectorXd q;    // true joints (imagined joints in mental runs)
  VectorXd mu;   // belief, empty when absent
  VectorXd tau;  // commanded torque, empty in mental runs
  bool safe_stop = false;
  // the controller saw an all-zero camera image this tick (maif only)
  std::optional<bool> image_blank;
};

// `mu` and `decoded` are optional; `render` is the clean image at q and is
// only used with `decoded`.
MetricRecord ComputeMetrics(const armsim::ArmModel& arm, const VectorXd& q, const VectorXd& q_d,
                            const VectorXd* mu, const diffnet::Tensor* decoded,
                            const diffnet::Tensor* render);

struct MetricSeries {
  std::string controller;  // maif, paif, pd or mental
  int joints = 0;
  std::vector<MetricRecord> records;
  bool failed = false;
  std::string failure;
  std::size_t simulator_reads = 0;
};

// Per-goal reduction of a series. Steady-state values are means over the
// final 10% of the goal's time slice.
struct GoalSummary {
  int goal = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double ee_start = 0.0;  // end-effector error at the first tick of the slice
  double ee_steady = 0.0;
  double goal_error_start = 0.0;
  double goal_error_steady = 0.0;
  std::optional<double> perception_steady;
  std::optional<double> belief_goal_steady;
  std::optional<double> image_error_steady;
  // First time in the slice with ee_error <= 0.15 ee_start.
  std::optional<double> ee_reach_time;
  // Ticks from the slice start until goal_error <= 0.1 goal_error_start.
  std::optional<int> joint_reach_ticks;
};

std::vector<GoalSummary> Summarize(const MetricSeries& series, const Scenario& scenario);

// Columns, fixed order: t, goal, ee_error, goal_error, perception,
// belief_goal, image_error, free_energy, zq_sensory, zv_sensory, zq_goal,
// zv_goal, safe_stop, image_blank, q0.., mu0.., tau0... Absent values are empty fields.
void WriteDiagCsv(std::ostream& out, const MetricSeries& series);
// Columns: goal, t_start, t_end, ee_start, ee_steady, goal_error_start,
// goal_error_steady, perception_steady, belief_goal_steady,
// image_error_steady, ee_reach_time, joint_reach_ticks.
void WriteSummaryCsv(std::ostream& out, const std::vector<GoalSummary>& summary);

}  // namespace maif::bench

#endif  // MAIF_BENCH_METRICS_H_
