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

#ifndef MAIF_BENCH_SCENARIO_H_
#define MAIF_BENCH_SCENARIO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "maif/aif/controllers.h"
#include "maif/armsim/world.h"
#include "maif/config.h"
#include "maif/mvae/dataset.h"

namespace maif::bench {

using Eigen::VectorXd;

// One experiment: a world, a controller and a list of goals visited in
// equal time slices, starting from `start` (home is all zeros).
struct Scenario {
  armsim::WorldConfig world;
  aif::ControllerConfig controller;
  std::vector<VectorXd> goals;
  VectorXd start;  // empty means home
  double duration = 20.0;
  std::uint64_t seed = 0;  // sensor noise stream
  std::string tag = "run";

  // Throws ConfigError for goals outside the joint limits, negative duration
  // or an empty goal list.
  void Validate() const;
  VectorXd start_or_home() const;
  // Controller ticks in the whole run.
  int ticks() const;
  // Goal active at tick k, and the tick range [first, last) of goal i.
  int goal_at(int tick) const;
  std::pair<int, int> slice(int goal) const;
};

// Keys: scenario.tag, scenario.duration, scenario.seed, scenario.start,
// scenario.goal_count, scenario.goal.<i>, plus the world and controller keys.
KeyValueConfig ToConfig(const Scenario& scenario);
Scenario ScenarioFromConfig(const KeyValueConfig& config);

// Hash of the controller part of a config, used to freeze gains across
// experiments.
std::string ControllerHash(const aif::ControllerConfig& controller);

// Five-goal sequence for the desk arm, with the fourth and fifth goals
// repeating the second and first.
std::vector<VectorXd> DeskGoals();
// The same sequence pattern for a 7-joint chain.
std::vector<VectorXd> PaperGoals();

// n goals drawn uniformly inside each joint range shrunk by `margin` of its
// half width on both sides. A pure function of the seed.
std::vector<VectorXd> RandomGoals(int n, const std::vector<mvae::JointRange>& ranges,
                                  std::uint64_t seed, double margin = 0.1);

// Noise seed of sweep run `index`, shared by every controller.
std::uint64_t RunSeed(std::uint64_t sweep_seed, int index);

}  // namespace maif::bench

#endif  // MAIF_BENCH_SCENARIO_H_
