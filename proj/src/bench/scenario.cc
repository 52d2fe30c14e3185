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

#include "maif/bench/scenario.h"

#include <cmath>
#include <random>

#include "maif/error.h"

namespace maif::bench {
namespace {

std::vector<double> ToList(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd FromList(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void Scenario::Validate() const {
  world.Validate();
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw ConfigError("scenario duration must be >= 0");
  }
  if (goals.empty()) throw ConfigError("scenario needs at least one goal");
  const int n = world.arm.dof();
  auto check = [&](const VectorXd& q, const std::string& what) {
    if (q.size() != n) throw ConfigError(what + " has the wrong number of joints");
    for (int i = 0; i < n; ++i) {
      const auto& j = world.arm.joints[static_cast<std::size_t>(i)];
      if (!(q[i] >= j.lower && q[i] <= j.upper)) {
        throw ConfigError(what + " joint " + std::to_string(i) + " is outside the joint limits");
      }
    }
  };
  for (std::size_t i = 0; i < goals.size(); ++i) check(goals[i], "goal " + std::to_string(i));
  check(start_or_home(), "start");
}

VectorXd Scenario::start_or_home() const {
  return start.size() == 0 ? VectorXd::Zero(world.arm.dof()) : start;
}

int Scenario::ticks() const {
  if (duration <= 0.0) return 0;
  return static_cast<int>(std::ceil(duration / world.control_period - 1e-9));
}

int Scenario::goal_at(int tick) const {
  const auto n = static_cast<long long>(goals.size());
  const long long k = ticks();
  if (k == 0) return 0;
  return static_cast<int>(std::min(n - 1, static_cast<long long>(tick) * n / k));
}

std::pair<int, int> Scenario::slice(int goal) const {
  const auto n = static_cast<long long>(goals.size());
  const long long k = ticks();
  auto first = [&](long long i) { return static_cast<int>((i * k + n - 1) / n); };
  return {first(goal), first(goal + 1)};
}

KeyValueConfig ToConfig(const Scenario& s) {
  KeyValueConfig k = armsim::ToConfig(s.world);
  k.Merge(aif::ToConfig(s.controller));
  k.Set("scenario.tag", s.tag);
  k.Set("scenario.duration", s.duration);
  k.Set("scenario.seed", static_cast<std::int64_t>(s.seed));
  if (s.start.size() > 0) k.Set("scenario.start", ToList(s.start));
  k.Set("scenario.goal_count", static_cast<std::int64_t>(s.goals.size()));
  for (std::size_t i = 0; i < s.goals.size(); ++i) {
    k.Set("scenario.goal." + std::to_string(i), ToList(s.goals[i]));
  }
  return k;
}

Scenario ScenarioFromConfig(const KeyValueConfig& k) {
  Scenario s;
  s.world = armsim::WorldFromConfig(k);
  s.controller = aif::ControllerFromConfig(k);
  s.tag = k.GetString("scenario.tag", s.tag);
  s.duration = k.GetDouble("scenario.duration", s.duration);
  s.seed = static_cast<std::uint64_t>(k.GetInt("scenario.seed", 0));
  if (k.Has("scenario.start")) s.start = FromList(k.GetDoubles("scenario.start"));
  const std::int64_t n = k.GetInt("scenario.goal_count", 0);
  if (n < 0) throw ConfigError("scenario.goal_count must be >= 0");
  for (std::int64_t i = 0; i < n; ++i) {
    s.goals.push_back(FromList(k.GetDoubles("scenario.goal." + std::to_string(i))));
  }
  if (s.goals.empty()) s.goals = DeskGoals();
  s.Validate();
  return s;
}

std::string ControllerHash(const aif::ControllerConfig& controller) {
  return Fnv1aHex(aif::ToConfig(controller).Serialize());
}

std::vector<VectorXd> DeskGoals() {
  const VectorXd d1 = (VectorXd(3) << 0.5, -1.0, 1.25).finished();
  const VectorXd d2 = (VectorXd(3) << 0.2, -0.5, 0.6).finished();
  const VectorXd d3 = (VectorXd(3) << -0.5, 0.6, -0.8).finished();
  return {d1, d2, d3, d2, d1};
}

std::vector<VectorXd> PaperGoals() {
  VectorXd d1(7), d2(7), d3(7);
  d1 << 1.0, 0.5, 0.0, -2.0, 0.0, 2.5, 0.0;
  d2 << 0.0, 0.2, 0.0, -1.0, 0.0, 1.2, 0.9;
  d3 << -1.0, 0.5, 0.0, -1.2, 0.0, 1.6, 0.0;
  return {d1, d2, d3, d2, d1};
}

std::vector<VectorXd> RandomGoals(int n, const std::vector<mvae::JointRange>& ranges,
                                  std::uint64_t seed, double margin) {
  if (n < 0) throw ConfigError("goal count must be >= 0");
  if (!(margin >= 0.0 && margin < 1.0)) throw ConfigError("goal margin must be in [0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<VectorXd> goals;
  for (int i = 0; i < n; ++i) {
    VectorXd q(static_cast<Eigen::Index>(ranges.size()));
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      const double mid = 0.5 * (ranges[j].lower + ranges[j].upper);
      const double half = 0.5 * (ranges[j].upper - ranges[j].lower) * (1.0 - margin);
      q[static_cast<Eigen::Index>(j)] = mid + half * u(rng);
    }
    goals.push_back(q);
  }
  return goals;
}

std::uint64_t RunSeed(std::uint64_t sweep_seed, int index) {
  return SplitMix(SplitMix(sweep_seed) ^ static_cast<std::uint64_t>(index));
}

}  // namespace maif::bench
