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

#include "maif/bench/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "maif/bench/runner.h"
#include "maif/config.h"
#include "maif/error.h"

namespace maif::bench {
namespace {

std::string RunDirName(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%03d", index);
  return buf;
}

// Calls task(i) for i in [0, count) on `workers` threads, rethrowing the
// first exception after all threads finish.
template <typename Task>
void ParallelFor(int count, int workers, Task task) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, std::max(count, 1));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto loop = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(loop);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<NamedController> StandardControllers(const aif::ControllerConfig& base) {
  std::vector<NamedController> out;
  for (aif::Mode mode : {aif::Mode::kMaif, aif::Mode::kPaif, aif::Mode::kPd}) {
    aif::ControllerConfig c = base;
    c.mode = mode;
    out.push_back({aif::ToString(mode), c});
  }
  return out;
}

const ControllerSweep& SweepResult::at(const std::string& name) const {
  for (const ControllerSweep& c : controllers) {
    if (c.controller.name == name) return c;
  }
  throw ConfigError("no controller named '" + name + "' in the sweep");
}

AggregateCurve Aggregate(const std::vector<RunOutcome>& runs) {
  AggregateCurve curve;
  std::vector<const MetricSeries*> ok;
  for (const RunOutcome& r : runs) {
    if (!r.failed) ok.push_back(&r.series);
  }
  if (ok.empty()) return curve;
  const std::size_t ticks = ok.front()->records.size();
  for (const MetricSeries* s : ok) {
    if (s->records.size() != ticks) throw ShapeError("aggregate: runs differ in length");
  }
  curve.runs = static_cast<int>(ok.size());
  const auto n = static_cast<double>(ok.size());
  for (std::size_t k = 0; k < ticks; ++k) {
    double sum = 0.0, sq = 0.0;
    for (const MetricSeries* s : ok) {
      const double e = s->records[k].ee_error;
      sum += e;
      sq += e * e;
    }
    const double mean = sum / n;
    double var = 0.0;
    for (const MetricSeries* s : ok) {
      const double d = s->records[k].ee_error - mean;
      var += d * d;
    }
    curve.t.push_back(ok.front()->records[k].t);
    curve.rmse.push_back(std::sqrt(sq / n));
    curve.mean.push_back(mean);
    curve.std.push_back(std::sqrt(var / n));
  }
  return curve;
}

SweepResult RandomGoalSweep(const SweepSpec& spec,
                            const std::shared_ptr<const mvae::GenerativeModel>& model,
                            const std::optional<std::filesystem::path>& out) {
  if (spec.runs < 1) throw ConfigError("a sweep needs at least one run");
  if (spec.controllers.empty()) throw ConfigError("a sweep needs at least one controller");
  const int joints = spec.base.world.arm.dof();
  const std::vector<mvae::JointRange> ranges =
      spec.ranges.empty() ? mvae::DefaultBabblingRange(joints) : spec.ranges;
  if (static_cast<int>(ranges.size()) != joints) throw ConfigError("one goal range per joint");

  SweepResult result;
  result.world = spec.base.world;
  result.goals = RandomGoals(spec.runs, ranges, spec.seed, spec.margin);
  const int nc = static_cast<int>(spec.controllers.size());
  result.controllers.resize(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    result.controllers[static_cast<std::size_t>(c)].controller = spec.controllers[static_cast<std::size_t>(c)];
    result.controllers[static_cast<std::size_t>(c)].runs.resize(static_cast<std::size_t>(spec.runs));
  }
  ParallelFor(nc * spec.runs, spec.workers, [&](int task) {
    const int c = task / spec.runs, i = task % spec.runs;
    const NamedController& ctl = spec.controllers[static_cast<std::size_t>(c)];
    Scenario s = spec.base;
    s.goals = {result.goals[static_cast<std::size_t>(i)]};
    s.seed = RunSeed(spec.seed, i);
    s.controller = ctl.config;
    s.tag = ctl.name + "_" + std::to_string(i);
    MetricSeries series = RunScenario(s, model);
    RunOutcome& o = result.controllers[static_cast<std::size_t>(c)].runs[static_cast<std::size_t>(i)];
    o.index = i;
    o.goal = s.goals.front();
    o.seed = s.seed;
    o.failed = series.failed;
    o.failure = series.failure;
    if (!series.records.empty()) {
      const GoalSummary g = Summarize(series, s).front();
      o.ee_start = g.ee_start;
      o.ee_steady = g.ee_steady;
      o.ee_final = series.records.back().ee_error;
      o.ee_reach_time = g.ee_reach_time;
    }
    if (out) WriteRun(*out / ctl.name / RunDirName(i), s, series);
    o.series = std::move(series);
  });

  for (ControllerSweep& cs : result.controllers) {
    cs.curve = Aggregate(cs.runs);
    for (const RunOutcome& o : cs.runs) {
      cs.failed += o.failed ? 1 : 0;
      cs.reached += (!o.failed && o.ee_reach_time) ? 1 : 0;
    }
    const std::size_t ticks = cs.curve.t.size();
    if (ticks > 0) {
      const std::size_t window =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * ticks - 1e-9)));
      double r = 0.0, sd = 0.0;
      for (std::size_t k = ticks - window; k < ticks; ++k) {
        r += cs.curve.rmse[k];
        sd += cs.curve.std[k];
      }
      cs.steady_rmse = r / static_cast<double>(window);
      cs.steady_std = sd / static_cast<double>(window);
    }
    if (!spec.keep_series) {
      for (RunOutcome& o : cs.runs) o.series.records.clear();
    }
  }
  if (out) {
    std::filesystem::create_directories(*out);
    std::ofstream agg(*out / "aggregate.csv");
    WriteAggregateCsv(agg, result);
    std::ofstream sweep(*out / "sweep.csv");
    WriteSweepCsv(sweep, result);
    std::ofstream goals(*out / "goals.csv");
    goals << "run";
    for (int j = 0; j < joints; ++j) goals << ",q" << j;
    goals << '\n';
    for (std::size_t i = 0; i < result.goals.size(); ++i) {
      goals << i;
      for (int j = 0; j < joints; ++j) goals << ',' << FormatDouble(result.goals[i][j]);
      goals << '\n';
    }
  }
  return result;
}

void WriteAggregateCsv(std::ostream& out, const SweepResult& result) {
  out << "controller,t,rmse,mean,std,runs\n";
  for (const ControllerSweep& cs : result.controllers) {
    const AggregateCurve& c = cs.curve;
    for (std::size_t k = 0; k < c.t.size(); ++k) {
      out << cs.controller.name << ',' << FormatDouble(c.t[k]) << ',' << FormatDouble(c.rmse[k])
          << ',' << FormatDouble(c.mean[k]) << ',' << FormatDouble(c.std[k]) << ',' << c.runs
          << '\n';
    }
  }
}

void WriteSweepCsv(std::ostream& out, const SweepResult& result) {
  out << "controller,runs,failed,reached,steady_rmse,steady_std\n";
  for (const ControllerSweep& cs : result.controllers) {
    out << cs.controller.name << ',' << cs.runs.size() << ',' << cs.failed << ',' << cs.reached
        << ',' << FormatDouble(cs.steady_rmse) << ',' << FormatDouble(cs.steady_std) << '\n';
  }
}

std::string ControllersHash(const std::vector<NamedController>& controllers) {
  std::string text;
  for (const NamedController& c : controllers) {
    text += "[" + c.name + "]\n" + aif::ToConfig(c.config).Serialize();
  }
  return Fnv1aHex(text);
}

std::vector<Variation> AdaptationVariations(double gravity, double stiffness, double q_std) {
  std::vector<Variation> out(3);
  out[0].name = "gravity";
  out[0].overrides.Set("arm.gravity", gravity);
  out[1].name = "stiffness";
  out[1].overrides.Set("arm.stiffness", std::vector<double>{stiffness});
  out[2].name = "noise";
  out[2].overrides.Set("noise.q_std", q_std);
  return out;
}

std::vector<VariationResult> AdaptationSuite(
    const SweepSpec& spec, const std::vector<Variation>& variations,
    const std::string& registered_hash, const std::shared_ptr<const mvae::GenerativeModel>& model,
    const std::optional<std::filesystem::path>& out) {
  const std::string hash = ControllersHash(spec.controllers);
  if (hash != registered_hash) {
    throw ConfigError("controller configs differ from the registered baseline (hash " + hash +
                      ", expected " + registered_hash + ")");
  }
  std::vector<VariationResult> results;
  for (const Variation& v : variations) {
    KeyValueConfig world = armsim::ToConfig(spec.base.world);
    world.Merge(v.overrides);
    SweepSpec varied = spec;
    varied.base.world = armsim::WorldFromConfig(world);
    std::optional<std::filesystem::path> dir;
    if (out) {
      dir = *out / v.name;
      std::filesystem::create_directories(*dir);
      KeyValueConfig meta = v.overrides;
      meta.Set("variation.name", v.name);
      meta.Set("variation.controllers_hash", hash);
      meta.Save(*dir / "variation.cfg");
    }
    results.push_back({v, RandomGoalSweep(varied, model, dir)});
  }
  return results;
}

std::vector<ModalityRun> ModalityStudy(const Scenario& scenario,
                                       const std::shared_ptr<const mvae::GenerativeModel>& model,
                                       double image_std,
                                       const std::optional<std::filesystem::path>& out) {
  std::vector<ModalityRun> runs(4);
  runs[0].name = "maif";
  runs[1].name = "maif_noisy_vision";
  runs[2].name = "maif_occluded";
  runs[3].name = "paif";
  for (ModalityRun& r : runs) {
    r.scenario = scenario;
    r.scenario.controller.mode = aif::Mode::kMaif;
    r.scenario.tag = r.name;
  }
  runs[1].scenario.world.noise.image_std = image_std;
  runs[2].scenario.controller.occlude = true;
  runs[3].scenario.controller.mode = aif::Mode::kPaif;
  ParallelFor(4, 0, [&](int i) {
    ModalityRun& r = runs[static_cast<std::size_t>(i)];
    r.series = RunScenario(r.scenario, model);
    if (out) WriteRun(*out / r.name, r.scenario, r.series);
  });
  return runs;
}

double SteadyEndEffectorError(const MetricSeries& series, const Scenario& scenario) {
  const std::vector<GoalSummary> s = Summarize(series, scenario);
  if (s.empty()) throw ConfigError("series has no goal slices");
  double sum = 0.0;
  for (const GoalSummary& g : s) sum += g.ee_steady;
  return sum / static_cast<double>(s.size());
}

}  // namespace maif::bench
