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

// maif: command line front end for dataset generation, training and the
// closed-loop experiments. Run `maif <command> --help` for the options.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maif/bench/experiments.h"
#include "maif/bench/gates.h"
#include "maif/bench/runner.h"
#include "maif/error.h"
#include "maif/mvae/train.h"

namespace {

using namespace maif;
namespace fs = std::filesystem;

constexpr int kGateFailed = 3;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string model;
  std::string out;
  bool gate = false;
};

void AddScenarioOptions(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "scenario/world/controller config file");
  cmd->add_option("--set", c.sets, "override a config key, key=value (repeatable)");
}

KeyValueConfig LoadConfig(const Common& c) {
  KeyValueConfig cfg;
  if (!c.config.empty()) cfg = KeyValueConfig::Load(c.config);
  for (const std::string& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    cfg.Set(s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

bench::Scenario LoadScenario(const Common& c) { return bench::ScenarioFromConfig(LoadConfig(c)); }

std::shared_ptr<const mvae::GenerativeModel> LoadModelFile(const std::string& path) {
  if (path.empty()) throw ConfigError("--model is required");
  return std::make_shared<const mvae::GenerativeModel>(mvae::LoadModel(path));
}

std::optional<fs::path> OutDir(const std::string& out) {
  if (out.empty()) return std::nullopt;
  fs::create_directories(out);
  return fs::path(out);
}

int Report(const std::vector<bench::GateResult>& gates, bool gate) {
  bool ok = true;
  for (const bench::GateResult& g : gates) {
    std::cout << bench::FormatGate(g) << '\n';
    ok = ok && g.pass;
  }
  return gate && !ok ? kGateFailed : 0;
}

void PrintSweep(const bench::SweepResult& r) {
  for (const auto& c : r.controllers) {
    std::cout << c.controller.name << ": reached " << c.reached << "/" << c.runs.size()
              << ", failed " << c.failed << ", steady rmse " << c.steady_rmse << ", std "
              << c.steady_std << '\n';
  }
}

bench::SweepSpec MakeSweep(const bench::Scenario& base, int runs, std::uint64_t seed, int workers,
                           double duration) {
  bench::SweepSpec spec;
  spec.base = base;
  if (duration > 0) spec.base.duration = duration;
  spec.controllers = bench::StandardControllers(base.controller);
  spec.runs = runs;
  spec.seed = seed;
  spec.workers = workers;
  spec.keep_series = false;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal active inference arm experiments"};
  app.require_subcommand(1);
  Common c;

  // babble
  auto* babble = app.add_subcommand("babble", "generate a motor-babbling dataset");
  AddScenarioOptions(babble, c);
  std::size_t samples = 20000;
  std::uint64_t seed = 1;
  babble->add_option("--samples", samples, "number of samples")->capture_default_str();
  babble->add_option("--seed", seed, "sampling seed")->capture_default_str();
  babble->add_option("--out", c.out, "dataset file")->required();

  // train
  auto* train = app.add_subcommand("train", "train the generative model");
  AddScenarioOptions(train, c);
  std::string data_path, curve_path;
  mvae::TrainConfig tc;
  mvae::ModelConfig mc;
  train->add_option("--data", data_path, "dataset file (babbles --samples when absent)");
  train->add_option("--samples", samples, "samples to babble without --data")->capture_default_str();
  train->add_option("--epochs", tc.epochs)->capture_default_str();
  train->add_option("--batch", tc.batch_size)->capture_default_str();
  train->add_option("--lr", tc.learning_rate)->capture_default_str();
  train->add_option("--heldout", tc.heldout_fraction)->capture_default_str();
  train->add_option("--kl", tc.loss.kl_weight, "weight of the latent prior term")->capture_default_str();
  train->add_option("--latent", mc.latent_dim)->capture_default_str();
  train->add_option("--seed", seed, "babbling, initialisation and shuffling seed")->capture_default_str();
  train->add_option("--curve", curve_path, "write epoch,train_loss,heldout_loss CSV");
  train->add_option("--out", c.out, "model file")->required();
  train->add_flag("--gate", c.gate, "exit nonzero unless held-out loss halves");

  // run
  auto* run = app.add_subcommand("run", "run one closed-loop scenario");
  AddScenarioOptions(run, c);
  std::string mode;
  int frame_every = 0;
  bool frames = false;
  run->add_option("--model", c.model, "model file");
  run->add_option("--mode", mode, "maif, paif or pd (overrides controller.mode)");
  run->add_option("--out", c.out, "output directory")->required();
  run->add_flag("--frames", frames, "write PGM frames at the end of every goal slice");
  run->add_option("--frame-every", frame_every, "also write frames every N ticks");
  run->add_flag("--gate", c.gate, "exit nonzero unless the run is deterministic");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "random-goal sweep over maif, paif and pd");
  AddScenarioOptions(sweep, c);
  int runs = 50, workers = 0;
  double duration = 0.0;
  sweep->add_option("--model", c.model, "model file")->required();
  sweep->add_option("--runs", runs)->capture_default_str();
  sweep->add_option("--seed", seed, "goal and noise seed")->capture_default_str();
  sweep->add_option("--duration", duration, "seconds per run (default scenario.duration)");
  sweep->add_option("--workers", workers, "parallel runs, 0 = hardware threads")->capture_default_str();
  sweep->add_option("--out", c.out, "output directory");
  sweep->add_flag("--gate", c.gate, "check reaching, and the noise ordering when noise.q_std > 0");

  // adapt
  auto* adapt = app.add_subcommand("adapt", "rerun a sweep under gravity, stiffness and noise changes");
  AddScenarioOptions(adapt, c);
  std::string baseline, hash;
  double gravity = 24.79, stiffness = 0.01, q_std = 0.1;
  adapt->add_option("--model", c.model, "model file")->required();
  adapt->add_option("--baseline", baseline, "sweep output directory holding controllers.hash");
  adapt->add_option("--hash", hash, "registered controllers hash");
  adapt->add_option("--runs", runs)->capture_default_str();
  adapt->add_option("--seed", seed)->capture_default_str();
  adapt->add_option("--duration", duration, "seconds per run");
  adapt->add_option("--workers", workers)->capture_default_str();
  adapt->add_option("--gravity", gravity)->capture_default_str();
  adapt->add_option("--stiffness", stiffness)->capture_default_str();
  adapt->add_option("--q-std", q_std)->capture_default_str();
  adapt->add_option("--out", c.out, "output directory");
  adapt->add_flag("--gate", c.gate, "check maif reaching under gravity and stiffness");

  // modality
  auto* modality = app.add_subcommand("modality", "clean, noisy and occluded vision versus paif");
  AddScenarioOptions(modality, c);
  double image_std = 0.25;
  modality->add_option("--model", c.model, "model file")->required();
  modality->add_option("--image-std", image_std)->capture_default_str();
  modality->add_option("--out", c.out, "output directory");
  modality->add_flag("--gate", c.gate, "check the steady-state ordering");

  // mental
  auto* mental = app.add_subcommand("mental", "imagined run without the simulator");
  AddScenarioOptions(mental, c);
  mental->add_option("--model", c.model, "model file")->required();
  mental->add_option("--out", c.out, "output directory");
  mental->add_flag("--gate", c.gate, "also run closed loop and compare reaching ticks");

  // check-gradients
  auto* grads = app.add_subcommand("check-gradients", "finite-difference checks of every layer and decoder");
  int layer_repeats = 8, decoder_repeats = 4;
  grads->add_option("--layer-repeats", layer_repeats)->capture_default_str();
  grads->add_option("--decoder-repeats", decoder_repeats)->capture_default_str();
  grads->add_option("--latent", mc.latent_dim)->capture_default_str();
  grads->add_option("--seed", seed)->capture_default_str();
  grads->add_flag("--gate", c.gate, "exit nonzero on any failure");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*babble) {
      const bench::Scenario s = LoadScenario(c);
      const auto data = mvae::BabbleDataset(samples, mvae::DefaultBabblingRange(s.world.arm.dof()),
                                            s.world.arm, s.world.camera, seed);
      mvae::SaveDataset(c.out, data);
      std::cout << "wrote " << data.count << " samples to " << c.out << '\n';
      return 0;
    }
    if (*train) {
      const bench::Scenario s = LoadScenario(c);
      const auto start = std::chrono::steady_clock::now();
      const mvae::Dataset data =
          data_path.empty() ? mvae::BabbleDataset(samples, mvae::DefaultBabblingRange(s.world.arm.dof()),
                                                  s.world.arm, s.world.camera, seed)
                            : mvae::LoadDataset(data_path);
      mc.joints = data.joints;
      mc.height = data.height;
      mc.width = data.width;
      tc.seed = seed;
      std::ofstream curve;
      if (!curve_path.empty()) {
        curve.open(curve_path);
        curve << "epoch,train_loss,heldout_loss\n";
      }
      const mvae::TrainResult r = mvae::Train(mvae::MakeModel(mc, seed), data, tc,
                                              [&](const mvae::EpochStats& e) {
        std::cout << "epoch " << e.epoch << " train " << e.train_loss << " held-out "
                  << e.heldout_loss << std::endl;
        if (curve) curve << e.epoch << ',' << FormatDouble(e.train_loss) << ','
                         << FormatDouble(e.heldout_loss) << '\n';
      });
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      mvae::SaveModel(c.out, r.model);
      const double final_loss = r.curve.empty() ? r.initial_heldout_loss : r.curve.back().heldout_loss;
      return Report({bench::TrainingGate(r.initial_heldout_loss, final_loss, seconds)}, c.gate);
    }
    if (*run) {
      bench::Scenario s = LoadScenario(c);
      if (!mode.empty()) s.controller.mode = aif::ParseMode(mode);
      std::shared_ptr<const mvae::GenerativeModel> model;
      if (!c.model.empty()) model = LoadModelFile(c.model);
      bench::RunOptions options;
      if (frames || frame_every > 0) options.frames_dir = fs::path(c.out) / "frames";
      options.frame_every = frame_every;
      const bench::MetricSeries series = bench::RunScenario(s, model, options);
      bench::WriteRun(c.out, s, series);
      for (const auto& g : bench::Summarize(series, s)) {
        std::cout << "goal " << g.goal << ": ee " << g.ee_start << " -> " << g.ee_steady << '\n';
      }
      if (series.failed) std::cout << "safe stop: " << series.failure << '\n';
      if (c.gate) return Report({bench::DeterminismGate(s, model)}, true);
      return series.failed ? 1 : 0;
    }
    if (*sweep) {
      const bench::Scenario s = LoadScenario(c);
      const auto model = LoadModelFile(c.model);
      const bench::SweepSpec spec = MakeSweep(s, runs, seed, workers, duration);
      const auto out = OutDir(c.out);
      const bench::SweepResult r = bench::RandomGoalSweep(spec, model, out);
      if (out) std::ofstream(*out / "controllers.hash") << bench::ControllersHash(spec.controllers) << '\n';
      PrintSweep(r);
      std::vector<bench::GateResult> gates{bench::ReachingGate(r.at("maif"))};
      if (s.world.noise.q_std > 0) gates.push_back(bench::NoiseGate(r));
      return Report(gates, c.gate);
    }
    if (*adapt) {
      const bench::Scenario s = LoadScenario(c);
      const auto model = LoadModelFile(c.model);
      const bench::SweepSpec spec = MakeSweep(s, runs, seed, workers, duration);
      if (hash.empty() && !baseline.empty()) std::ifstream(fs::path(baseline) / "controllers.hash") >> hash;
      if (hash.empty()) throw ConfigError("adapt needs --baseline or --hash to freeze the controllers");
      const auto results = bench::AdaptationSuite(
          spec, bench::AdaptationVariations(gravity, stiffness, q_std), hash, model, OutDir(c.out));
      for (const auto& v : results) {
        std::cout << "[" << v.variation.name << "]\n";
        PrintSweep(v.sweep);
      }
      return Report({bench::AdaptationGate(results)}, c.gate);
    }
    if (*modality) {
      const bench::Scenario s = LoadScenario(c);
      const auto runs_out = bench::ModalityStudy(s, LoadModelFile(c.model), image_std, OutDir(c.out));
      for (const auto& r : runs_out) {
        std::cout << r.name << ": steady ee error " << bench::SteadyEndEffectorError(r.series, r.scenario)
                  << (r.series.failed ? " (safe stop)" : "") << '\n';
      }
      return Report({bench::OcclusionGate(runs_out)}, c.gate);
    }
    if (*mental) {
      bench::Scenario s = LoadScenario(c);
      const auto model = LoadModelFile(c.model);
      s.controller.mode = aif::Mode::kMental;
      const bench::MetricSeries m = bench::MentalRun(s, *model);
      if (!c.out.empty()) bench::WriteRun(c.out, s, m);
      for (const auto& g : bench::Summarize(m, s)) {
        std::cout << "goal " << g.goal << ": imagined joint error " << g.goal_error_start << " -> "
                  << g.goal_error_steady << '\n';
      }
      std::cout << "simulator reads " << m.simulator_reads << '\n';
      if (!c.gate) return 0;
      s.controller.mode = aif::Mode::kMaif;
      return Report({bench::MentalGate(s, m, bench::RunScenario(s, model))}, true);
    }
    if (*grads) {
      const auto r = bench::RunGradientSuite(mc, layer_repeats, decoder_repeats, seed);
      const int code = Report({bench::GradientGate(r)}, true);
      return c.gate ? code : (r.report.ok() ? 0 : 1);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
