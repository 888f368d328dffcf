// Copyright 2026 The occrisk Authors
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

// Command-line front end: scenario generation, single runs, batches, gain
// reports and config resolution.
//
// Exit codes: 0 success, 1 unsafe episode outcome, 2 configuration or usage
// error, 3 numeric failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "occrisk/harness.h"
#include "occrisk/lqr.h"
#include "occrisk/run_config.h"
#include "occrisk/scenario_io.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUnsafe = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Flags {
  std::string config;
  std::string family;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> workers;
  std::vector<std::string> controllers;
  std::optional<std::string> out;
  std::optional<double> dt;
  std::optional<std::string> trace;
  std::string scenario;
  std::string mode = "both";
  std::optional<double> sweep_min;
  std::optional<double> sweep_max;
  int sweep_samples = 50;
};

void AddCommonFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Run configuration JSON file");
  cmd->add_option("--family", f.family, "Scenario family: sc1, sc2 or sc3");
  cmd->add_option("--seed", f.seed, "Scenario seed (master seed for batch)");
  cmd->add_option("--dt", f.dt, "Simulation tick in seconds");
}

occrisk::RunConfig Resolve(const Flags& f) {
  const json doc =
      f.config.empty() ? json(nullptr) : occrisk::ReadJsonFile(f.config);
  occrisk::RunOverrides o;
  if (!f.family.empty()) o.family = occrisk::ParseFamily(f.family);
  o.seed = f.seed;
  o.episodes = f.episodes;
  o.workers = f.workers;
  if (!f.controllers.empty()) o.controllers = f.controllers;
  o.out = f.out;
  o.dt = f.dt;
  o.trace = f.trace;
  return occrisk::ResolveRunConfig(doc, o);
}

// Fails with ConfigError unless `path`'s directory exists.
void RequireParentDirectory(const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw occrisk::ConfigError("directory '" + parent.string() +
                               "' does not exist");
  }
}

int CmdGenerate(const Flags& f) {
  const occrisk::RunConfig config = Resolve(f);
  if (config.out.empty()) throw occrisk::ConfigError("generate needs --out");
  const fs::path out = config.out;
  RequireParentDirectory(out);
  occrisk::ScenarioConfig scenario = config.scenario;
  scenario.seed = config.seed;
  const occrisk::WorldState world = occrisk::GenerateScenario(scenario);
  try {
    occrisk::WriteScenarioFile(out, world, &scenario);
  } catch (const std::exception& e) {
    std::error_code ignored;
    fs::remove(out, ignored);
    throw occrisk::ConfigError(e.what());
  }
  std::cout << "wrote " << out.string() << " (" << world.parked_cars.size()
            << " parked cars, " << world.pedestrians.size()
            << " pedestrians)\n";
  return kExitOk;
}

int CmdRun(const Flags& f) {
  occrisk::RunConfig config = Resolve(f);
  occrisk::WorldState world;
  if (!f.scenario.empty()) {
    world = occrisk::ReadScenarioFile(f.scenario);
  } else {
    occrisk::ScenarioConfig scenario = config.scenario;
    scenario.seed = config.seed;
    world = occrisk::GenerateScenario(scenario);
  }
  if (!config.out.empty()) RequireParentDirectory(config.out);
  if (!config.trace.empty()) RequireParentDirectory(config.trace);
  config.simulation.record_trace = !config.trace.empty();

  const occrisk::EpisodeRecord record =
      occrisk::RunEpisode(world, config.simulation, config.controller,
                          config.family, config.seed);
  if (!config.out.empty()) {
    json doc = occrisk::ToJson(record);
    doc["config"] = occrisk::ToJson(config);
    occrisk::WriteTextFile(config.out, doc.dump(2) + "\n");
  }
  if (!config.trace.empty()) occrisk::WriteTraceJsonl(config.trace, record);

  std::cout << record.controller << ' ' << occrisk::ToString(record.family)
            << " seed " << record.seed << ": "
            << occrisk::ToString(record.outcome) << " after "
            << record.duration << " s, yields "
            << record.successful_yields << '/' << record.unsuccessful_yields
            << ", emergency " << record.emergency_time << " s\n";
  switch (record.outcome) {
    case occrisk::Outcome::kSuccess:
      return kExitOk;
    case occrisk::Outcome::kCollision:
    case occrisk::Outcome::kTimeout:
      return kExitUnsafe;
    case occrisk::Outcome::kFailed:
      std::cerr << "episode failed: " << record.diagnostic << '\n';
      return kExitNumeric;
  }
  return kExitNumeric;
}

int CmdBatch(const Flags& f) {
  occrisk::RunConfig config = Resolve(f);
  if (config.out.empty()) throw occrisk::ConfigError("batch needs --out");
  const fs::path out = config.out;
  const fs::path trace_dir = config.trace;
  config.simulation.record_trace = !trace_dir.empty();
  const occrisk::BatchOptions options = config.MakeBatchOptions();
  options.Validate();

  fs::create_directories(out);
  if (!trace_dir.empty()) fs::create_directories(trace_dir);

  occrisk::EpisodeCallback on_episode;
  if (!trace_dir.empty()) {
    on_episode = [&trace_dir](int episode,
                              const occrisk::EpisodeRecord& record) {
      std::ostringstream name;
      name << record.controller << '_' << std::setw(5) << std::setfill('0')
           << episode << ".jsonl";
      occrisk::WriteTraceJsonl(trace_dir / name.str(), record);
    };
  }
  const occrisk::BatchResult result =
      occrisk::RunBatch(options, config.simulation, on_episode);

  occrisk::WriteTextFile(out / "summary.csv",
                         occrisk::SummaryCsv(result.summary));
  occrisk::WriteTextFile(out / "summary.json",
                         occrisk::ToJson(result.summary).dump(2) + "\n");
  occrisk::WriteTextFile(out / "episodes.csv",
                         occrisk::EpisodeIndexCsv(result.index));
  occrisk::WriteTextFile(out / "config.json",
                         occrisk::ToJson(config).dump(2) + "\n");
  std::cout << occrisk::SummaryCsv(result.summary);
  return kExitOk;
}

void PrintReport(const occrisk::GainReport& r) {
  auto row = [](const Eigen::MatrixXd& m) {
    std::ostringstream s;
    s << '[';
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      s << (i ? ", " : "") << std::setprecision(6) << m(i);
    }
    s << ']';
    return s.str();
  };
  std::cout << occrisk::ToString(r.mode) << " dt=" << r.dt
            << " K_synth=" << row(r.synthesized)
            << " K_ref=" << row(r.reference)
            << " deviation=" << r.deviation
            << " |eig(A-BK_synth)|=" << row(r.synthesized_moduli)
            << " |eig(A-BK_ref)|=" << row(r.reference_moduli)
            << " iterations=" << r.iterations << '\n';
}

int CmdGains(const Flags& f) {
  const occrisk::RunConfig config = Resolve(f);
  const occrisk::GainSet& gains = config.simulation.controller.gains;
  std::vector<occrisk::GainMode> modes;
  if (f.mode == "both") {
    modes = {occrisk::GainMode::kCruise, occrisk::GainMode::kYield};
  } else {
    modes = {occrisk::ParseGainMode(f.mode)};
  }
  const bool sweep = f.sweep_min || f.sweep_max;
  for (occrisk::GainMode mode : modes) {
    if (!sweep) {
      PrintReport(occrisk::MakeGainReport(
          mode, config.simulation.controller.dt, gains));
      continue;
    }
    const std::vector<occrisk::GainReport> reports = occrisk::SweepGainReports(
        mode, f.sweep_min.value_or(0.01), f.sweep_max.value_or(0.5),
        f.sweep_samples, gains);
    const occrisk::GainReport* best = nullptr;
    for (const occrisk::GainReport& r : reports) {
      PrintReport(r);
      if (best == nullptr || r.deviation < best->deviation) best = &r;
    }
    if (best != nullptr) {
      std::cout << "closest " << occrisk::ToString(mode) << ": ";
      PrintReport(*best);
    }
  }
  return kExitOk;
}

int CmdConfig(const Flags& f) {
  const occrisk::RunConfig config = Resolve(f);
  const std::string text = occrisk::ToJson(config).dump(2) + "\n";
  if (config.out.empty()) {
    std::cout << text;
  } else {
    RequireParentDirectory(config.out);
    occrisk::WriteTextFile(config.out, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occlusion-aware longitudinal driving simulator"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* generate = app.add_subcommand("generate", "Write one scenario");
  AddCommonFlags(generate, f);
  generate->add_option("--out", f.out, "Scenario file to write");

  CLI::App* run = app.add_subcommand("run", "Simulate one episode");
  AddCommonFlags(run, f);
  run->add_option("--controller", f.controllers,
                  "proposed, B1, B2 or B3")
      ->delimiter(',');
  run->add_option("--scenario", f.scenario,
                  "Scenario file to run instead of a generated one");
  run->add_option("--out", f.out, "Episode record JSON to write");
  run->add_option("--trace", f.trace, "Per-tick JSONL trace to write");

  CLI::App* batch = app.add_subcommand("batch", "Run paired-seed episodes");
  AddCommonFlags(batch, f);
  batch->add_option("--controller", f.controllers,
                    "Controllers to compare (repeat or comma-separate)")
      ->delimiter(',');
  batch->add_option("--episodes", f.episodes, "Episodes per controller");
  batch->add_option("--workers", f.workers, "Worker threads, 0 = all cores");
  batch->add_option("--out", f.out, "Output directory");
  batch->add_option("--trace", f.trace, "Directory for per-episode traces");

  CLI::App* gains = app.add_subcommand("gains", "Synthesize and check gains");
  AddCommonFlags(gains, f);
  gains->add_option("--mode", f.mode, "cruise, yield or both");
  gains->add_option("--sweep-min", f.sweep_min, "Sweep dt from this value");
  gains->add_option("--sweep-max", f.sweep_max, "Sweep dt up to this value");
  gains->add_option("--sweep-samples", f.sweep_samples, "Sweep sample count");

  CLI::App* config = app.add_subcommand("config", "Print the resolved config");
  AddCommonFlags(config, f);
  config->add_option("--controller", f.controllers, "Controller override")
      ->delimiter(',');
  config->add_option("--episodes", f.episodes, "Episode count override");
  config->add_option("--workers", f.workers, "Worker count override");
  config->add_option("--out", f.out, "Write to this file instead of stdout");
  config->add_option("--trace", f.trace, "Trace path override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (generate->parsed()) return CmdGenerate(f);
    if (run->parsed()) return CmdRun(f);
    if (batch->parsed()) return CmdBatch(f);
    if (gains->parsed()) return CmdGains(f);
    return CmdConfig(f);
  } catch (const occrisk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const occrisk::SynthesisError& e) {
    std::cerr << "synthesis failed: " << e.what() << " (iterations "
              << e.iterations() << ", residual " << e.residual() << ")\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}
