// Copyright 2026 The qeraser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qeraser: command-line front end for the generalized quantum-eraser model.
//
// Exit codes: 0 success, 1 validation failure (bad arguments, unreadable or
// invalid scenario), 2 numerical contract violation (including a detector
// that never clicks, or a failed identity check).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qeraser/qeraser.hpp"

namespace fs = std::filesystem;
using namespace qeraser;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitContract = 2;
constexpr const char* kOutDirEnv = "QERASER_OUT_DIR";

struct ValidationFailure {
  std::string message;
};

struct ScenarioSource {
  std::string file;
  std::string preset;
};

void add_scenario_options(CLI::App* cmd, ScenarioSource& src) {
  cmd->add_option("file", src.file, "Scenario file");
  cmd->add_option("--preset", src.preset, "Built-in scenario: fig4a, fig4b, fig4c, fig4d, conventional, which-path");
}

std::pair<ScenarioFile, std::string> load_scenario(const ScenarioSource& src) {
  if (!src.preset.empty() && !src.file.empty()) throw ValidationFailure{"give either a scenario file or --preset, not both"};
  if (!src.preset.empty()) {
    auto s = presets::by_name(src.preset);
    if (!s) throw ValidationFailure{"unknown preset '" + src.preset + "'"};
    return {*s, src.preset};
  }
  if (src.file.empty()) throw ValidationFailure{"a scenario file or --preset is required"};
  std::ifstream in(src.file, std::ios::binary);
  if (!in) throw ValidationFailure{"cannot read '" + src.file + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  ParseResult parsed = parse_scenario(buf.str());
  if (!parsed.ok()) {
    std::string msg;
    for (const auto& d : parsed.diagnostics) msg += src.file + ":" + format_diagnostic(d) + "\n";
    msg.pop_back();
    throw ValidationFailure{msg};
  }
  return {*parsed.scenario, fs::path(src.file).stem().string()};
}

Detector require_detector(const std::string& name) {
  const auto d = parse_detector(name);
  if (!d) throw ValidationFailure{"unknown detector '" + name + "' (expected D1, D2, D3 or D4)"};
  return *d;
}

std::optional<fs::path> output_dir(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return fs::path(env);
  return std::nullopt;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationFailure{"cannot write '" + path.string() + "'"};
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized quantum eraser: triality metrics, sweeps and screen simulations"};
  app.require_subcommand(1);

  ScenarioSource src;
  std::string detector_name = "D1";
  std::string out_flag;
  unsigned jobs = 1;
  std::size_t check_n = 10000;
  std::uint64_t check_seed = 1;
  double check_tol = kEmissionTolerance;
  std::string validate_file;

  auto* metrics = app.add_subcommand("metrics", "P, V, C, D for one detector via both derivation routes");
  add_scenario_options(metrics, src);
  metrics->add_option("--detector", detector_name, "D1..D4")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and emit swept_value,P,V,C,D,p_detector CSV");
  add_scenario_options(sweep, src);
  sweep->add_option("--detector", detector_name, "D1..D4")->capture_default_str();
  sweep->add_option("--out", out_flag, std::string("Output directory (default: $") + kOutDirEnv + ", else stdout)");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();

  auto* screen = app.add_subcommand("screen", "Monte Carlo photon positions on the screen for one detector");
  add_scenario_options(screen, src);
  screen->add_option("--detector", detector_name, "D1..D4, or 'none' for no post-selection")->capture_default_str();
  screen->add_option("--out", out_flag, std::string("Output directory (default: $") + kOutDirEnv + ", else stdout)");
  screen->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();

  auto* check = app.add_subcommand("check", "Run the identity suite on random configurations");
  check->add_option("--n", check_n, "Number of random configurations")->capture_default_str();
  check->add_option("--seed", check_seed, "Master seed")->capture_default_str();
  check->add_option("--tol", check_tol, "Tolerance on every residual")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Parse a scenario file and print its canonical form");
  validate->add_option("file", validate_file, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*metrics) {
      const auto [scenario, name] = load_scenario(src);
      std::cout << format_metrics(run_metrics(scenario, require_detector(detector_name)));
    } else if (*sweep) {
      const auto [scenario, name] = load_scenario(src);
      if (!scenario.sweep) throw ValidationFailure{"scenario has no [sweep] section"};
      const Detector det = require_detector(detector_name);
      const std::string csv = sweep_csv(run_sweep(scenario, det, jobs));
      if (const auto dir = output_dir(out_flag)) {
        const fs::path path = *dir / ("sweep_" + name + "_" + std::string(to_string(det)) + ".csv");
        write_file(path, csv);
        std::cout << path.string() << "\n";
      } else {
        std::cout << csv;
      }
    } else if (*screen) {
      const auto [scenario, name] = load_scenario(src);
      std::optional<Detector> det;
      if (detector_name != "none") det = require_detector(detector_name);
      const ScreenResult r = run_screen(scenario, det, jobs);
      std::cout << format_screen_summary(r);
      if (const auto dir = output_dir(out_flag)) {
        const std::string stem = "screen_" + name + "_" + (det ? std::string(to_string(*det)) : "none");
        write_file(*dir / (stem + "_histogram.csv"), histogram_csv(r.samples));
        write_file(*dir / (stem + "_profile.csv"), profile_csv(r.profile));
        std::cout << (*dir / (stem + "_histogram.csv")).string() << "\n"
                  << (*dir / (stem + "_profile.csv")).string() << "\n";
      } else {
        std::cout << "\n" << histogram_csv(r.samples);
      }
    } else if (*check) {
      const CheckResult r = run_check(check_n, check_seed, check_tol);
      std::cout << format_check(r);
      return r.passed() ? 0 : kExitContract;
    } else if (*validate) {
      std::ifstream in(validate_file, std::ios::binary);
      if (!in) throw ValidationFailure{"cannot read '" + validate_file + "'"};
      std::ostringstream buf;
      buf << in.rdbuf();
      const ParseResult parsed = parse_scenario(buf.str());
      if (!parsed.ok()) {
        std::cout << format_diagnostics(parsed.diagnostics);
        return kExitValidation;
      }
      std::cout << serialize(*parsed.scenario);
    }
  } catch (const ValidationFailure& e) {
    std::cerr << "qeraser: " << e.message << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "qeraser: " << e.what() << "\n";
    return kExitValidation;
  } catch (const StructuralError& e) {
    std::cerr << "qeraser: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ContractViolation& e) {
    std::cerr << "qeraser: " << e.what() << "\n";
    return kExitContract;
  }
  return 0;
}
