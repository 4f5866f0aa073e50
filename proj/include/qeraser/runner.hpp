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

// Command-level operations shared by the CLI and the acceptance suite:
// single-shot metrics, parameter sweeps, screen simulations and the random
// identity check.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qeraser/apparatus.hpp"
#include "qeraser/format.hpp"
#include "qeraser/metrics.hpp"
#include "qeraser/scenario.hpp"
#include "qeraser/screen.hpp"

namespace qeraser {

// ---------------------------------------------------------------------------
// metrics

struct MetricsResult {
  TrialityReport evolved;
  TrialityReport closed_form;
  double discrepancy = 0.0;  // max |difference| over P, V, C, D
};

inline MetricsResult run_metrics(const ScenarioFile& scenario, Detector detector) {
  const ApparatusConfig cfg = to_config(scenario);
  MetricsResult r{evolved_triality(cfg, detector), closed_form_triality(cfg, detector), 0.0};
  r.discrepancy = max_route_discrepancy(r.evolved, r.closed_form);
  return r;
}

inline std::string format_report(const TrialityReport& r) {
  std::ostringstream os;
  os << "route=" << to_string(r.route) << " detector=" << to_string(r.detector)
     << " p=" << format_double(r.probability) << "\n"
     << "  P=" << format_double(r.P) << " V=" << format_double(r.V) << " C=" << format_double(r.C)
     << " D=" << format_double(r.D) << " purity=" << format_double(r.purity) << "\n"
     << "  residual_triality=" << format_double(r.residual_triality)
     << " residual_duality_purity=" << format_double(r.residual_duality_purity)
     << " residual_distinguishability=" << format_double(r.residual_distinguishability) << "\n";
  return os.str();
}

inline std::string format_metrics(const MetricsResult& m) {
  return format_report(m.evolved) + format_report(m.closed_form) +
         "max_route_discrepancy=" + format_double(m.discrepancy) + "\n";
}

// ---------------------------------------------------------------------------
// sweep

inline constexpr double kEmissionTolerance = 1e-10;

struct SweepRow {
  double swept_value = 0.0;
  std::optional<TrialityReport> report;  // empty when the detector never clicks
  double p_detector = 0.0;
};

// Throws ContractViolation if the report breaks any identity at `tol`.
inline void check_identities(const TrialityReport& e, const TrialityReport& c, double tol) {
  auto fail = [&](const std::string& what, double value) {
    throw ContractViolation(what + " residual " + format_double(value) + " exceeds " + format_double(tol));
  };
  for (const TrialityReport* r : {&e, &c}) {
    if (std::abs(r->residual_triality) > tol) fail("triality", r->residual_triality);
    if (std::abs(r->residual_duality_purity) > tol) fail("purity relation", r->residual_duality_purity);
    if (std::abs(r->residual_distinguishability) > tol) fail("distinguishability", r->residual_distinguishability);
  }
  const double d = max_route_discrepancy(e, c);
  if (d > tol) fail("route agreement", d);
}

// Evaluates every grid point (possibly on `workers` threads); rows come back
// in grid order.
inline std::vector<SweepRow> run_sweep(const ScenarioFile& scenario, Detector detector, unsigned workers = 1) {
  if (!scenario.sweep) throw ValidationError("scenario has no [sweep] section");
  const SweepSection sw = *scenario.sweep;
  const std::vector<double> grid = sweep_grid(sw);
  std::vector<SweepRow> rows(grid.size());
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        const ScenarioFile point = with_swept_value(scenario, sw.parameter, grid[k]);
        const ApparatusConfig cfg = to_config(point);
        SweepRow& row = rows[k];
        row.swept_value = grid[k];
        const DetectionOutcome out = detect(cfg, detector);
        row.p_detector = out.probability;
        if (!out.defined()) continue;
        const TrialityReport e = evolved_triality(cfg, detector);
        const TrialityReport c = closed_form_triality(cfg, detector);
        check_identities(e, c, kEmissionTolerance);
        row.report = e;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return rows;
}

inline constexpr std::string_view kSweepHeader = "swept_value,P,V,C,D,p_detector";
inline constexpr std::string_view kUndefinedCell = "undefined";

// Points where the detector never clicks keep their row, with `undefined`
// in the P, V, C and D columns.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << kSweepHeader << "\n";
  for (const auto& row : rows) {
    os << format_double(row.swept_value) << ',';
    if (row.report) {
      os << format_double(row.report->P) << ',' << format_double(row.report->V) << ','
         << format_double(row.report->C) << ',' << format_double(row.report->D) << ',';
    } else {
      for (int i = 0; i < 4; ++i) os << kUndefinedCell << ',';
    }
    os << format_double(row.p_detector) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// screen

struct ScreenResult {
  std::optional<Detector> detector;  // empty: no post-selection
  double probability = 1.0;
  FringeProfile profile;
  SampleSet samples;
  VisibilityEstimate estimate;
  double analytic_V = 0.0;
  bool agrees = false;  // |V_hat - V| <= 3 stderr
};

inline ScreenResult run_screen(const ScenarioFile& scenario, std::optional<Detector> detector,
                               unsigned workers = 1, std::size_t grid_points = 360) {
  const ApparatusConfig cfg = to_config(scenario);
  ScreenResult r;
  r.detector = detector;
  ComplexMat rho;
  if (detector) {
    const DetectionOutcome out = detect(cfg, *detector);
    r.probability = out.probability;
    rho = out.rho_gamma();
  } else {
    rho = unconditioned_rho_gamma(cfg);
  }
  r.profile = fringe_profile(rho, grid_points);
  r.samples = sample(r.profile, scenario.screen.samples, scenario.screen.seed, scenario.screen.bins, workers);
  r.estimate = estimate_visibility(r.samples);
  r.analytic_V = r.profile.analytic_V;
  r.agrees = std::abs(r.estimate.V_hat - r.analytic_V) <= 3.0 * r.estimate.std_error;
  return r;
}

inline std::string format_screen_summary(const ScreenResult& r) {
  std::ostringstream os;
  os << "detector=" << (r.detector ? std::string(to_string(*r.detector)) : std::string("none"))
     << " p=" << format_double(r.probability) << " samples=" << r.samples.n << "\n"
     << "analytic_V=" << format_double(r.analytic_V)
     << " analytic_offset=" << format_double(r.profile.analytic_offset) << "\n"
     << "estimated_V=" << format_double(r.estimate.V_hat) << " stderr=" << format_double(r.estimate.std_error)
     << " estimated_offset=" << format_double(r.estimate.offset_hat) << "\n"
     << "verdict=" << (r.agrees ? "agree" : "disagree") << " (3 sigma)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// check: identity suite over random configurations

// Random valid configuration; roughly one modulus in ten is pinned to an
// endpoint (0 or 1) so mirrors, removed splitters and q in {0, 1} show up.
inline ApparatusConfig random_config(SplitMix64& rng) {
  auto modulus_sq = [&] {
    const double u = rng.uniform();
    if (u < 0.05) return 0.0;
    if (u < 0.10) return 1.0;
    return rng.uniform();
  };
  auto phase = [&] { return kTwoPi * rng.uniform(); };
  auto splitter = [&] {
    const double r_sq = modulus_sq();
    return BeamSplitter::from_reflectance(r_sq, phase(), phase());
  };
  ApparatusConfig cfg;
  const double c1_sq = modulus_sq();
  cfg.c1 = std::polar(std::sqrt(c1_sq), phase());
  cfg.c2 = std::polar(std::sqrt(1.0 - c1_sq), phase());
  cfg.bs1 = splitter();
  cfg.bs2 = splitter();
  cfg.bs3 = splitter();
  cfg.q = std::polar(std::sqrt(modulus_sq()), phase());
  return cfg;
}

struct CheckResult {
  std::size_t configs = 0;
  std::size_t branches = 0;  // (config, D1/D2) pairs with p above the floor
  double max_triality_evolved = 0.0;
  double max_triality_closed = 0.0;
  double max_route_P = 0.0;
  double max_route_V = 0.0;
  double max_route_C = 0.0;
  double max_purity = 0.0;
  double max_distinguishability = 0.0;        // |D^2 - (P^2 + C^2)|, both routes
  double max_distinguishability_closed = 0.0; // |sqrt(P^2 + C^2) - sqrt(1 - 4 p1 p2 |q|^2)|
  double max_probability_closure = 0.0;       // |sum p_i - 1|
  double max_probability_closed_form = 0.0;   // |p_i(evolved) - p_i(closed form)|
  double max_visibility_excess = 0.0;         // max(0, V - |q|)
  double tolerance = kEmissionTolerance;

  bool passed() const {
    return max_triality_evolved <= tolerance && max_triality_closed <= tolerance && max_route_P <= tolerance &&
           max_route_V <= tolerance && max_route_C <= tolerance && max_purity <= tolerance &&
           max_distinguishability <= tolerance && max_distinguishability_closed <= tolerance &&
           max_probability_closure <= tolerance && max_probability_closed_form <= tolerance &&
           max_visibility_excess <= tolerance;
  }
};

inline constexpr double kCheckProbabilityFloor = 1e-6;

inline CheckResult run_check(std::size_t n, std::uint64_t seed, double tolerance = kEmissionTolerance) {
  CheckResult res;
  res.tolerance = tolerance;
  auto upd = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = SplitMix64::for_index(seed, i);
    const ApparatusConfig cfg = random_config(rng);
    const ComplexVec state = evolved_state(cfg);
    ++res.configs;

    double total = 0.0;
    for (Detector d : kAllDetectors) {
      const DetectionOutcome out = detect(state, d);
      total += out.probability;
      upd(res.max_probability_closed_form, out.probability - click_probability(cfg, d));
    }
    upd(res.max_probability_closure, total - 1.0);

    for (Detector d : {Detector::kD1, Detector::kD2}) {
      if (click_probability(cfg, d) <= kCheckProbabilityFloor) continue;
      ++res.branches;
      const TrialityReport e = evolved_triality(cfg, d);
      const TrialityReport c = closed_form_triality(cfg, d);
      upd(res.max_triality_evolved, e.residual_triality);
      upd(res.max_triality_closed, c.residual_triality);
      upd(res.max_route_P, e.P - c.P);
      upd(res.max_route_V, e.V - c.V);
      upd(res.max_route_C, e.C - c.C);
      upd(res.max_purity, e.residual_duality_purity);
      upd(res.max_purity, c.residual_duality_purity);
      upd(res.max_distinguishability, e.residual_distinguishability);
      upd(res.max_distinguishability, c.residual_distinguishability);
      upd(res.max_distinguishability_closed, distinguishability(e.P, e.C) - c.D);
      res.max_visibility_excess = std::max({res.max_visibility_excess, e.V - std::abs(cfg.q), c.V - std::abs(cfg.q)});
    }
  }
  return res;
}

inline std::string format_check(const CheckResult& r) {
  std::ostringstream os;
  os << "configs=" << r.configs << " branches=" << r.branches << " tol=" << format_double(r.tolerance) << "\n"
     << "max_triality_evolved=" << format_double(r.max_triality_evolved) << "\n"
     << "max_triality_closed_form=" << format_double(r.max_triality_closed) << "\n"
     << "max_route_P=" << format_double(r.max_route_P) << "\n"
     << "max_route_V=" << format_double(r.max_route_V) << "\n"
     << "max_route_C=" << format_double(r.max_route_C) << "\n"
     << "max_purity_relation=" << format_double(r.max_purity) << "\n"
     << "max_distinguishability=" << format_double(r.max_distinguishability) << "\n"
     << "max_distinguishability_closed_form=" << format_double(r.max_distinguishability_closed) << "\n"
     << "max_probability_closure=" << format_double(r.max_probability_closure) << "\n"
     << "max_probability_closed_form=" << format_double(r.max_probability_closed_form) << "\n"
     << "max_visibility_excess=" << format_double(r.max_visibility_excess) << "\n"
     << "result=" << (r.passed() ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace qeraser
