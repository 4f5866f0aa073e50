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

// Scenario files: a sectioned key = value text format.
//
//   # comment (anywhere on a line)
//   [source]     c1_sq (required), c1_phase, c2_phase
//   [bs1] [bs2] [bs3]
//                r_sq (required), r_phase, t_phase
//   [polarizer]  q_abs (required), q_phase
//   [sweep]      parameter = q_abs | c1_abs | r1_abs | r3_abs (required),
//                from, to (required), steps (default 101)
//   [screen]     samples (default 100000), seed (default 1), bins (default 32)
//
// Keys and section names are case-sensitive. Phases are radians. Squared
// moduli, |q| and sweep endpoints must lie in [0, 1]. Parsing never throws;
// problems come back as line/column diagnostics.

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qeraser/apparatus.hpp"
#include "qeraser/format.hpp"

namespace qeraser {

enum class SweepParameter { kQAbs, kC1Abs, kR1Abs, kR3Abs };

inline std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kQAbs: return "q_abs";
    case SweepParameter::kC1Abs: return "c1_abs";
    case SweepParameter::kR1Abs: return "r1_abs";
    case SweepParameter::kR3Abs: return "r3_abs";
  }
  return "?";
}

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view s) {
  if (s == "q_abs") return SweepParameter::kQAbs;
  if (s == "c1_abs") return SweepParameter::kC1Abs;
  if (s == "r1_abs") return SweepParameter::kR1Abs;
  if (s == "r3_abs") return SweepParameter::kR3Abs;
  return std::nullopt;
}

struct SourceSection {
  double c1_sq = 0.5;
  double c1_phase = 0.0;
  double c2_phase = 0.0;
  friend bool operator==(const SourceSection&, const SourceSection&) = default;
};

struct BeamSplitterSection {
  double r_sq = 1.0;
  double r_phase = 0.0;
  double t_phase = 0.0;
  friend bool operator==(const BeamSplitterSection&, const BeamSplitterSection&) = default;
};

struct PolarizerSection {
  double q_abs = 1.0;
  double q_phase = 0.0;
  friend bool operator==(const PolarizerSection&, const PolarizerSection&) = default;
};

inline constexpr std::size_t kDefaultSweepSteps = 101;

struct SweepSection {
  SweepParameter parameter = SweepParameter::kQAbs;
  double from = 0.0;
  double to = 1.0;
  std::size_t steps = kDefaultSweepSteps;
  friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct ScreenSection {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t bins = 32;
  friend bool operator==(const ScreenSection&, const ScreenSection&) = default;
};

struct ScenarioFile {
  SourceSection source;
  std::array<BeamSplitterSection, 3> bs{};
  PolarizerSection polarizer;
  std::optional<SweepSection> sweep;
  ScreenSection screen;
  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based; 0 for whole-file problems
  std::size_t column = 0;
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline std::string format_diagnostic(const Diagnostic& d) {
  if (d.line == 0) return "error: " + d.message;
  return std::to_string(d.line) + ":" + std::to_string(d.column) + ": error: " + d.message;
}

inline std::string format_diagnostics(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) out += format_diagnostic(d) + "\n";
  return out;
}

struct ParseResult {
  std::optional<ScenarioFile> scenario;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return scenario.has_value(); }
};

namespace detail {

enum class ValueKind { kUnitReal, kPhase, kSweepParameter, kStepCount, kSampleCount, kBinCount, kSeed };

struct KeySpec {
  std::string_view name;
  ValueKind kind;
  bool required;
};

struct SectionSpec {
  std::string_view name;
  std::vector<KeySpec> keys;
};

inline const std::vector<SectionSpec>& section_specs() {
  static const std::vector<SectionSpec> specs = [] {
    const std::vector<KeySpec> bs{{"r_sq", ValueKind::kUnitReal, true},
                                  {"r_phase", ValueKind::kPhase, false},
                                  {"t_phase", ValueKind::kPhase, false}};
    return std::vector<SectionSpec>{
        {"source",
         {{"c1_sq", ValueKind::kUnitReal, true},
          {"c1_phase", ValueKind::kPhase, false},
          {"c2_phase", ValueKind::kPhase, false}}},
        {"bs1", bs},
        {"bs2", bs},
        {"bs3", bs},
        {"polarizer", {{"q_abs", ValueKind::kUnitReal, true}, {"q_phase", ValueKind::kPhase, false}}},
        {"sweep",
         {{"parameter", ValueKind::kSweepParameter, true},
          {"from", ValueKind::kUnitReal, true},
          {"to", ValueKind::kUnitReal, true},
          {"steps", ValueKind::kStepCount, false}}},
        {"screen",
         {{"samples", ValueKind::kSampleCount, false},
          {"seed", ValueKind::kSeed, false},
          {"bins", ValueKind::kBinCount, false}}},
    };
  }();
  return specs;
}

inline constexpr std::array<std::string_view, 5> kRequiredSections{"source", "bs1", "bs2", "bs3", "polarizer"};

inline const SectionSpec* find_section(std::string_view name) {
  for (const auto& s : section_specs())
    if (s.name == name) return &s;
  return nullptr;
}

inline const KeySpec* find_key(const SectionSpec& s, std::string_view name) {
  for (const auto& k : s.keys)
    if (k.name == name) return &k;
  return nullptr;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Half-open [begin, end) of the trimmed text inside [begin, end).
inline std::pair<std::size_t, std::size_t> trim(std::string_view s, std::size_t begin, std::size_t end) {
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return {begin, end};
}

inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> parse_unsigned(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Entry {
  std::string_view value;
  std::size_t line;
  std::size_t column;
};

}  // namespace detail

inline ParseResult parse_scenario(std::string_view text) {
  using namespace detail;
  ParseResult result;
  auto& diags = result.diagnostics;
  auto diag = [&](std::size_t line, std::size_t col, std::string msg) {
    diags.push_back({line, col, std::move(msg)});
  };

  std::map<std::string, std::map<std::string, Entry>> entries;
  std::map<std::string, std::size_t> section_line;
  const SectionSpec* current = nullptr;
  bool skipping_section = false;  // inside an unknown or duplicate section

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    std::size_t end = eol;
    const std::size_t hash = text.find('#', pos);
    if (hash != std::string_view::npos && hash < end) end = hash;
    const auto [b, e] = trim(text, pos, end);
    const auto col = [&](std::size_t at) { return at - pos + 1; };

    if (b < e) {
      const std::string_view body = text.substr(b, e - b);
      if (body.front() == '[') {
        if (body.back() != ']' || body.size() < 3) {
          diag(line_no, col(b), "malformed section header");
          skipping_section = true;
          current = nullptr;
        } else {
          const auto [nb, ne] = trim(text, b + 1, e - 1);
          const std::string name(text.substr(nb, ne - nb));
          current = find_section(name);
          skipping_section = false;
          if (!current) {
            diag(line_no, col(nb), "unknown section [" + name + "]");
            skipping_section = true;
          } else if (section_line.count(name)) {
            diag(line_no, col(nb),
                 "duplicate section [" + name + "] (first defined on line " + std::to_string(section_line[name]) + ")");
            skipping_section = true;
            current = nullptr;
          } else {
            section_line[name] = line_no;
            entries[name];
          }
        }
      } else {
        const std::size_t eq = text.find('=', b);
        if (eq == std::string_view::npos || eq >= e) {
          diag(line_no, col(b), "expected 'key = value' or '[section]'");
        } else {
          const auto [kb, ke] = trim(text, b, eq);
          const auto [vb, ve] = trim(text, eq + 1, e);
          const std::string key(text.substr(kb, ke - kb));
          if (key.empty()) {
            diag(line_no, col(b), "missing key before '='");
          } else if (vb == ve) {
            diag(line_no, col(eq), "missing value for key '" + key + "'");
          } else if (skipping_section) {
            // Already reported at the section header.
          } else if (!current) {
            diag(line_no, col(kb), "key '" + key + "' appears before any section");
          } else if (!find_key(*current, key)) {
            diag(line_no, col(kb), "unknown key '" + key + "' in section [" + std::string(current->name) + "]");
          } else {
            auto& sec = entries[std::string(current->name)];
            if (auto it = sec.find(key); it != sec.end()) {
              diag(line_no, col(kb),
                   "duplicate key '" + key + "' (first defined on line " + std::to_string(it->second.line) + ")");
            } else {
              sec.emplace(key, Entry{text.substr(vb, ve - vb), line_no, col(vb)});
            }
          }
        }
      }
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }

  // Value checks.
  std::map<std::string, std::map<std::string, double>> reals;
  std::map<std::string, std::map<std::string, std::uint64_t>> ints;
  SweepParameter sweep_param = SweepParameter::kQAbs;
  for (const auto& [sname, keys] : entries) {
    const SectionSpec* spec = find_section(sname);
    for (const auto& [kname, entry] : keys) {
      const KeySpec* k = find_key(*spec, kname);
      const std::string v(entry.value);
      switch (k->kind) {
        case ValueKind::kUnitReal:
        case ValueKind::kPhase: {
          const auto x = parse_real(entry.value);
          if (!x) {
            diag(entry.line, entry.column, "invalid number '" + v + "' for key '" + kname + "'");
          } else if (k->kind == ValueKind::kUnitReal && (*x < 0.0 || *x > 1.0)) {
            diag(entry.line, entry.column, "value " + v + " for key '" + kname + "' is out of range [0, 1]");
          } else {
            reals[sname][kname] = *x;
          }
          break;
        }
        case ValueKind::kSweepParameter: {
          if (const auto p = parse_sweep_parameter(entry.value)) {
            sweep_param = *p;
          } else {
            diag(entry.line, entry.column,
                 "unknown sweep parameter '" + v + "' (expected q_abs, c1_abs, r1_abs or r3_abs)");
          }
          break;
        }
        case ValueKind::kStepCount:
        case ValueKind::kSampleCount:
        case ValueKind::kBinCount:
        case ValueKind::kSeed: {
          const auto x = parse_unsigned(entry.value);
          if (!x) {
            diag(entry.line, entry.column, "invalid integer '" + v + "' for key '" + kname + "'");
            break;
          }
          std::uint64_t lo = 0, hi = UINT64_MAX;
          if (k->kind == ValueKind::kStepCount) lo = 2, hi = 1000000;
          if (k->kind == ValueKind::kSampleCount) lo = 100, hi = 100000000;
          if (k->kind == ValueKind::kBinCount) lo = 1, hi = 100000;
          if (*x < lo || *x > hi) {
            diag(entry.line, entry.column,
                 "value " + v + " for key '" + kname + "' is out of range [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
          } else {
            ints[sname][kname] = *x;
          }
          break;
        }
      }
    }
  }

  for (std::string_view s : kRequiredSections)
    if (!entries.count(std::string(s))) diag(0, 0, "missing required section [" + std::string(s) + "]");
  for (const auto& [sname, keys] : entries) {
    const SectionSpec* spec = find_section(sname);
    for (const auto& k : spec->keys)
      if (k.required && !keys.count(std::string(k.name)))
        diag(section_line[sname], 1,
             "section [" + sname + "] is missing required key '" + std::string(k.name) + "'");
  }

  if (!diags.empty()) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
      const auto ka = a.line == 0 ? SIZE_MAX : a.line, kb = b.line == 0 ? SIZE_MAX : b.line;
      return ka != kb ? ka < kb : a.column < b.column;
    });
    return result;
  }

  auto real_or = [&](const std::string& s, const std::string& k, double def) {
    const auto& m = reals[s];
    const auto it = m.find(k);
    return it == m.end() ? def : it->second;
  };
  auto int_or = [&](const std::string& s, const std::string& k, std::uint64_t def) {
    const auto& m = ints[s];
    const auto it = m.find(k);
    return it == m.end() ? def : it->second;
  };

  ScenarioFile sc;
  sc.source = {real_or("source", "c1_sq", 0.5), real_or("source", "c1_phase", 0.0),
               real_or("source", "c2_phase", 0.0)};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string s = "bs" + std::to_string(i + 1);
    sc.bs[i] = {real_or(s, "r_sq", 1.0), real_or(s, "r_phase", 0.0), real_or(s, "t_phase", 0.0)};
  }
  sc.polarizer = {real_or("polarizer", "q_abs", 1.0), real_or("polarizer", "q_phase", 0.0)};
  if (entries.count("sweep"))
    sc.sweep = SweepSection{sweep_param, real_or("sweep", "from", 0.0), real_or("sweep", "to", 1.0),
                            static_cast<std::size_t>(int_or("sweep", "steps", kDefaultSweepSteps))};
  sc.screen = {static_cast<std::size_t>(int_or("screen", "samples", ScreenSection{}.samples)),
               int_or("screen", "seed", ScreenSection{}.seed),
               static_cast<std::size_t>(int_or("screen", "bins", ScreenSection{}.bins))};
  result.scenario = sc;
  return result;
}

// Canonical text form; parse_scenario(serialize(s)) reproduces s exactly.
inline std::string serialize(const ScenarioFile& s) {
  std::ostringstream os;
  os << "[source]\n"
     << "c1_sq = " << format_double(s.source.c1_sq) << "\n"
     << "c1_phase = " << format_double(s.source.c1_phase) << "\n"
     << "c2_phase = " << format_double(s.source.c2_phase) << "\n";
  for (std::size_t i = 0; i < 3; ++i)
    os << "\n[bs" << i + 1 << "]\n"
       << "r_sq = " << format_double(s.bs[i].r_sq) << "\n"
       << "r_phase = " << format_double(s.bs[i].r_phase) << "\n"
       << "t_phase = " << format_double(s.bs[i].t_phase) << "\n";
  os << "\n[polarizer]\n"
     << "q_abs = " << format_double(s.polarizer.q_abs) << "\n"
     << "q_phase = " << format_double(s.polarizer.q_phase) << "\n";
  if (s.sweep)
    os << "\n[sweep]\n"
       << "parameter = " << to_string(s.sweep->parameter) << "\n"
       << "from = " << format_double(s.sweep->from) << "\n"
       << "to = " << format_double(s.sweep->to) << "\n"
       << "steps = " << s.sweep->steps << "\n";
  os << "\n[screen]\n"
     << "samples = " << s.screen.samples << "\n"
     << "seed = " << s.screen.seed << "\n"
     << "bins = " << s.screen.bins << "\n";
  return os.str();
}

inline ApparatusConfig to_config(const ScenarioFile& s) {
  ApparatusConfig cfg;
  cfg.c1 = std::polar(std::sqrt(s.source.c1_sq), s.source.c1_phase);
  cfg.c2 = std::polar(std::sqrt(1.0 - s.source.c1_sq), s.source.c2_phase);
  cfg.bs1 = BeamSplitter::from_reflectance(s.bs[0].r_sq, s.bs[0].r_phase, s.bs[0].t_phase);
  cfg.bs2 = BeamSplitter::from_reflectance(s.bs[1].r_sq, s.bs[1].r_phase, s.bs[1].t_phase);
  cfg.bs3 = BeamSplitter::from_reflectance(s.bs[2].r_sq, s.bs[2].r_phase, s.bs[2].t_phase);
  cfg.q = std::polar(s.polarizer.q_abs, s.polarizer.q_phase);
  return cfg;
}

// Copy of `s` with the swept modulus set to `value`.
inline ScenarioFile with_swept_value(ScenarioFile s, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::kQAbs: s.polarizer.q_abs = value; break;
    case SweepParameter::kC1Abs: s.source.c1_sq = value * value; break;
    case SweepParameter::kR1Abs: s.bs[0].r_sq = value * value; break;
    case SweepParameter::kR3Abs: s.bs[2].r_sq = value * value; break;
  }
  return s;
}

// Inclusive linear grid; the last point is exactly `to`.
inline std::vector<double> sweep_grid(const SweepSection& sw) {
  std::vector<double> g(sw.steps);
  for (std::size_t k = 0; k < sw.steps; ++k)
    g[k] = sw.from + (sw.to - sw.from) * static_cast<double>(k) / static_cast<double>(sw.steps - 1);
  g.back() = sw.to;
  return g;
}

// ---------------------------------------------------------------------------
// Presets

namespace presets {

inline ScenarioFile base(double c1_sq, double r1_sq, double r2_sq, double r3_sq, double q_abs) {
  ScenarioFile s;
  s.source.c1_sq = c1_sq;
  s.bs[0].r_sq = r1_sq;
  s.bs[1].r_sq = r2_sq;
  s.bs[2].r_sq = r3_sq;
  s.polarizer.q_abs = q_abs;
  return s;
}

// P, V, C versus |q|; |r1| = |r2| = 1, |c1|^2 = 0.5, |r3|^2 = 0.1.
inline ScenarioFile fig4a() {
  ScenarioFile s = base(0.5, 1.0, 1.0, 0.1, 1.0);
  s.sweep = SweepSection{SweepParameter::kQAbs, 0.0, 1.0, kDefaultSweepSteps};
  return s;
}
// Versus |c1|; |r1| = |r2| = 1, |r3| = 0.6, |q| = 0.6.
inline ScenarioFile fig4b() {
  ScenarioFile s = base(0.5, 1.0, 1.0, 0.36, 0.6);
  s.sweep = SweepSection{SweepParameter::kC1Abs, 0.0, 1.0, kDefaultSweepSteps};
  return s;
}
// Versus |r1|; |c1|^2 = 0.5, |r3|^2 = 0.5, |q| = 0.6, B2 a mirror.
inline ScenarioFile fig4c() {
  ScenarioFile s = base(0.5, 1.0, 1.0, 0.5, 0.6);
  s.sweep = SweepSection{SweepParameter::kR1Abs, 0.0, 1.0, kDefaultSweepSteps};
  return s;
}
// Versus |r3|; |r1| = |r2| = 1, |c1|^2 = 0.25, |q| = 0.6.
inline ScenarioFile fig4d() {
  ScenarioFile s = base(0.25, 1.0, 1.0, 0.5, 0.6);
  s.sweep = SweepSection{SweepParameter::kR3Abs, 0.0, 1.0, kDefaultSweepSteps};
  return s;
}
// Symmetric source, mirrors at B1/B2, 50:50 B3, identical polarizers.
inline ScenarioFile conventional() { return base(0.5, 1.0, 1.0, 0.5, 1.0); }
// B1/B2 removed: every tag photon lands on D3 or D4.
inline ScenarioFile which_path() { return base(0.5, 0.0, 0.0, 0.5, 1.0); }

inline std::optional<ScenarioFile> by_name(std::string_view name) {
  if (name == "fig4a") return fig4a();
  if (name == "fig4b") return fig4b();
  if (name == "fig4c") return fig4c();
  if (name == "fig4d") return fig4d();
  if (name == "conventional") return conventional();
  if (name == "which-path") return which_path();
  return std::nullopt;
}

inline constexpr std::array<std::string_view, 6> kNames{"fig4a", "fig4b", "fig4c", "fig4d", "conventional",
                                                         "which-path"};

}  // namespace presets

}  // namespace qeraser
