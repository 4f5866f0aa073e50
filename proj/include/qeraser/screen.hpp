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

// Far-field fringes of the gamma photon and their Monte Carlo sampling.
//
// A path state rho_gamma produces the two-path fringe density
//   I(phase) = (1 + V cos(phase + arg rho01)) / (2 pi),   V = 2 |rho01|,
// over the accumulated phase difference in [0, 2 pi).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qeraser/error.hpp"
#include "qeraser/format.hpp"
#include "qeraser/linalg.hpp"

namespace qeraser {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

// Signed difference a - b folded into (-pi, pi].
inline double phase_difference(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

struct FringeProfile {
  std::vector<double> phase_grid;
  std::vector<double> intensity;
  double analytic_V = 0.0;
  double analytic_offset = 0.0;  // arg rho01, radians

  double density(double phase) const {
    return (1.0 + analytic_V * std::cos(phase + analytic_offset)) / kTwoPi;
  }
};

inline FringeProfile fringe_profile(const ComplexMat& rho_gamma, std::size_t grid_points = 360) {
  if (rho_gamma.rows() != 2 || rho_gamma.cols() != 2) throw StructuralError("fringe_profile: expected 2x2");
  check_density(rho_gamma);
  if (grid_points == 0) throw StructuralError("fringe_profile: empty phase grid");
  FringeProfile p;
  const cplx coh = rho_gamma(0, 1);
  p.analytic_V = std::min(1.0, 2.0 * std::abs(coh));
  p.analytic_offset = std::abs(coh) > 0.0 ? std::arg(coh) : 0.0;
  p.phase_grid.resize(grid_points);
  p.intensity.resize(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) {
    p.phase_grid[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(grid_points);
    p.intensity[k] = p.density(p.phase_grid[k]);
  }
  return p;
}

// Physical screen coordinate of a phase for a fringe period `period`.
inline double phase_to_position(double phase, double period) { return phase * period / kTwoPi; }

struct FringeExtrema {
  double max = 0.0;
  double min = 0.0;
  double phase_at_max = 0.0;
  double phase_at_min = 0.0;
};

namespace detail {

// Golden-section refinement of a local optimum of f inside [lo, hi].
template <typename F>
double golden_refine(F&& f, double lo, double hi, bool maximize) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto val = [&](double x) { return maximize ? -f(x) : f(x); };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = val(x1), f2 = val(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = val(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = val(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Brightest and darkest points of the profile: a scan over the phase grid,
// refined by golden-section search on the continuous density.
inline FringeExtrema scan_extrema(const FringeProfile& p) {
  if (p.phase_grid.empty()) throw StructuralError("scan_extrema: empty profile");
  const auto imax = std::max_element(p.intensity.begin(), p.intensity.end()) - p.intensity.begin();
  const auto imin = std::min_element(p.intensity.begin(), p.intensity.end()) - p.intensity.begin();
  const double step = kTwoPi / static_cast<double>(p.phase_grid.size());
  auto f = [&](double x) { return p.density(x); };
  FringeExtrema e;
  const double xmax = p.phase_grid[imax];
  const double xmin = p.phase_grid[imin];
  e.phase_at_max = wrap_phase(detail::golden_refine(f, xmax - step, xmax + step, true));
  e.phase_at_min = wrap_phase(detail::golden_refine(f, xmin - step, xmin + step, false));
  e.max = std::max(p.intensity[imax], f(e.phase_at_max));
  e.min = std::min(p.intensity[imin], f(e.phase_at_min));
  return e;
}

// (Imax - Imin) / (Imax + Imin) of the fringe pattern.
inline double operational_visibility(const FringeProfile& p) {
  const FringeExtrema e = scan_extrema(p);
  return (e.max - e.min) / (e.max + e.min);
}

// Pointwise mixture w * a + (1 - w) * b of two profiles on the same grid.
inline std::vector<double> mix_intensity(const FringeProfile& a, const FringeProfile& b, double w) {
  if (a.intensity.size() != b.intensity.size()) throw StructuralError("mix_intensity: grid mismatch");
  std::vector<double> out(a.intensity.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = w * a.intensity[k] + (1.0 - w) * b.intensity[k];
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

// SplitMix64; every photon i draws from its own stream keyed by (seed, i),
// so the sample set does not depend on how the work is split across threads.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static SplitMix64 for_index(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed) ^ mix(index + 0x632BE59BD9B4E019ULL));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct VisibilityEstimate {
  double V_hat = 0.0;
  double std_error = 0.0;
  double offset_hat = 0.0;  // estimated arg rho01; meaningless when V_hat ~ 0
};

struct SampleSet {
  std::size_t n = 0;
  std::vector<double> positions;     // phases in [0, 2 pi)
  std::vector<std::size_t> histogram;  // equal-width bins over [0, 2 pi)
  double estimated_V = std::numeric_limits<double>::quiet_NaN();
  double estimated_V_stderr = std::numeric_limits<double>::quiet_NaN();
  double estimated_offset = std::numeric_limits<double>::quiet_NaN();

  double bin_width() const { return kTwoPi / static_cast<double>(histogram.size()); }
  double bin_center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * bin_width(); }
};

inline constexpr std::size_t kMinSamplesForEstimate = 100;

// First-harmonic estimator: V_hat = 2 |<exp(i phase)>|, stderr ~ sqrt(2/n).
inline VisibilityEstimate estimate_visibility(std::span<const double> positions) {
  if (positions.size() < kMinSamplesForEstimate)
    throw ValidationError("estimate_visibility: at least " + std::to_string(kMinSamplesForEstimate) +
                          " samples are required");
  double sc = 0.0, ss = 0.0;
  for (double x : positions) {
    sc += std::cos(x);
    ss += std::sin(x);
  }
  const double n = static_cast<double>(positions.size());
  sc /= n;
  ss /= n;
  VisibilityEstimate e;
  e.V_hat = 2.0 * std::hypot(sc, ss);
  e.std_error = std::sqrt(2.0 / n);
  // <exp(i phase)> = (V/2) exp(-i offset)
  e.offset_hat = -std::atan2(ss, sc);
  return e;
}

inline VisibilityEstimate estimate_visibility(const SampleSet& s) { return estimate_visibility(s.positions); }

inline SampleSet sample(const FringeProfile& profile, std::size_t n, std::uint64_t seed, std::size_t bins = 32,
                        unsigned workers = 1) {
  if (n == 0) throw ValidationError("sample: n must be at least 1");
  if (bins == 0) throw ValidationError("sample: bins must be at least 1");
  const double v = std::clamp(profile.analytic_V, 0.0, 1.0);
  const double offset = profile.analytic_offset;

  SampleSet s;
  s.n = n;
  s.positions.resize(n);
  // Rejection sampling against the flat envelope (1 + V) / (2 pi).
  auto draw_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SplitMix64 rng = SplitMix64::for_index(seed, i);
      while (true) {
        const double x = kTwoPi * rng.uniform();
        const double u = rng.uniform() * (1.0 + v);
        if (u < 1.0 + v * std::cos(x + offset)) {
          s.positions[i] = x;
          break;
        }
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(n, 64))));
  if (workers == 1) {
    draw_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(n, w * chunk), e = std::min(n, b + chunk);
      pool.emplace_back(draw_range, b, e);
    }
  }

  s.histogram.assign(bins, 0);
  for (double x : s.positions) {
    auto k = static_cast<std::size_t>(x / s.bin_width());
    s.histogram[std::min(k, bins - 1)]++;
  }
  if (n >= kMinSamplesForEstimate) {
    const VisibilityEstimate e = estimate_visibility(s);
    s.estimated_V = e.V_hat;
    s.estimated_V_stderr = e.std_error;
    s.estimated_offset = e.offset_hat;
  }
  return s;
}

// Pearson chi-square statistic of a histogram against the flat density.
inline double chi_square_uniform(std::span<const std::size_t> histogram) {
  double n = 0.0;
  for (auto c : histogram) n += static_cast<double>(c);
  const double expected = n / static_cast<double>(histogram.size());
  double chi2 = 0.0;
  for (auto c : histogram) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

// ---------------------------------------------------------------------------
// CSV export

inline std::string profile_csv(const FringeProfile& p) {
  std::ostringstream os;
  os << "phase,intensity\n";
  for (std::size_t k = 0; k < p.phase_grid.size(); ++k)
    os << format_double(p.phase_grid[k]) << ',' << format_double(p.intensity[k]) << '\n';
  return os.str();
}

inline std::string histogram_csv(const SampleSet& s) {
  std::ostringstream os;
  os << "bin_center_phase,count,density\n";
  const double norm = static_cast<double>(s.n) * s.bin_width();
  for (std::size_t k = 0; k < s.histogram.size(); ++k)
    os << format_double(s.bin_center(k)) << ',' << s.histogram[k] << ','
       << format_double(static_cast<double>(s.histogram[k]) / norm) << '\n';
  return os.str();
}

}  // namespace qeraser
