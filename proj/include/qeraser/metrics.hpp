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

// Wave, particle and entanglement measures of a post-selected path state.
//
// Every report is computed along one of two independent routes: `evolved`
// pushes the source state through the beam-splitter network and measures the
// conditional state, `closed_form` evaluates the analytic amplitude products
// directly. Reports carry residuals of the triality, purity and
// distinguishability identities; thresholds belong to the caller.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "qeraser/apparatus.hpp"
#include "qeraser/error.hpp"
#include "qeraser/linalg.hpp"

namespace qeraser {

enum class Route { kEvolved, kClosedForm };

inline std::string_view to_string(Route r) { return r == Route::kEvolved ? "evolved" : "closed_form"; }

struct TrialityReport {
  double P = 0.0;  // predictability
  double V = 0.0;  // visibility
  double C = 0.0;  // concurrence
  double D = 0.0;  // distinguishability
  double purity = 1.0;  // Tr rho_gamma^2
  double residual_triality = 0.0;           // P^2 + V^2 + C^2 - 1
  double residual_duality_purity = 0.0;     // P^2 + V^2 - (2 purity - 1)
  double residual_distinguishability = 0.0; // D^2 - (P^2 + C^2)
  Route route = Route::kEvolved;
  Detector detector = Detector::kD1;
  double probability = 0.0;  // click probability of the detector
};

inline void fill_residuals(TrialityReport& r) {
  const double p2 = r.P * r.P, v2 = r.V * r.V, c2 = r.C * r.C;
  r.residual_triality = p2 + v2 + c2 - 1.0;
  r.residual_duality_purity = p2 + v2 - (2.0 * r.purity - 1.0);
  r.residual_distinguishability = r.D * r.D - (p2 + c2);
}

inline void check_qubit_density(const ComplexMat& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw StructuralError("expected a 2x2 path density matrix");
  check_density(rho);
}

// |p0 - p1| / (p0 + p1) over the path populations.
inline double predictability(const ComplexMat& rho_gamma) {
  check_qubit_density(rho_gamma);
  const double p0 = rho_gamma(0, 0).real(), p1 = rho_gamma(1, 1).real();
  return std::abs(p0 - p1) / std::abs(p0 + p1);
}

inline double visibility(const ComplexMat& rho_gamma) {
  check_qubit_density(rho_gamma);
  return 2.0 * std::abs(rho_gamma(0, 1));
}

inline double purity(const ComplexMat& rho) { return (rho * rho).trace().real(); }

// 2|ad - bc| on the amplitudes (a, b, c, d) of a normalized two-qubit ket.
inline double concurrence_pure(const ComplexVec& psi) {
  if (psi.dim() != 4) throw StructuralError("concurrence_pure: expected a two-qubit ket");
  if (!psi.is_normalized(tol::kDerived)) throw ContractViolation("concurrence_pure: ket is not normalized");
  return std::min(1.0, 2.0 * std::abs(psi[0] * psi[3] - psi[1] * psi[2]));
}

// sqrt(2 (1 - Tr rho_A^2)) for a pure two-qubit ket.
inline double concurrence_from_purity(const ComplexVec& psi) {
  if (psi.dim() != 4) throw StructuralError("concurrence_from_purity: expected a two-qubit ket");
  const ComplexMat rho_a = partial_trace(ComplexMat::projector(psi), {2, 2}, {0});
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - purity(rho_a))));
}

// Wootters concurrence max{0, l0 - l1 - l2 - l3}.
inline double concurrence_mixed(const ComplexMat& rho) {
  const auto l = prod_spectrum_sqrt(rho, spin_flip(rho));
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

// sqrt(P^2 + C^2).
inline double distinguishability(double P, double C) {
  if (P < -tol::kStructural || C < -tol::kStructural)
    throw ContractViolation("distinguishability: P and C must be nonnegative");
  const double s = P * P + C * C;
  if (s > 1.0 + tol::kDerived) throw ContractViolation("distinguishability: P^2 + C^2 exceeds 1");
  return std::sqrt(std::min(1.0, s));
}

// sqrt(1 - 4 p1 p2 |q|^2) from the branch weights of the conditional ket.
inline double distinguishability_from_branches(double p1, double p2, double q_abs) {
  return std::sqrt(std::max(0.0, 1.0 - 4.0 * p1 * p2 * q_abs * q_abs));
}

namespace detail {

// |site1 amplitude|^2, |site2 amplitude|^2 and |product| of the unnormalized
// conditional ket (without the polarization factor).
struct BranchWeights {
  double site1 = 0.0;
  double site2 = 0.0;
  double cross = 0.0;
};

inline BranchWeights closed_form_weights(const ApparatusConfig& cfg, Detector d) {
  const cplx r1 = cfg.bs1.r, t1 = cfg.bs1.t, r2 = cfg.bs2.r, t2 = cfg.bs2.t;
  const cplx r3 = cfg.bs3.r, t3 = cfg.bs3.t;
  BranchWeights w;
  switch (d) {
    case Detector::kD1:
      w.site1 = std::norm(cfg.c1 * r1 * r3);
      w.site2 = std::norm(cfg.c2 * r2 * t3);
      break;
    case Detector::kD2:
      w.site1 = std::norm(cfg.c1 * r1 * t3);
      w.site2 = std::norm(cfg.c2 * r2 * r3);
      break;
    case Detector::kD3: w.site1 = std::norm(cfg.c1 * t1); break;
    case Detector::kD4: w.site2 = std::norm(cfg.c2 * t2); break;
  }
  if (d == Detector::kD1 || d == Detector::kD2) w.cross = std::abs(cfg.c1 * cfg.c2 * r1 * r2 * r3 * t3);
  return w;
}

[[noreturn]] inline void throw_undefined(Detector d) {
  throw UndefinedBranch(std::string(to_string(d)) + " never clicks for this configuration");
}

}  // namespace detail

// Analytic P, V, C for a click on `detector`:
//   V = 2 |c1 c2 r1 r2 r3 t3| |q| / N^2
//   P = | |site1|^2 - |site2|^2 | / N^2
//   C = 2 |c1 c2 r1 r2 r3 t3| sqrt(1 - |q|^2) / N^2
// with the site amplitudes of the detector's branch (r3 and t3 trade places
// for D2) and N^2 its click probability. D3 and D4 carry full path
// information.
inline TrialityReport closed_form_triality(const ApparatusConfig& cfg, Detector detector) {
  validate(cfg);
  const detail::BranchWeights w = detail::closed_form_weights(cfg, detector);
  const double n2 = w.site1 + w.site2;
  if (n2 <= kZeroProbability) detail::throw_undefined(detector);

  const double q_abs = std::min(1.0, std::abs(cfg.q));
  const double b1 = w.site1 / n2, b2 = w.site2 / n2;
  TrialityReport r;
  r.route = Route::kClosedForm;
  r.detector = detector;
  r.probability = n2;
  r.V = 2.0 * w.cross * q_abs / n2;
  r.P = std::abs(w.site1 - w.site2) / n2;
  r.C = 2.0 * w.cross * overlap_complement(cfg.q) / n2;
  r.D = distinguishability_from_branches(b1, b2, q_abs);
  r.purity = b1 * b1 + b2 * b2 + 2.0 * b1 * b2 * q_abs * q_abs;
  fill_residuals(r);
  return r;
}

// Measures the conditional state produced by the full state evolution.
inline TrialityReport evolved_triality(const ApparatusConfig& cfg, Detector detector) {
  const DetectionOutcome out = detect(cfg, detector);
  if (!out.defined()) detail::throw_undefined(detector);
  const ComplexVec& psi = out.state();
  const ComplexMat& rho = out.rho_gamma();

  TrialityReport r;
  r.route = Route::kEvolved;
  r.detector = detector;
  r.probability = out.probability;
  r.P = predictability(rho);
  r.V = visibility(rho);
  r.C = concurrence_pure(psi);
  r.purity = purity(rho);

  // Overlap of the polarization tags carried by the two path components.
  const ComplexVec tag1{psi[0], psi[1]}, tag2{psi[2], psi[3]};
  const double n1 = tag1.norm(), n2 = tag2.norm();
  const double overlap = (n1 > 0.0 && n2 > 0.0) ? std::abs(inner(tag1, tag2)) / (n1 * n2) : 0.0;
  r.D = distinguishability_from_branches(rho(0, 0).real(), rho(1, 1).real(), std::min(1.0, overlap));
  fill_residuals(r);
  return r;
}

inline TrialityReport triality(const ApparatusConfig& cfg, Detector detector, Route route) {
  return route == Route::kEvolved ? evolved_triality(cfg, detector) : closed_form_triality(cfg, detector);
}

inline double max_route_discrepancy(const TrialityReport& a, const TrialityReport& b) {
  return std::max({std::abs(a.P - b.P), std::abs(a.V - b.V), std::abs(a.C - b.C), std::abs(a.D - b.D)});
}

}  // namespace qeraser
