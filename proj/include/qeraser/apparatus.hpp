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

// State model of the generalized eraser: a photon pair source whose tag
// photon carries a (non-orthogonal) polarization, beam splitters B1/B2 that
// either reveal the emission site at D3/D4 or route the tag photon to B3, and
// post-selection on the four detectors.
//
// Register layout of the full state (16 amplitudes), most significant first:
//   gamma (2)  0 = path from site 1 (|10>_gamma), 1 = path from site 2
//   phi   (4)  one-hot tag modes; see PhiMode
//   pol   (2)  orthonormal embedding basis e0, e1 of the polarizer states

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "qeraser/error.hpp"
#include "qeraser/linalg.hpp"

namespace qeraser {

struct RegisterLayout {
  static constexpr std::size_t kGamma = 2;
  static constexpr std::size_t kPhi = 4;
  static constexpr std::size_t kPol = 2;
  static constexpr std::size_t kTotal = kGamma * kPhi * kPol;

  static constexpr std::size_t index(std::size_t gamma, std::size_t phi, std::size_t pol) {
    return (gamma * kPhi + phi) * kPol + pol;
  }
};

// Slots of the one-hot phi register. Before B1/B2 the tag photon from site 1
// occupies the upper input (slot 0) and the one from site 2 the lower input
// (slot 3). After B1/B2 the slots are the paths a, b, c, d; after B3 slot 2
// is the D1 port and slot 1 the D2 port, as in |0010> and |0100>.
enum class PhiMode : std::size_t { kA = 0, kB = 1, kC = 2, kD = 3 };
inline constexpr std::size_t kUpperInput = 0;
inline constexpr std::size_t kLowerInput = 3;
inline constexpr std::size_t kD2Port = 1;
inline constexpr std::size_t kD1Port = 2;

enum class Detector { kD1 = 1, kD2 = 2, kD3 = 3, kD4 = 4 };
inline constexpr std::array<Detector, 4> kAllDetectors{Detector::kD1, Detector::kD2, Detector::kD3,
                                                       Detector::kD4};

inline std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::kD1: return "D1";
    case Detector::kD2: return "D2";
    case Detector::kD3: return "D3";
    case Detector::kD4: return "D4";
  }
  return "?";
}

inline std::optional<Detector> parse_detector(std::string_view s) {
  if (s == "D1" || s == "d1" || s == "1") return Detector::kD1;
  if (s == "D2" || s == "d2" || s == "2") return Detector::kD2;
  if (s == "D3" || s == "d3" || s == "3") return Detector::kD3;
  if (s == "D4" || s == "d4" || s == "4") return Detector::kD4;
  return std::nullopt;
}

inline std::size_t phi_slot(Detector d) {
  switch (d) {
    case Detector::kD1: return kD1Port;
    case Detector::kD2: return kD2Port;
    case Detector::kD3: return static_cast<std::size_t>(PhiMode::kA);
    case Detector::kD4: return static_cast<std::size_t>(PhiMode::kD);
  }
  return 0;
}

struct BeamSplitter {
  cplx r{0.0, 0.0};
  cplx t{1.0, 0.0};

  static BeamSplitter mirror() { return {1.0, 0.0}; }
  static BeamSplitter removed() { return {0.0, 1.0}; }
  static BeamSplitter balanced() { return {std::sqrt(0.5), std::sqrt(0.5)}; }
  // |r|^2 = r_sq with the given phases.
  static BeamSplitter from_reflectance(double r_sq, double r_phase = 0.0, double t_phase = 0.0) {
    return {std::polar(std::sqrt(r_sq), r_phase), std::polar(std::sqrt(1.0 - r_sq), t_phase)};
  }
};

struct ApparatusConfig {
  cplx c1{std::sqrt(0.5), 0.0};
  cplx c2{std::sqrt(0.5), 0.0};
  BeamSplitter bs1 = BeamSplitter::mirror();
  BeamSplitter bs2 = BeamSplitter::mirror();
  BeamSplitter bs3 = BeamSplitter::balanced();
  cplx q{1.0, 0.0};  // <S1|S2>

  // Symmetric source, mirrors at B1/B2, 50:50 B3, identical polarizers.
  static ApparatusConfig conventional() { return {}; }
};

inline void validate(const ApparatusConfig& cfg, double eps = tol::kStructural) {
  if (std::abs(std::norm(cfg.c1) + std::norm(cfg.c2) - 1.0) > eps)
    throw ValidationError("source amplitudes: |c1|^2 + |c2|^2 must equal 1");
  const std::array<const BeamSplitter*, 3> bss{&cfg.bs1, &cfg.bs2, &cfg.bs3};
  for (std::size_t i = 0; i < bss.size(); ++i)
    if (std::abs(std::norm(bss[i]->r) + std::norm(bss[i]->t) - 1.0) > eps)
      throw ValidationError("beam splitter B" + std::to_string(i + 1) + ": |r|^2 + |t|^2 must equal 1");
  if (!std::isfinite(std::abs(cfg.q)) || std::abs(cfg.q) > 1.0 + eps)
    throw ValidationError("polarization overlap: |q| must lie in [0, 1]");
}

// Embedding of the polarizer states: |S1> = e0, |S2> = q e0 + sqrt(1-|q|^2) e1.
inline ComplexVec polarization_s1(const ApparatusConfig&) { return ComplexVec{1.0, 0.0}; }
// sqrt(1 - |q|^2), evaluated as sqrt((1 - |q|)(1 + |q|)). Moduli within a few ulps of 1 count as 1.
inline double overlap_complement(cplx q) {
  const double a = std::abs(q);
  if (a >= 1.0 - 4.0 * std::numeric_limits<double>::epsilon()) return 0.0;
  return std::sqrt((1.0 - a) * (1.0 + a));
}

inline ComplexVec polarization_s2(const ApparatusConfig& cfg) {
  return ComplexVec{cfg.q, overlap_complement(cfg.q)};
}

// c1 |site1>|upper>|S1> + c2 |site2>|lower>|S2>
inline ComplexVec source_state(const ApparatusConfig& cfg) {
  validate(cfg);
  const ComplexVec s1 = polarization_s1(cfg), s2 = polarization_s2(cfg);
  const ComplexVec site1 = ComplexVec::basis(RegisterLayout::kGamma, 0);
  const ComplexVec site2 = ComplexVec::basis(RegisterLayout::kGamma, 1);
  const ComplexVec upper = ComplexVec::basis(RegisterLayout::kPhi, kUpperInput);
  const ComplexVec lower = ComplexVec::basis(RegisterLayout::kPhi, kLowerInput);
  return cfg.c1 * tensor(tensor(site1, upper), s1) + cfg.c2 * tensor(tensor(site2, lower), s2);
}

// Single-photon transfer matrix of B1 (on slots a, b) and B2 (on d, c).
// Occupied inputs: upper -> t1 a + r1 b, lower -> t2 d + r2 c. The vacuum
// input ports get the unitary completion (-conj(r), conj(t)).
inline ComplexMat phi_transfer_b1_b2(const ApparatusConfig& cfg) {
  constexpr std::size_t a = 0, b = 1, c = 2, d = 3;
  const auto& [r1, t1] = cfg.bs1;
  const auto& [r2, t2] = cfg.bs2;
  ComplexMat u(4, 4);
  u(a, a) = t1;
  u(b, a) = r1;
  u(a, b) = -std::conj(r1);
  u(b, b) = std::conj(t1);
  u(d, d) = t2;
  u(c, d) = r2;
  u(d, c) = -std::conj(r2);
  u(c, c) = std::conj(t2);
  return u;
}

// B3 mixes b and c into the detector ports:
//   b -> r3 |D1> + t3 |D2>,   c -> t3 |D1> - r3 |D2>.
// Unitary whenever conj(r3) t3 is real; for other phases it still preserves
// the norm of every reachable state, because the b and c branches carry
// orthogonal gamma labels.
inline ComplexMat phi_transfer_b3(const ApparatusConfig& cfg) {
  constexpr std::size_t a = 0, b = 1, c = 2, d = 3;
  const auto& [r3, t3] = cfg.bs3;
  ComplexMat u(4, 4);
  u(a, a) = 1.0;
  u(d, d) = 1.0;
  u(kD1Port, b) = r3;
  u(kD2Port, b) = t3;
  u(kD1Port, c) = t3;
  u(kD2Port, c) = -r3;
  return u;
}

// Lifts a phi-register operator to the full gamma x phi x pol space.
inline ComplexMat on_phi(const ComplexMat& phi_op) {
  return tensor(tensor(ComplexMat::identity(RegisterLayout::kGamma), phi_op),
                ComplexMat::identity(RegisterLayout::kPol));
}

inline ComplexVec apply_b1_b2(const ComplexVec& state, const ApparatusConfig& cfg) {
  if (state.dim() != RegisterLayout::kTotal) throw StructuralError("apply_b1_b2: expected a 16-dim state");
  return on_phi(phi_transfer_b1_b2(cfg)) * state;
}

inline ComplexVec apply_b3(const ComplexVec& state, const ApparatusConfig& cfg) {
  if (state.dim() != RegisterLayout::kTotal) throw StructuralError("apply_b3: expected a 16-dim state");
  return on_phi(phi_transfer_b3(cfg)) * state;
}

inline ComplexVec evolved_state(const ApparatusConfig& cfg) {
  return apply_b3(apply_b1_b2(source_state(cfg), cfg), cfg);
}

// Probabilities below this are treated as a detector that never fires.
inline constexpr double kZeroProbability = 1e-14;

struct DetectionOutcome {
  Detector detector = Detector::kD1;
  double probability = 0.0;
  // Normalized gamma x pol state after the click; empty when probability is 0.
  std::optional<ComplexVec> conditional_state;
  std::optional<ComplexMat> conditional_rho_gamma;

  bool defined() const { return conditional_state.has_value(); }
  const ComplexVec& state() const {
    if (!conditional_state) throw UndefinedBranch(std::string(to_string(detector)) + " never clicks for this configuration");
    return *conditional_state;
  }
  const ComplexMat& rho_gamma() const {
    if (!conditional_rho_gamma) throw UndefinedBranch(std::string(to_string(detector)) + " never clicks for this configuration");
    return *conditional_rho_gamma;
  }
};

// Reduced path state of a gamma x pol ket.
inline ComplexMat rho_gamma_of(const ComplexVec& gamma_pol) {
  return partial_trace(ComplexMat::projector(gamma_pol), {RegisterLayout::kGamma, RegisterLayout::kPol}, {0});
}

inline DetectionOutcome detect(const ComplexVec& state, Detector detector) {
  if (state.dim() != RegisterLayout::kTotal) throw StructuralError("detect: expected a 16-dim state");
  const std::size_t slot = phi_slot(detector);
  ComplexVec branch(RegisterLayout::kGamma * RegisterLayout::kPol);
  for (std::size_t g = 0; g < RegisterLayout::kGamma; ++g)
    for (std::size_t s = 0; s < RegisterLayout::kPol; ++s)
      branch[g * RegisterLayout::kPol + s] = state[RegisterLayout::index(g, slot, s)];

  DetectionOutcome out;
  out.detector = detector;
  out.probability = branch.norm_sq();
  if (out.probability <= kZeroProbability) return out;
  out.conditional_state = branch.normalized();
  out.conditional_rho_gamma = rho_gamma_of(*out.conditional_state);
  return out;
}

inline DetectionOutcome detect(const ApparatusConfig& cfg, Detector detector) {
  return detect(evolved_state(cfg), detector);
}

// Click probabilities from the closed forms.
inline double click_probability(const ApparatusConfig& cfg, Detector d) {
  const cplx c1 = cfg.c1, c2 = cfg.c2;
  const cplx r1 = cfg.bs1.r, t1 = cfg.bs1.t, r2 = cfg.bs2.r, t2 = cfg.bs2.t;
  const cplx r3 = cfg.bs3.r, t3 = cfg.bs3.t;
  switch (d) {
    case Detector::kD1: return std::norm(c1 * r1 * r3) + std::norm(c2 * r2 * t3);
    case Detector::kD2: return std::norm(c1 * r1 * t3) + std::norm(c2 * r2 * r3);
    case Detector::kD3: return std::norm(c1 * t1);
    case Detector::kD4: return std::norm(c2 * t2);
  }
  return 0.0;
}

// Unnormalized conditional gamma x pol ket of each detector, closed form:
//   D1: c1 r1 r3 |site1>|S1> + c2 r2 t3 |site2>|S2>
//   D2: c1 r1 t3 |site1>|S1> - c2 r2 r3 |site2>|S2>
//   D3: c1 t1 |site1>|S1>,   D4: c2 t2 |site2>|S2>
inline ComplexVec closed_form_branch(const ApparatusConfig& cfg, Detector d) {
  const cplx r1 = cfg.bs1.r, t1 = cfg.bs1.t, r2 = cfg.bs2.r, t2 = cfg.bs2.t;
  const cplx r3 = cfg.bs3.r, t3 = cfg.bs3.t;
  cplx site1{0.0}, site2{0.0};
  switch (d) {
    case Detector::kD1: site1 = cfg.c1 * r1 * r3; site2 = cfg.c2 * r2 * t3; break;
    case Detector::kD2: site1 = cfg.c1 * r1 * t3; site2 = -cfg.c2 * r2 * r3; break;
    case Detector::kD3: site1 = cfg.c1 * t1; break;
    case Detector::kD4: site2 = cfg.c2 * t2; break;
  }
  const ComplexVec g0 = ComplexVec::basis(2, 0), g1 = ComplexVec::basis(2, 1);
  return site1 * tensor(g0, polarization_s1(cfg)) + site2 * tensor(g1, polarization_s2(cfg));
}

// Tr_pol of the source projector on gamma x (upper, lower): 4x4 with the
// coherence c1 conj(c2) conj(q) between |site1,upper> and |site2,lower>.
inline ComplexMat reduced_gamma_phi(const ApparatusConfig& cfg) {
  const ComplexMat full = ComplexMat::projector(source_state(cfg));
  const ComplexMat modes = partial_trace(
      full, {RegisterLayout::kGamma, RegisterLayout::kPhi, RegisterLayout::kPol}, {0, 1});
  // Keep only the two occupied input slots of phi.
  constexpr std::array<std::size_t, 2> slot{kUpperInput, kLowerInput};
  ComplexMat out(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      out(i, j) = modes((i / 2) * RegisterLayout::kPhi + slot[i % 2], (j / 2) * RegisterLayout::kPhi + slot[j % 2]);
  return out;
}

// Embeds a gamma x (upper, lower) operator into gamma x phi(4 slots).
inline ComplexMat lift_dual_rail(const ComplexMat& rho4) {
  if (rho4.rows() != 4 || rho4.cols() != 4) throw StructuralError("lift_dual_rail: expected 4x4");
  constexpr std::array<std::size_t, 2> slot{kUpperInput, kLowerInput};
  ComplexMat out(8, 8);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      out((i / 2) * RegisterLayout::kPhi + slot[i % 2], (j / 2) * RegisterLayout::kPhi + slot[j % 2]) = rho4(i, j);
  return out;
}

// Path state with no post-selection: the click-weighted mixture of all branches.
inline ComplexMat unconditioned_rho_gamma(const ApparatusConfig& cfg) {
  return partial_trace(ComplexMat::projector(evolved_state(cfg)),
                       {RegisterLayout::kGamma, RegisterLayout::kPhi, RegisterLayout::kPol}, {0});
}

}  // namespace qeraser
