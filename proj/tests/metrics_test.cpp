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

#include "qeraser/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qeraser/runner.hpp"
#include "test_util.hpp"

using namespace qeraser;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ApparatusConfig partial_erasure() {
  ApparatusConfig cfg;
  cfg.bs3 = BeamSplitter::from_reflectance(0.1);
  cfg.q = 0.6;
  return cfg;
}

ApparatusConfig random_cfg(std::uint64_t seed, std::uint64_t i) {
  SplitMix64 rng = SplitMix64::for_index(seed, i);
  return random_config(rng);
}

}  // namespace

TEST(Predictability, Cases) {
  EXPECT_NEAR(predictability(ComplexMat::diagonal({0.5, 0.5})), 0.0, 1e-15);
  EXPECT_NEAR(predictability(ComplexMat::diagonal({1.0, 0.0})), 1.0, 1e-15);
  EXPECT_NEAR(predictability(ComplexMat{{0.1, 0.18}, {0.18, 0.9}}), 0.8, 1e-15);
  EXPECT_THROW(predictability(ComplexMat::identity(4)), StructuralError);
  EXPECT_THROW(predictability(ComplexMat::diagonal({0.7, 0.7})), ContractViolation);
}

TEST(Visibility, Cases) {
  EXPECT_NEAR(visibility(ComplexMat{{0.5, 0.5}, {0.5, 0.5}}), 1.0, 1e-15);
  EXPECT_NEAR(visibility(ComplexMat::diagonal({0.3, 0.7})), 0.0, 1e-15);
  EXPECT_NEAR(visibility(ComplexMat{{0.1, 0.18}, {0.18, 0.9}}), 0.36, 1e-15);
}

TEST(ConcurrencePure, Cases) {
  EXPECT_NEAR(concurrence_pure(ComplexVec{kInvSqrt2, 0.0, 0.0, kInvSqrt2}), 1.0, 1e-15);
  EXPECT_NEAR(concurrence_pure(ComplexVec{0.6, 0.8, 0.0, 0.0}), 0.0, 1e-15);
  // D1 ket of the partial-erasure setup in the (e0, e1) embedding:
  // (sqrt(0.1) |0,e0> + sqrt(0.9) (0.6 |1,e0> + 0.8 |1,e1>)) -> 2 * sqrt(0.09) * 0.8.
  const ComplexVec psi{std::sqrt(0.1), 0.0, std::sqrt(0.9) * 0.6, std::sqrt(0.9) * 0.8};
  EXPECT_NEAR(concurrence_pure(psi), 0.48, 1e-15);
  EXPECT_NEAR(concurrence_from_purity(psi), 0.48, 1e-14);
  EXPECT_THROW(concurrence_pure(ComplexVec{1.0, 1.0, 0.0, 0.0}), ContractViolation);
}

TEST(ConcurrenceMixed, Cases) {
  const ComplexMat bell = ComplexMat::projector(ComplexVec{kInvSqrt2, 0.0, 0.0, kInvSqrt2});
  EXPECT_NEAR(concurrence_mixed(bell), 1.0, 1e-14);
  EXPECT_NEAR(concurrence_mixed(ComplexMat::diagonal({0.5, 0.0, 0.0, 0.5})), 0.0, 1e-15);
  EXPECT_NEAR(concurrence_mixed(ComplexMat::diagonal({0.25, 0.25, 0.25, 0.25})), 0.0, 1e-15);
  EXPECT_NEAR(concurrence_mixed(reduced_gamma_phi(ApparatusConfig::conventional())), 1.0, 1e-14);
}

TEST(ConcurrenceMixed, WernerState) {
  // p |Bell><Bell| + (1-p) I/4 has C = max(0, (3p - 1)/2).
  const ComplexMat bell = ComplexMat::projector(ComplexVec{kInvSqrt2, 0.0, 0.0, kInvSqrt2});
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    const ComplexMat rho = p * bell + (1.0 - p) * ComplexMat::diagonal({0.25, 0.25, 0.25, 0.25});
    EXPECT_NEAR(concurrence_mixed(rho), std::max(0.0, (3.0 * p - 1.0) / 2.0), 1e-12) << p;
  }
}

TEST(ConcurrenceMixed, SourceCoherenceScalesWithOverlap) {
  // The gamma x phi state before the splitters is an X state: C = 2 |c1 c2| |q|.
  for (double c1_sq : {0.1, 0.25, 0.5, 0.9})
    for (double q : {0.0, 0.3, 0.6, 1.0}) {
      ApparatusConfig cfg;
      cfg.c1 = std::sqrt(c1_sq);
      cfg.c2 = std::sqrt(1.0 - c1_sq);
      cfg.q = std::polar(q, 0.4);
      EXPECT_NEAR(concurrence_mixed(reduced_gamma_phi(cfg)), 2.0 * std::sqrt(c1_sq * (1.0 - c1_sq)) * q, 1e-12);
    }
}

TEST(ConcurrenceMixed, AgreesWithPureRoutes) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const ComplexVec psi = qeraser::testing::random_ket(rng, 4);
    const double c_mixed = concurrence_mixed(ComplexMat::projector(psi));
    EXPECT_NEAR(c_mixed, concurrence_pure(psi), 1e-9);
    EXPECT_NEAR(c_mixed, concurrence_from_purity(psi), 1e-9);
  }
}

TEST(Distinguishability, Cases) {
  EXPECT_NEAR(distinguishability(1.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(distinguishability_from_branches(0.5, 0.5, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(distinguishability(0.8, 0.48), std::sqrt(0.8704), 1e-15);
  EXPECT_NEAR(distinguishability_from_branches(0.1, 0.9, 0.6), std::sqrt(0.8704), 1e-15);
  EXPECT_NEAR(std::sqrt(0.8704), 0.932952303175248, 1e-15);
  EXPECT_THROW(distinguishability(0.9, 0.9), ContractViolation);
}

TEST(ClosedForm, ConventionalEraser) {
  const TrialityReport r = closed_form_triality(ApparatusConfig::conventional(), Detector::kD1);
  EXPECT_NEAR(r.P, 0.0, 1e-12);
  EXPECT_NEAR(r.V, 1.0, 1e-12);
  EXPECT_NEAR(r.C, 0.0, 1e-12);
  EXPECT_EQ(r.route, Route::kClosedForm);
}

TEST(ClosedForm, FullErasureLeavesOverlapAndEntanglement) {
  // |c1 r1 r3| = |c2 r2 t3| with an asymmetric source.
  ApparatusConfig cfg;
  cfg.c1 = std::sqrt(0.8);
  cfg.c2 = std::sqrt(0.2);
  cfg.bs3 = BeamSplitter::from_reflectance(0.2);  // 0.8 * 0.2 = 0.2 * 0.8
  for (double q : {0.0, 0.35, 0.6, 1.0}) {
    cfg.q = q;
    for (Route route : {Route::kClosedForm, Route::kEvolved}) {
      const TrialityReport r = triality(cfg, Detector::kD1, route);
      EXPECT_NEAR(r.P, 0.0, 1e-12);
      EXPECT_NEAR(r.V, q, 1e-12);
      EXPECT_NEAR(r.C, std::sqrt(1.0 - q * q), 1e-12);
    }
  }
}

TEST(ClosedForm, PartialErasureSpotValues) {
  const TrialityReport r = closed_form_triality(partial_erasure(), Detector::kD1);
  EXPECT_NEAR(r.P, 0.8, 1e-12);
  EXPECT_NEAR(r.V, 0.36, 1e-12);
  EXPECT_NEAR(r.C, 0.48, 1e-12);
  EXPECT_NEAR(r.D, std::sqrt(0.8704), 1e-12);
  EXPECT_NEAR(r.probability, 0.5, 1e-15);
}

TEST(ClosedForm, D2SwapsR3AndT3) {
  // For D2 the site amplitudes are (c1 r1 t3, -c2 r2 r3): with |r3|^2 = 0.1
  // the populations become (0.9, 0.1), so P = 0.8 again and V, C unchanged.
  const TrialityReport r = closed_form_triality(partial_erasure(), Detector::kD2);
  EXPECT_NEAR(r.P, 0.8, 1e-12);
  EXPECT_NEAR(r.V, 0.36, 1e-12);
  EXPECT_NEAR(r.C, 0.48, 1e-12);
}

TEST(ClosedForm, UndefinedBranch) {
  EXPECT_THROW(closed_form_triality(ApparatusConfig::conventional(), Detector::kD3), UndefinedBranch);
  EXPECT_THROW(evolved_triality(ApparatusConfig::conventional(), Detector::kD4), UndefinedBranch);
}

TEST(Evolved, SpotValuesAndResiduals) {
  const TrialityReport r = evolved_triality(partial_erasure(), Detector::kD1);
  EXPECT_NEAR(r.P, 0.8, 1e-12);
  EXPECT_NEAR(r.V, 0.36, 1e-12);
  EXPECT_NEAR(r.C, 0.48, 1e-12);
  EXPECT_NEAR(r.D, std::sqrt(0.8704), 1e-12);
  EXPECT_NEAR(r.purity, 0.8848, 1e-12);  // (1 + P^2 + V^2) / 2
  EXPECT_LE(std::abs(r.residual_triality), 1e-12);
  EXPECT_LE(std::abs(r.residual_duality_purity), 1e-12);
  EXPECT_LE(std::abs(r.residual_distinguishability), 1e-12);
}

TEST(Evolved, WhichPathDetectorsGiveFullPathInformation) {
  ApparatusConfig cfg;
  cfg.bs1 = BeamSplitter::removed();
  cfg.bs2 = BeamSplitter::removed();
  cfg.q = 0.4;
  for (Detector d : {Detector::kD3, Detector::kD4})
    for (Route route : {Route::kEvolved, Route::kClosedForm}) {
      const TrialityReport r = triality(cfg, d, route);
      EXPECT_NEAR(r.P, 1.0, 1e-12);
      EXPECT_NEAR(r.V, 0.0, 1e-12);
      EXPECT_NEAR(r.C, 0.0, 1e-12);
      EXPECT_NEAR(r.D, 1.0, 1e-12);
    }
}

TEST(Evolved, IdenticalPolarizersNeverEntangle) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    ApparatusConfig cfg = random_cfg(13, i);
    cfg.q = 1.0;
    for (Detector d : kAllDetectors) {
      if (click_probability(cfg, d) <= 1e-9) continue;
      EXPECT_NEAR(evolved_triality(cfg, d).C, 0.0, 1e-12);
    }
  }
}

TEST(Properties, RoutesAgreeAndIdentitiesHold) {
  int evaluated = 0;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    const ApparatusConfig cfg = random_cfg(314, i);
    for (Detector d : kAllDetectors) {
      if (click_probability(cfg, d) <= 1e-6) continue;
      ++evaluated;
      const TrialityReport e = evolved_triality(cfg, d);
      const TrialityReport c = closed_form_triality(cfg, d);
      EXPECT_LE(max_route_discrepancy(e, c), 1e-10);
      for (const TrialityReport& r : {e, c}) {
        EXPECT_LE(std::abs(r.residual_triality), 1e-10);
        EXPECT_LE(std::abs(r.residual_duality_purity), 1e-10);
        EXPECT_LE(std::abs(r.residual_distinguishability), 1e-10);
        EXPECT_LE(r.V, std::abs(cfg.q) + 1e-12);
        for (double x : {r.P, r.V, r.C, r.D}) {
          EXPECT_GE(x, -1e-12);
          EXPECT_LE(x, 1.0 + 1e-12);
        }
        EXPECT_GE(r.D, r.P - 1e-12);
        EXPECT_GE(r.D, r.C - 1e-12);
      }
      // Wootters route on the conditional ket.
      const ComplexVec psi = detect(cfg, d).state();
      EXPECT_NEAR(concurrence_mixed(ComplexMat::projector(psi)), e.C, 1e-9);
    }
  }
  EXPECT_GT(evaluated, 10000);
}

TEST(Properties, PhaseInvariance) {
  for (std::uint64_t i = 0; i < 500; ++i) {
    const ApparatusConfig base = random_cfg(55, i);
    const cplx phase = std::polar(1.0, 0.37 + 0.01 * static_cast<double>(i));
    for (int which = 0; which < 3; ++which) {
      ApparatusConfig cfg = base;
      if (which == 0) cfg.c1 *= phase;
      if (which == 1) cfg.bs1.r *= phase;
      if (which == 2) cfg.q *= phase;
      for (Detector d : kAllDetectors) {
        if (click_probability(base, d) <= 1e-6) continue;
        const TrialityReport a = evolved_triality(base, d), b = evolved_triality(cfg, d);
        EXPECT_LE(max_route_discrepancy(a, b), 1e-12);
      }
    }
  }
}
