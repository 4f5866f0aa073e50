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

#include "qeraser/apparatus.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qeraser/runner.hpp"

using namespace qeraser;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

std::size_t idx(std::size_t g, std::size_t phi, std::size_t pol) { return RegisterLayout::index(g, phi, pol); }

// |c1|^2 = 0.5, mirrors at B1/B2, |r3|^2 = 0.1, q = 0.6.
ApparatusConfig partial_erasure() {
  ApparatusConfig cfg;
  cfg.bs3 = BeamSplitter::from_reflectance(0.1);
  cfg.q = 0.6;
  return cfg;
}

ApparatusConfig which_path() {
  ApparatusConfig cfg;
  cfg.bs1 = BeamSplitter::removed();
  cfg.bs2 = BeamSplitter::removed();
  return cfg;
}

}  // namespace

TEST(Config, Validation) {
  EXPECT_NO_THROW(validate(ApparatusConfig::conventional()));
  ApparatusConfig bad = ApparatusConfig::conventional();
  bad.c1 = 0.9;
  EXPECT_THROW(validate(bad), ValidationError);
  bad = ApparatusConfig::conventional();
  bad.bs3 = {0.5, 0.5};
  EXPECT_THROW(validate(bad), ValidationError);
  bad = ApparatusConfig::conventional();
  bad.q = 1.1;
  EXPECT_THROW(source_state(bad), ValidationError);
}

TEST(SourceState, SymmetricCoherentSource) {
  const ComplexVec psi = source_state(ApparatusConfig::conventional());
  ComplexVec expected(RegisterLayout::kTotal);
  expected[idx(0, kUpperInput, 0)] = kInvSqrt2;
  expected[idx(1, kLowerInput, 0)] = kInvSqrt2;
  EXPECT_LE(max_abs_diff(psi, expected), 1e-15);
  EXPECT_TRUE(psi.is_normalized());
}

TEST(SourceState, OrthogonalPolarizersTagThePath) {
  ApparatusConfig cfg;
  cfg.q = 0.0;
  const ComplexVec psi = source_state(cfg);
  EXPECT_EQ(psi[idx(1, kLowerInput, 0)], cplx(0.0));
  EXPECT_NEAR(std::abs(psi[idx(1, kLowerInput, 1)]), kInvSqrt2, 1e-15);
}

TEST(SourceState, SingleSiteEmissionIsProduct) {
  ApparatusConfig cfg;
  cfg.c1 = 1.0;
  cfg.c2 = 0.0;
  const ComplexVec psi = source_state(cfg);
  EXPECT_EQ(psi, ComplexVec::basis(16, idx(0, kUpperInput, 0)));
}

TEST(SourceState, EmbeddingReproducesOverlap) {
  for (cplx q : {cplx{0.6, 0.0}, std::polar(0.3, 2.0), cplx{0.0, 0.0}, cplx{1.0, 0.0}, std::polar(0.999, -1.0)}) {
    ApparatusConfig cfg;
    cfg.q = q;
    EXPECT_TRUE(polarization_s2(cfg).is_normalized(1e-15));
    EXPECT_EQ(inner(polarization_s1(cfg), polarization_s2(cfg)), q);
  }
}

TEST(BeamSplitters, TransmittingB1SendsSite1ToA) {
  ApparatusConfig cfg;
  cfg.bs1 = BeamSplitter::removed();
  const ComplexVec psi = apply_b1_b2(source_state(cfg), cfg);
  EXPECT_NEAR(std::abs(psi[idx(0, 0, 0)]), kInvSqrt2, 1e-15);
  EXPECT_EQ(psi[idx(0, 1, 0)], cplx(0.0));
}

TEST(BeamSplitters, MirrorsBlockAAndD) {
  const ApparatusConfig cfg = ApparatusConfig::conventional();
  const ComplexVec psi = apply_b1_b2(source_state(cfg), cfg);
  for (std::size_t g = 0; g < 2; ++g)
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_EQ(psi[idx(g, 0, s)], cplx(0.0));
      EXPECT_EQ(psi[idx(g, 3, s)], cplx(0.0));
    }
}

TEST(BeamSplitters, BalancedB1SplitsEvenly) {
  ApparatusConfig cfg;
  cfg.c1 = 1.0;
  cfg.c2 = 0.0;
  cfg.bs1 = BeamSplitter::balanced();
  const ComplexVec psi = apply_b1_b2(source_state(cfg), cfg);
  EXPECT_NEAR(psi[idx(0, 0, 0)].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(psi[idx(0, 1, 0)].real(), kInvSqrt2, 1e-15);
}

TEST(BeamSplitters, B1B2TransferIsUnitaryForComplexAmplitudes) {
  ApparatusConfig cfg;
  cfg.bs1 = BeamSplitter::from_reflectance(0.3, 1.1, -0.4);
  cfg.bs2 = BeamSplitter::from_reflectance(0.8, 2.5, 0.7);
  EXPECT_TRUE(is_unitary(phi_transfer_b1_b2(cfg)));
  cfg.bs3 = BeamSplitter::from_reflectance(0.2);
  EXPECT_TRUE(is_unitary(phi_transfer_b3(cfg)));
}

TEST(BeamSplitters, ConventionalEraserAfterB3) {
  // (1/2)|site1>(|D1> + |D2>) + (1/2)|site2>(|D1> - |D2>)
  const ComplexVec psi = evolved_state(ApparatusConfig::conventional());
  ComplexVec expected(16);
  expected[idx(0, kD1Port, 0)] = 0.5;
  expected[idx(0, kD2Port, 0)] = 0.5;
  expected[idx(1, kD1Port, 0)] = 0.5;
  expected[idx(1, kD2Port, 0)] = -0.5;
  EXPECT_LE(phase_aligned_distance(psi, expected), 1e-15);
}

TEST(BeamSplitters, PassThroughAndFullyReflectingB3) {
  ApparatusConfig cfg;
  cfg.bs3 = BeamSplitter::removed();  // t3 = 1
  ComplexVec psi = evolved_state(cfg);
  EXPECT_EQ(psi[idx(0, kD1Port, 0)], cplx(0.0));  // D1 port gets only site 2
  EXPECT_NE(psi[idx(1, kD1Port, 0)], cplx(0.0));
  EXPECT_EQ(psi[idx(1, kD2Port, 0)], cplx(0.0));

  cfg.bs3 = BeamSplitter::mirror();  // r3 = 1
  psi = evolved_state(cfg);
  EXPECT_NEAR(psi[idx(0, kD1Port, 0)].real(), kInvSqrt2, 1e-15);
  EXPECT_EQ(psi[idx(1, kD1Port, 0)], cplx(0.0));
  EXPECT_NEAR(psi[idx(1, kD2Port, 0)].real(), -kInvSqrt2, 1e-15);
}

TEST(BeamSplitters, NormPreservedOnRandomConfigs) {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    SplitMix64 rng = SplitMix64::for_index(42, i);
    const ApparatusConfig cfg = random_config(rng);
    const ComplexVec s0 = source_state(cfg);
    const ComplexVec s1 = apply_b1_b2(s0, cfg);
    const ComplexVec s2 = apply_b3(s1, cfg);
    EXPECT_NEAR(s0.norm_sq(), 1.0, 1e-12);
    EXPECT_NEAR(s1.norm_sq(), 1.0, 1e-12);
    EXPECT_NEAR(s2.norm_sq(), 1.0, 1e-12);
  }
}

TEST(Detect, ConventionalEraserD1IsGammaPlus) {
  const DetectionOutcome d1 = detect(ApparatusConfig::conventional(), Detector::kD1);
  EXPECT_NEAR(d1.probability, 0.5, 1e-15);
  const ComplexVec gamma_plus_s1{kInvSqrt2, 0.0, kInvSqrt2, 0.0};
  EXPECT_LE(phase_aligned_distance(d1.state(), gamma_plus_s1), 1e-15);
  EXPECT_LE(max_abs_diff(d1.rho_gamma(), ComplexMat{{0.5, 0.5}, {0.5, 0.5}}), 1e-15);

  const DetectionOutcome d2 = detect(ApparatusConfig::conventional(), Detector::kD2);
  EXPECT_LE(max_abs_diff(d2.rho_gamma(), ComplexMat{{0.5, -0.5}, {-0.5, 0.5}}), 1e-15);
}

TEST(Detect, MirrorsNeverFireD3) {
  const DetectionOutcome d3 = detect(ApparatusConfig::conventional(), Detector::kD3);
  EXPECT_EQ(d3.probability, 0.0);
  EXPECT_FALSE(d3.defined());
  EXPECT_THROW(d3.state(), UndefinedBranch);
  EXPECT_THROW(d3.rho_gamma(), UndefinedBranch);
}

TEST(Detect, WhichPathSetupCollapsesToOneSite) {
  const DetectionOutcome d3 = detect(which_path(), Detector::kD3);
  const DetectionOutcome d4 = detect(which_path(), Detector::kD4);
  EXPECT_NEAR(d3.probability, 0.5, 1e-15);
  EXPECT_LE(max_abs_diff(d3.rho_gamma(), ComplexMat::diagonal({1.0, 0.0})), 1e-15);
  EXPECT_LE(max_abs_diff(d4.rho_gamma(), ComplexMat::diagonal({0.0, 1.0})), 1e-15);
}

TEST(Detect, PartialErasureSpotValues) {
  // p1 = 0.5 * 0.1 + 0.5 * 0.9; rho = [[0.05, 0.5 * 0.3 * 0.6], [., 0.45]] / p1.
  const DetectionOutcome d1 = detect(partial_erasure(), Detector::kD1);
  EXPECT_NEAR(d1.probability, 0.5, 1e-15);
  const ComplexMat& rho = d1.rho_gamma();
  EXPECT_NEAR(rho(0, 0).real(), 0.1, 1e-15);
  EXPECT_NEAR(rho(1, 1).real(), 0.9, 1e-15);
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.18, 1e-15);
}

TEST(Detect, ProbabilitiesAndStatesMatchClosedForms) {
  for (std::uint64_t i = 0; i < 3000; ++i) {
    SplitMix64 rng = SplitMix64::for_index(9, i);
    const ApparatusConfig cfg = random_config(rng);
    const ComplexVec state = evolved_state(cfg);
    double total = 0.0;
    for (Detector d : kAllDetectors) {
      const DetectionOutcome out = detect(state, d);
      total += out.probability;
      EXPECT_NEAR(out.probability, click_probability(cfg, d), 1e-12);
      const ComplexVec branch = closed_form_branch(cfg, d);
      EXPECT_NEAR(branch.norm_sq(), click_probability(cfg, d), 1e-12);
      if (!out.defined()) continue;
      EXPECT_LE(phase_aligned_distance(out.state(), branch.normalized()), 1e-12);
      EXPECT_LE(max_abs_diff(out.rho_gamma(), rho_gamma_of(out.state())), 1e-12);
      EXPECT_TRUE(is_density(out.rho_gamma()));
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(ReducedGammaPhi, CoherentSymmetricSourceIsPure) {
  const ComplexMat rho = reduced_gamma_phi(ApparatusConfig::conventional());
  const ComplexVec psi0{kInvSqrt2, 0.0, 0.0, kInvSqrt2};  // |site1,upper> + |site2,lower>
  EXPECT_LE(max_abs_diff(rho, ComplexMat::projector(psi0)), 1e-15);
}

TEST(ReducedGammaPhi, OrthogonalPolarizersRemoveCoherence) {
  ApparatusConfig cfg;
  cfg.q = 0.0;
  EXPECT_LE(max_abs_diff(reduced_gamma_phi(cfg), ComplexMat::diagonal({0.5, 0.0, 0.0, 0.5})), 1e-15);
}

TEST(ReducedGammaPhi, CoherenceCarriesConjugateOverlap) {
  ApparatusConfig cfg;
  cfg.c1 = 0.5;
  cfg.c2 = std::sqrt(0.75);
  cfg.q = 0.6;
  const ComplexMat rho = reduced_gamma_phi(cfg);
  EXPECT_NEAR(std::abs(rho(0, 3)), 0.25980762113533157, 1e-15);
  cfg.q = std::polar(0.6, 0.8);
  cfg.c1 = std::polar(0.5, 0.3);
  const ComplexMat rc = reduced_gamma_phi(cfg);
  EXPECT_LE(std::abs(rc(0, 3) - cfg.c1 * std::conj(cfg.c2) * std::conj(cfg.q)), 1e-15);
  EXPECT_TRUE(is_density(rc));
}

TEST(ReducedGammaPhi, TracingCommutesWithBeamSplitters) {
  constexpr std::array<std::size_t, 3> dims{RegisterLayout::kGamma, RegisterLayout::kPhi, RegisterLayout::kPol};
  constexpr std::array<std::size_t, 2> keep{0, 1};
  for (std::uint64_t i = 0; i < 500; ++i) {
    SplitMix64 rng = SplitMix64::for_index(77, i);
    const ApparatusConfig cfg = random_config(rng);
    const ComplexMat net = tensor(ComplexMat::identity(2), phi_transfer_b3(cfg) * phi_transfer_b1_b2(cfg));
    const ComplexMat trace_first = net * lift_dual_rail(reduced_gamma_phi(cfg)) * net.adjoint();
    const ComplexMat evolve_first = partial_trace(ComplexMat::projector(evolved_state(cfg)), dims, keep);
    EXPECT_LE(max_abs_diff(trace_first, evolve_first), 1e-12);
  }
}

TEST(Unconditioned, ConventionalEraserIsMaximallyMixed) {
  EXPECT_LE(max_abs_diff(unconditioned_rho_gamma(ApparatusConfig::conventional()), ComplexMat::diagonal({0.5, 0.5})),
            1e-15);
}

TEST(Unconditioned, EqualsClickWeightedMixture) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SplitMix64 rng = SplitMix64::for_index(5, i);
    const ApparatusConfig cfg = random_config(rng);
    ComplexMat mix(2, 2);
    for (Detector d : kAllDetectors) {
      const DetectionOutcome out = detect(cfg, d);
      if (out.defined()) mix += out.probability * out.rho_gamma();
    }
    EXPECT_LE(max_abs_diff(mix, unconditioned_rho_gamma(cfg)), 1e-12);
  }
}
