#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lspce/bench_models.hpp"
#include "lspce/error.hpp"
#include "oracles/debye.hpp"
#include "oracles/waveguide_transfer_matrix.hpp"

using namespace lspce;

namespace {

DebyeMaterial nominal_material() {
  const auto& n = waveguide_nominal();
  return waveguide_material(std::span<const double>(n.data(), n.size()), 1e-10);
}

WaveguideGeometry nominal_geometry() {
  const auto& n = waveguide_nominal();
  return waveguide_geometry(std::span<const double>(n.data(), n.size()));
}

// Oracle reflection of a 14-coordinate sample at frequency f.
double oracle_reflection(std::span<const double> y, double f) {
  const double omega = 2.0 * std::numbers::pi * f;
  const double t = 1e-10;
  const auto eps = oracle::debye2(y[6], y[4], y[5], y[10] * t, y[11] * t, omega);
  const auto mu = oracle::debye2(y[9], y[7], y[8], y[12] * t, y[13] * t, omega);
  return std::abs(oracle::waveguide(y[0], y[2], y[3], eps, mu, f).gamma);
}

}  // namespace

TEST(Debye, StaticAndHighFrequencyLimits) {
  const auto m = nominal_material();
  const auto zero = debye(m, 0.0);
  EXPECT_NEAR(zero.eps_r.real(), 3.2, 1e-15);
  EXPECT_NEAR(zero.mu_r.real(), 4.0, 1e-15);
  EXPECT_EQ(zero.eps_r.imag(), 0.0);
  const double omega = 1e8 / (m.tau_e1 * m.time_unit);
  EXPECT_NEAR(std::abs(debye(m, omega).eps_r - 1.0), 0.0, 1e-6);
}

TEST(Debye, MatchesOracle) {
  const auto m = nominal_material();
  for (double f : {1e9, 5e9, 13e9}) {
    const double w = 2.0 * std::numbers::pi * f;
    const auto p = debye(m, w);
    EXPECT_LT(std::abs(p.eps_r - oracle::debye2(1.0, 2.0, 2.2, 1e-10, 1.1e-10, w)), 1e-14);
    EXPECT_LT(std::abs(p.mu_r - oracle::debye2(1.0, 2.0, 3.0, 1e-10, 2e-10, w)), 1e-14);
    EXPECT_LE(p.eps_r.imag(), 0.0);  // passive under e^{+i omega t}
  }
}

TEST(Reflection, NoContrastNoReflection) {
  DebyeMaterial vacuum;
  for (double f : {6e9, 9e9, 17e9}) EXPECT_NEAR(reflection(nominal_geometry(), vacuum, f), 0.0, 1e-12);
}

TEST(Reflection, LosslessEnergyConservation) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    WaveguideGeometry g;
    g.width = 28e-3 + 4e-3 * u(gen);
    g.length = 2e-3 + 10e-3 * u(gen);
    g.offset = 2e-3 * u(gen);
    const RelativeParameters slab{1.0 + 5.0 * u(gen), 1.0 + 5.0 * u(gen)};
    const double f = 6e9 + 14e9 * u(gen);
    const auto s = scattering(g, slab, f);
    EXPECT_NEAR(std::norm(s.gamma) + std::norm(s.transmission), 1.0, 1e-10);
    const auto o = oracle::waveguide(g.width, g.length, g.offset, slab.eps_r, slab.mu_r, f);
    EXPECT_NEAR(std::abs(s.transmission), std::abs(o.transmission), 1e-10);
  }
}

TEST(Reflection, OffsetOnlyShiftsPhase) {
  auto g = nominal_geometry();
  const auto m = nominal_material();
  const double r0 = reflection(g, m, 12e9);
  for (double d : {0.0, 0.5e-3, 3e-3}) {
    g.offset = d;
    EXPECT_NEAR(reflection(g, m, 12e9), r0, 1e-12);
  }
}

TEST(Reflection, NominalMatchesOracle) {
  const auto& n = waveguide_nominal();
  const std::span<const double> y(n.data(), n.size());
  const double r = reflection(nominal_geometry(), nominal_material(), 5e9);
  const double o = oracle_reflection(y, 5e9);
  EXPECT_NEAR(r / o, 1.0, 1e-10);
  WaveguideConfig cfg;
  EXPECT_NEAR(waveguide_qoi(y, cfg), 20.0 * std::log10(o), 1e-8);
}

TEST(Reflection, RandomSamplesMatchOracleAndStayPassive) {
  for (bool broadband : {false, true}) {
    WaveguideConfig cfg;
    cfg.broadband = broadband;
    const InputModel input = waveguide_input_model(cfg);
    EXPECT_EQ(input.dimension(), broadband ? 15u : 14u);
    for (const auto& y : sample_ed(input, 1000, broadband ? 2 : 1)) {
      const double f = broadband ? y[14] : cfg.frequency;
      const double r = reflection(waveguide_geometry(y), waveguide_material(y, cfg.time_unit), f);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0 + 1e-12);
      EXPECT_NEAR(r / oracle_reflection(y, f), 1.0, 1e-10);
    }
  }
}

TEST(Reflection, HeightIsInert) {
  WaveguideConfig cfg;
  auto y = std::vector<double>(waveguide_nominal().begin(), waveguide_nominal().end());
  const double a = waveguide_qoi(y, cfg);
  y[1] *= 1.04;
  EXPECT_EQ(waveguide_qoi(y, cfg), a);
}

TEST(Reflection, ExactCutoffIsAnError) {
  auto g = nominal_geometry();
  const double fc = 1.0 / (2.0 * g.width * std::sqrt(kMu0 * kEpsilon0));
  try {
    reflection(g, DebyeMaterial{}, fc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degenerate_cutoff");
  }
}

TEST(Decibel, Examples) {
  EXPECT_EQ(to_decibel(1.0), 0.0);
  EXPECT_NEAR(to_decibel(0.1), -20.0, 1e-12);
  EXPECT_NEAR(to_decibel(0.0), -240.0, 1e-12);
}

TEST(SyntheticPoly, Examples) {
  EXPECT_EQ(synthetic_poly(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_EQ(synthetic_poly(std::vector<double>{1.0, 1.0}, 2.0, 3.0), 5.0);
  EXPECT_EQ(synthetic_poly(std::vector<double>{-1.0, 0.5}, 1.0, 2.0), 2.0);
}

TEST(Registry, Names) {
  for (const auto& name : bench_model_names()) EXPECT_EQ(make_bench_model(name).name, name);
  try {
    make_bench_model("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unknown_model");
  }
  const auto sf = make_bench_model("waveguide-sf");
  for (std::size_t n = 0; n < 14; ++n) {
    EXPECT_NEAR(sf.input[n].mean(), waveguide_nominal()[n], 1e-12 * waveguide_nominal()[n]);
    EXPECT_NEAR(sf.input[n].width(), 0.1 * waveguide_nominal()[n], 1e-12 * waveguide_nominal()[n]);
  }
}
