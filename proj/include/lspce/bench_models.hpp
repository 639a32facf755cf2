#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lspce/poly_basis.hpp"
#include "lspce/seq_design.hpp"

namespace lspce {

using Complex = std::complex<double>;

inline constexpr double kEpsilon0 = 8.8541878128e-12;  // F/m
inline constexpr double kMu0 = 1.25663706212e-6;       // H/m

/// Second-order Debye material. Relaxation times are in units of `time_unit`
/// seconds.
struct DebyeMaterial {
  double eps_inf = 1.0, eps_s1 = 1.0, eps_s2 = 1.0;
  double mu_inf = 1.0, mu_s1 = 1.0, mu_s2 = 1.0;
  double tau_e1 = 1.0, tau_e2 = 1.0, tau_m1 = 1.0, tau_m2 = 1.0;
  double time_unit = 1e-10;
};

struct RelativeParameters {
  Complex eps_r;
  Complex mu_r;
};

/// eps_r = eps_inf + sum_k (eps_sk - eps_inf) / (1 + i omega tau_ek), mu_r alike.
RelativeParameters debye(const DebyeMaterial& material, double omega);

/// Slab-loaded rectangular waveguide. h never enters the TE10 solution.
struct WaveguideGeometry {
  double width = 30e-3;
  double height = 3e-3;
  double length = 7e-3;
  double offset = 1e-3;
};

struct Scattering {
  Complex gamma;        ///< reflection at the input port
  Complex transmission;  ///< amplitude into the output guide
};

/// TE10 cascade air | slab | air terminated by a matched output guide.
/// Throws "degenerate_cutoff" when any region sits exactly at cutoff.
Scattering scattering(const WaveguideGeometry& geometry, const RelativeParameters& slab,
                      double frequency);
Scattering scattering(const WaveguideGeometry& geometry, const DebyeMaterial& material,
                      double frequency);

/// |Gamma| in [0, 1].
double reflection(const WaveguideGeometry& geometry, const DebyeMaterial& material,
                  double frequency);

/// 20 log10(max(r, 1e-12)).
double to_decibel(double r);

inline constexpr std::size_t kWaveguideParameters = 14;

/// Nominal values in the order (w, h, l, d, eps_s1, eps_s2, eps_inf, mu_s1,
/// mu_s2, mu_inf, tau_e1, tau_e2, tau_m1, tau_m2).
const std::array<double, kWaveguideParameters>& waveguide_nominal();

struct WaveguideConfig {
  bool broadband = false;
  double frequency = 5e9;                ///< single-frequency mode
  double band_lower = 10e9;              ///< broadband mode
  double band_upper = 20e9;
  double relative_spread = 0.05;
  double time_unit = 1e-10;
};

/// Splits a 14 (or 15, broadband) coordinate sample.
WaveguideGeometry waveguide_geometry(std::span<const double> y);
DebyeMaterial waveguide_material(std::span<const double> y, double time_unit);

/// Reflection in dB; broadband mode reads f from the 15th coordinate.
double waveguide_qoi(std::span<const double> y, const WaveguideConfig& config);

/// Nominal +-spread uniform bounds; broadband appends the frequency band.
InputModel waveguide_input_model(const WaveguideConfig& config);

/// a y1^2 + b y2 with y already in reference coordinates.
double synthetic_poly(std::span<const double> y, double a = 1.0, double b = 1.0);

/// A registered benchmark: its evaluator and default input model.
struct BenchModel {
  std::string name;
  InputModel input;
  Evaluator evaluator;
  std::optional<double> time_unit;
};

/// "waveguide-sf", "waveguide-bb" or "poly-2d". Throws "unknown_model".
BenchModel make_bench_model(std::string_view name);
std::vector<std::string> bench_model_names();

}  // namespace lspce
