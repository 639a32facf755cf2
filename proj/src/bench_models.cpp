#include "lspce/bench_models.hpp"

#include <cmath>
#include <numbers>

#include "lspce/error.hpp"

namespace lspce {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kCutoffTolerance = 1e-12;

// Longitudinal wavenumber with Im(kz) <= 0, and Re(kz) >= 0 on the real axis.
Complex longitudinal(Complex kz_squared) {
  Complex s = std::sqrt(kz_squared);
  if (s.imag() > 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
  return s;
}

Complex debye_term(double s, double inf, double omega_tau) {
  return (s - inf) / (1.0 + kI * omega_tau);
}

void check_sample(std::span<const double> y, std::size_t expected) {
  if (y.size() != expected) {
    throw Error("dimension_mismatch", "waveguide sample has " + std::to_string(y.size()) +
                                          " coordinates, expected " + std::to_string(expected));
  }
}

}  // namespace

RelativeParameters debye(const DebyeMaterial& m, double omega) {
  const double t = omega * m.time_unit;
  return {m.eps_inf + debye_term(m.eps_s1, m.eps_inf, t * m.tau_e1) +
              debye_term(m.eps_s2, m.eps_inf, t * m.tau_e2),
          m.mu_inf + debye_term(m.mu_s1, m.mu_inf, t * m.tau_m1) +
              debye_term(m.mu_s2, m.mu_inf, t * m.tau_m2)};
}

Scattering scattering(const WaveguideGeometry& geometry, const RelativeParameters& slab,
                      double frequency) {
  if (!(frequency > 0.0)) throw Error("invalid_argument", "frequency must be positive");
  const double omega = 2.0 * std::numbers::pi * frequency;
  const double kc = std::numbers::pi / geometry.width;
  const double kc2 = kc * kc;
  const double k0_squared = omega * omega * kMu0 * kEpsilon0;

  const Complex air_squared{k0_squared - kc2, 0.0};
  const Complex slab_squared = k0_squared * slab.eps_r * slab.mu_r - kc2;
  if (std::abs(air_squared) <= kCutoffTolerance * kc2 ||
      std::abs(slab_squared) <= kCutoffTolerance * kc2) {
    throw Error("degenerate_cutoff", "TE10 cutoff hit exactly at f = " +
                                         std::to_string(frequency) + " Hz");
  }
  const Complex ka = longitudinal(air_squared);
  const Complex ks = longitudinal(slab_squared);
  const Complex za = omega * kMu0 / ka;
  const Complex zs = omega * kMu0 * slab.mu_r / ks;

  const Complex theta = ks * geometry.length;
  const Complex t = std::tan(theta);
  const Complex zin = zs * (za + kI * zs * t) / (zs + kI * za * t);

  // Power-wave reflection: equals (Zin - Za)/(Zin + Za) for a propagating
  // port and has modulus 1 for an evanescent one.
  Scattering out;
  out.gamma = (zin - std::conj(za)) / (zin + za);
  out.transmission = (1.0 + out.gamma) / (std::cos(theta) + kI * (zs / za) * std::sin(theta));
  return out;
}

Scattering scattering(const WaveguideGeometry& geometry, const DebyeMaterial& material,
                      double frequency) {
  return scattering(geometry, debye(material, 2.0 * std::numbers::pi * frequency), frequency);
}

double reflection(const WaveguideGeometry& geometry, const DebyeMaterial& material,
                  double frequency) {
  return std::abs(scattering(geometry, material, frequency).gamma);
}

double to_decibel(double r) { return 20.0 * std::log10(std::max(r, 1e-12)); }

const std::array<double, kWaveguideParameters>& waveguide_nominal() {
  static const std::array<double, kWaveguideParameters> nominal{
      30e-3, 3e-3, 7e-3, 1e-3, 2.0, 2.2, 1.0, 2.0, 3.0, 1.0, 1.0, 1.1, 1.0, 2.0};
  return nominal;
}

WaveguideGeometry waveguide_geometry(std::span<const double> y) {
  if (y.size() < 4) check_sample(y, kWaveguideParameters);
  return {y[0], y[1], y[2], y[3]};
}

DebyeMaterial waveguide_material(std::span<const double> y, double time_unit) {
  if (y.size() < kWaveguideParameters) check_sample(y, kWaveguideParameters);
  DebyeMaterial m;
  m.eps_s1 = y[4];
  m.eps_s2 = y[5];
  m.eps_inf = y[6];
  m.mu_s1 = y[7];
  m.mu_s2 = y[8];
  m.mu_inf = y[9];
  m.tau_e1 = y[10];
  m.tau_e2 = y[11];
  m.tau_m1 = y[12];
  m.tau_m2 = y[13];
  m.time_unit = time_unit;
  return m;
}

double waveguide_qoi(std::span<const double> y, const WaveguideConfig& config) {
  check_sample(y, config.broadband ? kWaveguideParameters + 1 : kWaveguideParameters);
  const double f = config.broadband ? y[kWaveguideParameters] : config.frequency;
  return to_decibel(
      reflection(waveguide_geometry(y), waveguide_material(y, config.time_unit), f));
}

InputModel waveguide_input_model(const WaveguideConfig& config) {
  const auto& nominal = waveguide_nominal();
  auto vars = InputModel::around_nominal(nominal, config.relative_spread).variables();
  if (config.broadband) vars.push_back({config.band_lower, config.band_upper});
  return InputModel(std::move(vars));
}

double synthetic_poly(std::span<const double> y, double a, double b) {
  if (y.size() < 2) {
    throw Error("dimension_mismatch", "synthetic polynomial needs at least 2 coordinates");
  }
  return a * y[0] * y[0] + b * y[1];
}

BenchModel make_bench_model(std::string_view name) {
  if (name == "waveguide-sf" || name == "waveguide-bb") {
    WaveguideConfig config;
    config.broadband = name == "waveguide-bb";
    return {std::string(name), waveguide_input_model(config),
            [config](std::span<const double> y) { return waveguide_qoi(y, config); },
            config.time_unit};
  }
  if (name == "poly-2d") {
    return {std::string(name), InputModel({{-1.0, 1.0}, {-1.0, 1.0}}),
            [](std::span<const double> y) { return synthetic_poly(y); }, std::nullopt};
  }
  throw Error("unknown_model", "unknown model '" + std::string(name) +
                                   "' (expected waveguide-sf, waveguide-bb or poly-2d)");
}

std::vector<std::string> bench_model_names() { return {"waveguide-sf", "waveguide-bb", "poly-2d"}; }

}  // namespace lspce
