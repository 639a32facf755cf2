#pragma once

// Second-order Debye relative parameter, written out term by term.

#include <complex>

namespace oracle {

inline std::complex<double> debye2(double inf, double s1, double s2, double tau1, double tau2,
                                   double omega) {
  const std::complex<double> i{0.0, 1.0};
  return inf + (s1 - inf) / (1.0 + i * omega * tau1) + (s2 - inf) / (1.0 + i * omega * tau2);
}

}  // namespace oracle
