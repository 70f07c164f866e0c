#pragma once

// Test-side oracles, independent of the library implementation paths they
// check.

#include <cmath>
#include <complex>
#include <functional>

namespace oracles {

// Gamma(x) for real x > 0 by exp-sinh quadrature of the integral definition.
inline double gammaByQuadrature(double x) {
  const double h = 0.004;
  long double sum = 0.0L;
  for (double u = -5.0; u <= 5.0; u += h) {
    double t = std::exp(M_PI_2 * std::sinh(u));
    if (t > 700.0) continue;
    double w = M_PI_2 * std::cosh(u);
    long double val = std::exp(x * std::log(t) - t) * w;
    sum += val;
  }
  return static_cast<double>(sum * h);
}

// Real digamma by recurrence into x >= 10 plus the Bernoulli series.
inline double digammaReal(double x) {
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x, inv2 = inv * inv;
  double series =
      inv2 * (1.0 / 12.0 +
              inv2 * (-1.0 / 120.0 +
                      inv2 * (1.0 / 252.0 +
                              inv2 * (-1.0 / 240.0 + inv2 * (1.0 / 132.0)))));
  return acc + std::log(x) - 0.5 * inv - series;
}

// Stirling with the first correction terms; good to ~1e-10 relative for
// x >= 10.
inline double logGammaStirling(double x) {
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * M_PI) +
         1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x);
}

// High-order derivative estimate: Richardson ladder over central
// differences at shrinking steps.
inline std::complex<double> derivativeByFiniteDifference(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> z, double h0 = 1e-3) {
  std::complex<double> table[5][5];
  for (int k = 0; k < 5; ++k) {
    double h = h0 / std::pow(2.0, k);
    table[k][0] = (f(z + h) - f(z - h)) / (2.0 * h);
    for (int m = 1; m <= k; ++m) {
      double p = std::pow(4.0, m);
      table[k][m] = (p * table[k][m - 1] - table[k - 1][m - 1]) / (p - 1.0);
    }
  }
  return table[4][4];
}

}  // namespace oracles
