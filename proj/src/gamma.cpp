#include "tractlab/gamma.hpp"

#include <array>
#include <cmath>

namespace tractlab {

namespace {

// Lanczos kernel, g = 607/128, 15 terms (Godfrey's coefficients).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);

// Only valid for Re z >= 1/2.
Complex logGammaRightHalf(Complex z) {
  Complex s(kLanczos[0], 0.0);
  for (std::size_t k = 1; k < kLanczos.size(); ++k)
    s += kLanczos[k] / (z + Complex(static_cast<double>(k) - 1.0, 0.0));
  Complex base = z + Complex(kLanczosG - 0.5, 0.0);
  return (z - Complex(0.5, 0.0)) * std::log(base) - base + kHalfLog2Pi +
         std::log(s);
}

double distanceToNonPositiveInteger(Complex z) {
  double n = std::round(z.real());
  if (n > 0.0) n = 0.0;
  return std::abs(z - Complex(n, 0.0));
}

}  // namespace

Complex clog1p(Complex x) {
  if (std::abs(x) < 1e-4) {
    // x - x^2/2 + x^3/3 - x^4/4 keeps full precision near zero
    Complex x2 = x * x;
    return x - x2 * 0.5 + x2 * x / 3.0 - x2 * x2 * 0.25;
  }
  return std::log(Complex(1.0, 0.0) + x);
}

Complex logSinComplex(Complex w) {
  const Complex i(0.0, 1.0);
  const double log2 = std::log(2.0);
  if (w.imag() > 0.0) {
    // sin w = (i/2) e^{-iw} (1 - e^{2iw}),  |e^{2iw}| < 1
    return Complex(-log2, M_PI / 2.0) - i * w + clog1p(-std::exp(2.0 * i * w));
  }
  // sin w = (-i/2) e^{iw} (1 - e^{-2iw}),  |e^{-2iw}| <= 1
  return Complex(-log2, -M_PI / 2.0) + i * w +
         clog1p(-std::exp(-2.0 * i * w));
}

Complex complexLogGamma(Complex z) {
  if (z.real() >= 0.5) return logGammaRightHalf(z);
  // Reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1-z)
  return std::log(M_PI) - logSinComplex(M_PI * z) -
         logGammaRightHalf(Complex(1.0, 0.0) - z);
}

ComplexValue complexGamma(Complex z, double poleRadius) {
  if (z.real() < 0.5 && distanceToNonPositiveInteger(z) <= poleRadius)
    return ComplexValue::pole();
  Complex lg = complexLogGamma(z);
  return ComplexValue::fromLogPolar(lg.real(), lg.imag());
}

Complex digamma(Complex z) {
  if (z.real() < 0.5) {
    // psi(z) = psi(1-z) - pi cot(pi z); cot in overflow-safe form
    Complex w = M_PI * z;
    const Complex i(0.0, 1.0);
    Complex cot;
    if (w.imag() > 0.0) {
      Complex e = std::exp(2.0 * i * w);
      cot = i * (e + 1.0) / (e - 1.0);
    } else {
      Complex e = std::exp(-2.0 * i * w);
      cot = i * (1.0 + e) / (1.0 - e);
    }
    return digamma(Complex(1.0, 0.0) - z) - M_PI * cot;
  }

  Complex acc(0.0, 0.0);
  while (z.real() < 8.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  // Asymptotic series: log z - 1/(2z) - sum B_{2n} / (2n z^{2n})
  Complex inv = 1.0 / z;
  Complex inv2 = inv * inv;
  Complex series = inv2 * (1.0 / 12.0 +
                   inv2 * (-1.0 / 120.0 +
                   inv2 * (1.0 / 252.0 +
                   inv2 * (-1.0 / 240.0 +
                   inv2 * (1.0 / 132.0 +
                   inv2 * (-691.0 / 32760.0 +
                   inv2 * (1.0 / 12.0)))))));
  return acc + std::log(z) - 0.5 * inv - series;
}

}  // namespace tractlab
