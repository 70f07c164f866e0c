#include "tractlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tractlab/errors.hpp"
#include "tractlab/gamma.hpp"

namespace tractlab {

namespace {

constexpr double kHuge = 1e308;

double saturatedExp(double x) {
  if (x > 709.0) return kHuge;
  return std::exp(x);
}

// value * c without leaving the representable range.
ComplexValue scaleValue(const ComplexValue& v, Complex c) {
  if (v.isPole()) return ComplexValue::pole();
  if (v.isFinite()) {
    double lm = v.logAbs() + std::log(std::abs(c));
    if (lm <= kOverflowLogThreshold) return ComplexValue::finite(v.value() * c);
    return ComplexValue::overflow(lm, v.phase() + std::arg(c));
  }
  return ComplexValue::overflow(v.logAbs() + std::log(std::abs(c)),
                                v.phase() + std::arg(c));
}

// ---------------------------------------------------------------------------
// exp
// ---------------------------------------------------------------------------

ComplexValue evalExp(Complex z) {
  return ComplexValue::fromLogPolar(z.real(), z.imag());
}

ComplexValue logEvalExp(double logMod, double phase) {
  double m = saturatedExp(logMod);
  return ComplexValue::overflow(m * std::cos(phase),
                                wrapAngle(m * std::sin(phase)));
}

// ---------------------------------------------------------------------------
// exp(exp z)
// ---------------------------------------------------------------------------

ComplexValue evalExpExp(Complex z) {
  if (z.real() > 700.0) {
    double m = saturatedExp(z.real());
    // phase of exp(z) is Im z; modulus of log f is e^{Re z}
    return ComplexValue::overflow(m * std::cos(z.imag()), 0.0);
  }
  Complex w = std::exp(z);
  return ComplexValue::fromLogPolar(w.real(), w.imag());
}

ComplexValue derivExpExp(Complex z) {
  // f' = e^z * e^{e^z}
  if (z.real() > 700.0) {
    double m = saturatedExp(z.real());
    return ComplexValue::overflow(m * std::cos(z.imag()) + z.real(), 0.0);
  }
  Complex w = std::exp(z);
  return ComplexValue::fromLogPolar(w.real() + z.real(), w.imag() + z.imag());
}

ComplexValue logEvalExpExp(double logMod, double phase) {
  double m = saturatedExp(logMod);
  double re = m * std::cos(phase);
  double im = m * std::sin(phase);
  return evalExpExp(Complex(std::min(re, kHuge), im));
}

// ---------------------------------------------------------------------------
// example1: f(z) = lambda (e^{2z} - 1) / (e^z - 1/z),
// evaluated as lambda z (e^{2z} - 1) / (z e^z - 1) so z = 0 is regular.
// Poles solve z e^z = 1 (the Lambert branches W_k(1)).
// ---------------------------------------------------------------------------

constexpr double kEx1Asym = 340.0;  // |Re z| beyond which e^{2z} leaves doubles

bool ex1NearPole(Complex z, double poleRadius) {
  if (std::abs(z.real()) > kEx1Asym) return false;
  Complex den = z * std::exp(z) - 1.0;
  Complex dden = (1.0 + z) * std::exp(z);
  // first-order distance estimate to the zero of the denominator
  return std::abs(den) < poleRadius * std::abs(dden);
}

ComplexValue evalExample1(Complex z, Complex lambda, double poleRadius) {
  if (z.real() > kEx1Asym) {
    // f = lambda e^z (1 - e^{-2z}) / (1 - e^{-z}/z)
    Complex corr = clog1p(-std::exp(-2.0 * z)) - clog1p(-std::exp(-z) / z);
    Complex lf = std::log(lambda) + z + corr;
    return ComplexValue::fromLogPolar(lf.real(), lf.imag());
  }
  if (z.real() < -kEx1Asym) {
    // e^{2z} and z e^z vanish: f = lambda z
    return scaleValue(ComplexValue::finite(z), lambda);
  }
  if (ex1NearPole(z, poleRadius)) return ComplexValue::pole();
  if (std::abs(z) > 1e15) {
    // 1/z below the rounding floor: f = lambda (e^z - e^{-z}) to working
    // precision; moduli stay representable since |Re z| <= kEx1Asym
    return ComplexValue::finite(lambda * (std::exp(z) - std::exp(-z)));
  }
  Complex num = z * (std::exp(2.0 * z) - 1.0);
  Complex den = z * std::exp(z) - 1.0;
  Complex f = lambda * num / den;
  if (std::isfinite(f.real()) && std::isfinite(f.imag()))
    return ComplexValue::finite(f);
  return ComplexValue::pole();
}

ComplexValue derivExample1(Complex z, Complex lambda, double poleRadius) {
  if (z.real() > kEx1Asym) return evalExample1(z, lambda, poleRadius);
  if (z.real() < -kEx1Asym) return ComplexValue::finite(lambda);
  if (ex1NearPole(z, poleRadius)) return ComplexValue::pole();
  Complex e2z = std::exp(2.0 * z);
  Complex ez = std::exp(z);
  Complex num = z * (e2z - 1.0);
  Complex dnum = (e2z - 1.0) + 2.0 * z * e2z;
  Complex den = z * ez - 1.0;
  Complex dden = (1.0 + z) * ez;
  Complex d = lambda * (dnum * den - num * dden) / (den * den);
  if (std::isfinite(d.real()) && std::isfinite(d.imag()))
    return ComplexValue::finite(d);
  return ComplexValue::pole();
}

ComplexValue logEvalExample1(double logMod, double phase, Complex lambda) {
  double m = saturatedExp(logMod);
  double re = m * std::cos(phase);
  if (re > kEx1Asym) {
    double lf = std::min(re, kHuge) + std::log(std::abs(lambda));
    return ComplexValue::overflow(
        lf, wrapAngle(m * std::sin(phase) + std::arg(lambda)));
  }
  // f = lambda z on and left of the strip once |z| is this large
  return ComplexValue::overflow(logMod + std::log(std::abs(lambda)),
                                wrapAngle(phase + std::arg(lambda)));
}

std::vector<Complex> ex1PolesIn(const Rect& rect) {
  std::vector<Complex> seeds;
  // Lambert-branch seeds: z = 2 pi i k - log(2 pi i k), plus the real root
  seeds.push_back(Complex(0.5, 0.0));
  double kLo = std::floor(rect.imMin / (2.0 * M_PI)) - 2.0;
  double kHi = std::ceil(rect.imMax / (2.0 * M_PI)) + 2.0;
  kLo = std::max(kLo, -20000.0);
  kHi = std::min(kHi, 20000.0);
  for (double k = kLo; k <= kHi; ++k) {
    if (k == 0.0) continue;
    Complex w(0.0, 2.0 * M_PI * k);
    seeds.push_back(w - std::log(w));
  }
  // coarse grid to catch anything the asymptotic seeds miss in small windows
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      double x = rect.reMin + (i + 0.5) * (rect.reMax - rect.reMin) / 24.0;
      double y = rect.imMin + (j + 0.5) * (rect.imMax - rect.imMin) / 24.0;
      if (std::abs(x) < kEx1Asym) seeds.emplace_back(x, y);
    }
  }

  std::vector<Complex> roots;
  for (Complex z : seeds) {
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      if (std::abs(z.real()) > kEx1Asym) break;
      Complex h = z * std::exp(z) - 1.0;
      Complex dh = (1.0 + z) * std::exp(z);
      if (std::abs(dh) < 1e-300) break;
      Complex step = h / dh;
      z -= step;
      if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok || !rect.contains(z)) continue;
    if (std::abs(z * std::exp(z) - 1.0) > 1e-9) continue;
    bool dup = false;
    for (Complex r : roots)
      if (std::abs(r - z) < 1e-8 * std::max(1.0, std::abs(z))) dup = true;
    if (!dup) roots.push_back(z);
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

// ---------------------------------------------------------------------------
// gamma family
// ---------------------------------------------------------------------------

double distToNonPositiveInteger(Complex z) {
  double n = std::round(z.real());
  if (n > 0.0) n = 0.0;
  return std::abs(z - Complex(n, 0.0));
}

std::vector<Complex> gammaPolesIn(const Rect& rect, double shift) {
  // poles of Gamma(z + shift) sit at z = -n - shift, n = 0,1,2,...
  std::vector<Complex> poles;
  if (rect.imMin > 0.0 || rect.imMax < 0.0) return poles;
  double hi = std::floor(-shift);  // largest admissible pole coordinate
  for (double p = hi; p >= rect.reMin - 0.5; p -= 1.0) {
    if (p >= rect.reMin && p <= rect.reMax && p <= -shift)
      poles.push_back(Complex(p, 0.0));
    if (poles.size() > 100000) break;
  }
  std::sort(poles.begin(), poles.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  return poles;
}

// log Gamma at a point given in log-polar form, leading Stirling terms only.
ComplexValue logEvalGamma(double logMod, double phase, double shift) {
  double m = saturatedExp(logMod);
  double re = m * std::cos(phase) + shift;
  double im = m * std::sin(phase);
  // log Gamma(w) ~ (w - 1/2) log w - w; log w = logMod + i*phase
  double lgRe = (re - 0.5) * logMod - im * phase - re;
  if (!std::isfinite(lgRe)) lgRe = re > 0.0 ? kHuge : -kHuge;
  lgRe = std::clamp(lgRe, -kHuge, kHuge);
  return ComplexValue::fromLogPolar(lgRe, 0.0);
}

ComplexValue evalGammaShift(Complex z, double shift, double poleRadius) {
  return complexGamma(z + shift, poleRadius);
}

ComplexValue derivGammaShift(Complex z, double shift, double poleRadius) {
  Complex w = z + shift;
  if (w.real() < 0.5 && distToNonPositiveInteger(w) <= poleRadius)
    return ComplexValue::pole();
  Complex lg = complexLogGamma(w);
  Complex psi = digamma(w);
  double lm = lg.real() + std::log(std::abs(psi));
  return ComplexValue::fromLogPolar(lm, lg.imag() + std::arg(psi));
}

// log cos z, overflow-safe (cos z = sin(z + pi/2))
Complex logCosComplex(Complex z) {
  return logSinComplex(z + Complex(M_PI / 2.0, 0.0));
}

ComplexValue evalGammaCos(Complex z, double poleRadius) {
  Complex w = z + 1.0;
  if (w.real() < 0.5 && distToNonPositiveInteger(w) <= poleRadius)
    return ComplexValue::pole();
  Complex lg = complexLogGamma(w);
  Complex lc = logCosComplex(z);
  Complex lf = lg + lc;
  if (!std::isfinite(lf.real()))  // cos zero hit exactly
    return ComplexValue::finite(Complex(0.0, 0.0));
  return ComplexValue::fromLogPolar(lf.real(), lf.imag());
}

ComplexValue derivGammaCos(Complex z, double poleRadius) {
  // f' = Gamma(z+1) (psi(z+1) cos z - sin z)
  Complex w = z + 1.0;
  if (w.real() < 0.5 && distToNonPositiveInteger(w) <= poleRadius)
    return ComplexValue::pole();
  Complex lg = complexLogGamma(w);
  Complex psi = digamma(w);
  Complex rest;  // log(psi cos z - sin z)
  const Complex i(0.0, 1.0);
  if (z.imag() > 700.0) {
    rest = -i * z - std::log(2.0) + std::log(psi - i);
  } else if (z.imag() < -700.0) {
    rest = i * z - std::log(2.0) + std::log(psi + i);
  } else {
    Complex v = psi * std::cos(z) - std::sin(z);
    if (std::abs(v) == 0.0) return ComplexValue::finite(Complex(0.0, 0.0));
    rest = std::log(v);
  }
  Complex lf = lg + rest;
  return ComplexValue::fromLogPolar(lf.real(), lf.imag());
}

ComplexValue logEvalGammaCos(double logMod, double phase) {
  // |cos| contributes at most e^{|Im z|}; Gamma dominates at this range
  return logEvalGamma(logMod, phase, 1.0);
}

Complex parseLambda(const std::string& selector, std::size_t colon) {
  // selector tail: lambda=<re>[,<im>]
  std::string tail = selector.substr(colon + 1);
  const std::string key = "lambda=";
  if (tail.rfind(key, 0) != 0)
    throw Error(ErrorCode::UnknownModel,
                "bad model parameter (expected lambda=...): " + selector);
  std::string v = tail.substr(key.size());
  try {
    std::size_t used = 0;
    double re = std::stod(v, &used);
    double im = 0.0;
    if (used < v.size()) {
      if (v[used] != ',')
        throw Error(ErrorCode::UnknownModel, "bad lambda value: " + v);
      im = std::stod(v.substr(used + 1));
    }
    return Complex(re, im);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::UnknownModel, "bad lambda value: " + v);
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::UnknownModel, "bad lambda value: " + v);
  }
}

}  // namespace

FunctionModel::FunctionModel(std::string id,
                             std::map<std::string, Complex> parameters,
                             EvalFn eval, EvalFn analyticDerivative,
                             LogEvalFn logEval, PolesFn polesIn,
                             NearPoleFn nearPole,
                             std::vector<FixedPointRef> referenceFixedPoints)
    : id_(std::move(id)),
      parameters_(std::move(parameters)),
      eval_(std::move(eval)),
      analyticDerivative_(std::move(analyticDerivative)),
      logEval_(std::move(logEval)),
      polesIn_(std::move(polesIn)),
      nearPole_(std::move(nearPole)),
      referenceFixedPoints_(std::move(referenceFixedPoints)) {}

ComplexValue FunctionModel::eval(Complex z) const { return eval_(z); }

ComplexValue FunctionModel::evalExtended(const ComplexValue& z) const {
  switch (z.kind()) {
    case ComplexValue::Kind::Finite: return eval_(z.value());
    case ComplexValue::Kind::PoleHit: return ComplexValue::pole();
    case ComplexValue::Kind::Overflow:
      if (z.logAbs() < 0.0) {
        // deep-tiny point: a representable stand-in at the same argument
        Complex approx = std::polar(std::exp(std::max(z.logAbs(), -700.0)),
                                    z.phase());
        return eval_(approx);
      }
      if (logEval_) return logEval_(z.logAbs(), z.phase());
      return ComplexValue::overflow(std::numeric_limits<double>::quiet_NaN(),
                                    0.0);
  }
  return ComplexValue::pole();
}

ComplexValue FunctionModel::derivative(Complex z) const {
  if (analyticDerivative_) return analyticDerivative_(z);
  return numericDerivative(*this, z);
}

std::vector<Complex> FunctionModel::polesIn(const Rect& r) const {
  if (!polesIn_) return {};
  return polesIn_(r);
}

bool FunctionModel::nearPole(Complex z) const {
  if (!nearPole_) return false;
  return nearPole_(z, poleRadius_);
}

ComplexValue evaluate(const FunctionModel& model, Complex z) {
  return model.eval(z);
}

ComplexValue numericDerivative(const FunctionModel& model, Complex z) {
  double h0 = 1e-4 * std::max(1.0, std::abs(z));
  auto centered = [&](double h) -> Complex {
    ComplexValue a = model.eval(z + Complex(h, 0.0));
    ComplexValue b = model.eval(z - Complex(h, 0.0));
    if (!a.isFinite() || !b.isFinite())
      throw Error(ErrorCode::DerivativeUnstable,
                  "step neighborhood is not pole-free / representable");
    return (a.value() - b.value()) / (2.0 * h);
  };
  Complex d1 = centered(h0);
  Complex d2 = centered(h0 / 2.0);
  Complex d3 = centered(h0 / 4.0);
  Complex r1 = (4.0 * d2 - d1) / 3.0;
  Complex r2 = (4.0 * d3 - d2) / 3.0;
  double scale = std::max(std::abs(r2), 1e-300);
  if (std::abs(r2 - r1) > 1e-4 * std::max(scale, 1e-12))
    throw Error(ErrorCode::DerivativeUnstable,
                "Richardson extrapolants disagree");
  return ComplexValue::finite((16.0 * r2 - r1) / 15.0);
}

FunctionModel makeModel(const std::string& selector) {
  std::string name = selector;
  std::size_t colon = selector.find(':');
  if (colon != std::string::npos) name = selector.substr(0, colon);

  if (name == "exp") {
    return FunctionModel(
        "exp", {}, evalExp, evalExp, logEvalExp, nullptr, nullptr, {});
  }
  if (name == "expexp") {
    return FunctionModel("expexp", {}, evalExpExp, derivExpExp, logEvalExpExp,
                         nullptr, nullptr, {});
  }
  if (name == "example1") {
    Complex lambda(1.0, 0.0);
    if (colon != std::string::npos) lambda = parseLambda(selector, colon);
    if (lambda == Complex(0.0, 0.0))
      throw Error(ErrorCode::UnknownModel, "example1 requires lambda != 0");
    double pr = kDefaultPoleRadius;
    return FunctionModel(
        "example1", {{"lambda", lambda}},
        [lambda, pr](Complex z) { return evalExample1(z, lambda, pr); },
        [lambda, pr](Complex z) { return derivExample1(z, lambda, pr); },
        [lambda](double lm, double ph) {
          return logEvalExample1(lm, ph, lambda);
        },
        ex1PolesIn,
        [](Complex z, double poleRadius) { return ex1NearPole(z, poleRadius); },
        {{Complex(0.0, 0.0), Complex(0.0, 0.0)}});
  }
  if (name == "gamma") {
    double pr = kDefaultPoleRadius;
    return FunctionModel(
        "gamma", {},
        [pr](Complex z) { return evalGammaShift(z, 0.0, pr); },
        [pr](Complex z) { return derivGammaShift(z, 0.0, pr); },
        [](double lm, double ph) { return logEvalGamma(lm, ph, 0.0); },
        [](const Rect& r) { return gammaPolesIn(r, 0.0); },
        [](Complex z, double poleRadius) {
          return z.real() < 0.5 && distToNonPositiveInteger(z) <= poleRadius;
        },
        {{Complex(1.0, 0.0), Complex(-0.5772156649015329, 0.0)}});
  }
  if (name == "gamma_shift1") {
    double pr = kDefaultPoleRadius;
    return FunctionModel(
        "gamma_shift1", {},
        [pr](Complex z) { return evalGammaShift(z, 1.0, pr); },
        [pr](Complex z) { return derivGammaShift(z, 1.0, pr); },
        [](double lm, double ph) { return logEvalGamma(lm, ph, 1.0); },
        [](const Rect& r) { return gammaPolesIn(r, 1.0); },
        [](Complex z, double poleRadius) {
          Complex w = z + 1.0;
          return w.real() < 0.5 && distToNonPositiveInteger(w) <= poleRadius;
        },
        {{Complex(1.0, 0.0), Complex(0.4227843350984671, 0.0)}});
  }
  if (name == "gamma_cos") {
    double pr = kDefaultPoleRadius;
    return FunctionModel(
        "gamma_cos", {},
        [pr](Complex z) { return evalGammaCos(z, pr); },
        [pr](Complex z) { return derivGammaCos(z, pr); },
        logEvalGammaCos,
        [](const Rect& r) { return gammaPolesIn(r, 1.0); },
        [](Complex z, double poleRadius) {
          Complex w = z + 1.0;
          return w.real() < 0.5 && distToNonPositiveInteger(w) <= poleRadius;
        },
        {});
  }
  throw Error(ErrorCode::UnknownModel, "unknown model: " + selector);
}

}  // namespace tractlab
