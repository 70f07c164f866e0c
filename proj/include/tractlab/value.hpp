#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace tractlab {

using Complex = std::complex<double>;

// log|f| beyond this is stored in log form instead of as a double value.
inline constexpr double kOverflowLogThreshold = 700.0;
inline constexpr double kDefaultPoleRadius = 1e-9;

inline double wrapAngle(double phi) {
  phi = std::fmod(phi, 2.0 * M_PI);
  if (phi > M_PI) phi -= 2.0 * M_PI;
  if (phi <= -M_PI) phi += 2.0 * M_PI;
  return phi;
}

// A function value that stays meaningful past the floating-point range.
// Finite carries the value itself; Overflow is a log-polar carrier for
// moduli outside the representable range in either direction (log|f| and
// arg f), so the growth functionals keep working; PoleHit marks evaluation
// inside the pole radius of a declared pole.
class ComplexValue {
 public:
  enum class Kind { Finite, PoleHit, Overflow };

  static ComplexValue finite(Complex v) {
    ComplexValue r;
    r.kind_ = Kind::Finite;
    r.value_ = v;
    return r;
  }

  static ComplexValue overflow(double logModulus, double phase) {
    ComplexValue r;
    r.kind_ = Kind::Overflow;
    r.logMod_ = logModulus;
    r.phase_ = wrapAngle(phase);
    return r;
  }

  static ComplexValue pole() {
    ComplexValue r;
    r.kind_ = Kind::PoleHit;
    return r;
  }

  // Builds Finite or the log-polar carrier from log-polar data, whichever
  // fits; moduli below exp(-700) stay in log form so deep underflow does
  // not collapse to a literal zero.
  static ComplexValue fromLogPolar(double logModulus, double phase) {
    if (std::abs(logModulus) > kOverflowLogThreshold ||
        !std::isfinite(logModulus))
      return overflow(logModulus, phase);
    return finite(std::polar(std::exp(logModulus), phase));
  }

  Kind kind() const { return kind_; }
  bool isFinite() const { return kind_ == Kind::Finite; }
  bool isPole() const { return kind_ == Kind::PoleHit; }
  bool isOverflow() const { return kind_ == Kind::Overflow; }

  // Only valid for Finite.
  Complex value() const { return value_; }

  // log|f|: computed for Finite, stored for Overflow, +inf for PoleHit.
  double logAbs() const {
    switch (kind_) {
      case Kind::Finite: {
        double a = std::abs(value_);
        return a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
      }
      case Kind::Overflow: return logMod_;
      case Kind::PoleHit: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

  // arg f in (-pi, pi]; 0 for PoleHit (unused there).
  double phase() const {
    switch (kind_) {
      case Kind::Finite: return std::arg(value_);
      case Kind::Overflow: return phase_;
      case Kind::PoleHit: return 0.0;
    }
    return 0.0;
  }

 private:
  Kind kind_ = Kind::PoleHit;
  Complex value_{0.0, 0.0};
  double logMod_ = 0.0;
  double phase_ = 0.0;
};

// Rectangle in the plane, without raster resolution; rasterized windows live
// in raster.hpp.
struct Rect {
  double reMin = 0, reMax = 0, imMin = 0, imMax = 0;

  bool contains(Complex z) const {
    return z.real() >= reMin && z.real() <= reMax && z.imag() >= imMin &&
           z.imag() <= imMax;
  }
};

}  // namespace tractlab
