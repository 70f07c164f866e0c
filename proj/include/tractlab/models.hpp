#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tractlab/value.hpp"

namespace tractlab {

struct FixedPointRef {
  Complex location;
  Complex multiplier;
};

// A named meromorphic function with evaluation, derivative and pole
// knowledge. Immutable after construction; eval is pure, so concurrent use
// is safe.
class FunctionModel {
 public:
  using EvalFn = std::function<ComplexValue(Complex)>;
  // Evaluates f at the point exp(logMod + i*phase), for orbit points past
  // the floating-point range.
  using LogEvalFn = std::function<ComplexValue(double, double)>;
  using PolesFn = std::function<std::vector<Complex>(const Rect&)>;
  using NearPoleFn = std::function<bool(Complex, double)>;

  FunctionModel(std::string id, std::map<std::string, Complex> parameters,
                EvalFn eval, EvalFn analyticDerivative, LogEvalFn logEval,
                PolesFn polesIn, NearPoleFn nearPole,
                std::vector<FixedPointRef> referenceFixedPoints);

  const std::string& id() const { return id_; }
  const std::map<std::string, Complex>& parameters() const {
    return parameters_;
  }

  ComplexValue eval(Complex z) const;

  // Continues evaluation through Overflow inputs via the log-eval hook.
  ComplexValue evalExtended(const ComplexValue& z) const;

  bool hasAnalyticDerivative() const { return bool(analyticDerivative_); }
  bool hasLogEval() const { return bool(logEval_); }

  // Analytic derivative when registered, numeric fallback otherwise.
  ComplexValue derivative(Complex z) const;

  std::vector<Complex> polesIn(const Rect& r) const;
  bool nearPole(Complex z) const;
  double poleRadius() const { return poleRadius_; }

  const std::vector<FixedPointRef>& referenceFixedPoints() const {
    return referenceFixedPoints_;
  }

 private:
  std::string id_;
  std::map<std::string, Complex> parameters_;
  EvalFn eval_;
  EvalFn analyticDerivative_;
  LogEvalFn logEval_;
  PolesFn polesIn_;
  NearPoleFn nearPole_;
  std::vector<FixedPointRef> referenceFixedPoints_;
  double poleRadius_ = kDefaultPoleRadius;
};

// Builds a registered model from a selector string:
//   exp | expexp | gamma | gamma_shift1 | gamma_cos |
//   example1[:lambda=<re>[,<im>]]
// Throws Error{UnknownModel} for anything else.
FunctionModel makeModel(const std::string& selector);

ComplexValue evaluate(const FunctionModel& model, Complex z);

// Central difference with two Richardson extrapolation levels. Throws
// Error{DerivativeUnstable} when successive extrapolants disagree by more
// than 1e-4 relative or the step neighborhood is not pole-free.
ComplexValue numericDerivative(const FunctionModel& model, Complex z);

}  // namespace tractlab
