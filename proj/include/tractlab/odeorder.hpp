#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <vector>

#include "tractlab/growth.hpp"

namespace tractlab {

using Rational = boost::multiprecision::cpp_rational;

// Gaussian rational a + b i; all arithmetic in this module is exact, so
// repeated runs are bit-identical.
struct GaussianRational {
  Rational re = 0;
  Rational im = 0;

  bool isZero() const { return re == 0 && im == 0; }
  GaussianRational operator+(const GaussianRational& o) const {
    return {re + o.re, im + o.im};
  }
  GaussianRational operator-(const GaussianRational& o) const {
    return {re - o.re, im - o.im};
  }
  GaussianRational operator*(const GaussianRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussianRational operator-() const { return {-re, -im}; }
  bool operator==(const GaussianRational& o) const {
    return re == o.re && im == o.im;
  }
  std::string str() const;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(GaussianRational constant);
  static Polynomial monomialZ(int power, GaussianRational coeff);

  bool isZero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  GaussianRational leading() const;
  const std::vector<GaussianRational>& coeffs() const { return coeffs_; }

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  bool operator==(const Polynomial& o) const { return coeffs_ == o.coeffs_; }
  std::string str() const;

 private:
  void normalize();
  std::vector<GaussianRational> coeffs_;  // ascending powers of z
};

// One differential monomial c(z) * f^{t0} (f')^{t1} ... (f^(n))^{tn}.
// Degree and weight are recomputed from t, never stored.
struct DiffMonomial {
  std::vector<int> t;  // trailing zeros trimmed; empty = the constant 1
  Polynomial coeff;

  int degree() const {
    int d = 0;
    for (int v : t) d += v;
    return d;
  }
  int weight() const {
    int w = 0;
    for (std::size_t j = 0; j < t.size(); ++j)
      w += static_cast<int>(j) * t[j];
    return w;
  }
  std::string tupleStr() const;
};

// Parses a sum of terms `[+|-][poly(z)*] f['...]^k` with integer
// coefficients and exponents, primes up to 6, like "f'' - z*f" or
// "f'^2 - 4*f^3 - 1". Like terms merge; zero terms drop. Throws
// Error{ParseError} (with position) or Error{EmptyEquation}.
std::vector<DiffMonomial> parseEquation(const std::string& text);

struct WeightGroup {
  int lambda = 0;
  Polynomial u;          // sum of coefficients of S-members at this weight
  bool zero = true;
  GaussianRational b;    // leading coefficient of u, when nonzero
  int d = 0;             // degree of u, when nonzero
};

enum class OrderVerdict { Bound, SingletonS, HypothesisFails };

struct OrderBoundResult {
  std::vector<std::size_t> S;   // indices of maximal-degree monomials
  std::vector<int> Lambda;      // positive weights of S-members, ascending
  std::vector<WeightGroup> groups;  // all weights of S-members, incl. 0
  OrderVerdict verdict = OrderVerdict::HypothesisFails;
  Rational bound = 0;           // 1/max(Lambda), valid for Bound verdicts
  std::vector<Rational> kappaCandidates;
  std::vector<int> failedLambdas;  // weights whose u vanished
  std::string zeroWeightPolicy;
};

OrderBoundResult orderBound(const std::vector<DiffMonomial>& monomials);

struct PuiseuxPair {
  int lambda = 0;
  GaussianRational b;  // must be nonzero
  int d = 0;
};

// Breakpoints of the upper envelope of L_lambda(kappa) = lambda*kappa +
// (d_lambda - lambda) attained by at least two distinct lambda, for kappa >
// 0, exact and ascending. Throws Error{InsufficientTerms} below two distinct
// lambda values.
std::vector<Rational> newtonPuiseux(const std::vector<PuiseuxPair>& pairs);

struct GrowthFitReport {
  double slope = 0;       // least-squares slope of log a vs log r, top decade
  Rational nearestKappa;
  double absDiff = 0;
};

// Compares the profile's growth exponent against the kappa candidates.
// Throws Error{NoKappaCandidates} when the result has none.
GrowthFitReport verifyAgainstGrowth(const OrderBoundResult& result,
                                    const GrowthProfile& profile);

// Canonical text form of a parsed equation, used to key the registry of
// equations with a registered solving model.
std::string canonicalEquation(const std::vector<DiffMonomial>& monomials);

// canonical equation -> model selector (e.g. f' - f = 0 is solved by exp)
const std::map<std::string, std::string>& solvingModelRegistry();

std::string rationalStr(const Rational& q);

}  // namespace tractlab
