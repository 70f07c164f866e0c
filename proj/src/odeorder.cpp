#include "tractlab/odeorder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tractlab/errors.hpp"

namespace tractlab {

std::string rationalStr(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

std::string GaussianRational::str() const {
  if (im == 0) return rationalStr(re);
  std::ostringstream os;
  os << rationalStr(re) << (im > 0 ? "+" : "") << rationalStr(im) << "i";
  return os.str();
}

Polynomial::Polynomial(GaussianRational constant) {
  coeffs_.push_back(std::move(constant));
  normalize();
}

Polynomial Polynomial::monomialZ(int power, GaussianRational coeff) {
  Polynomial p;
  p.coeffs_.assign(power + 1, GaussianRational{});
  p.coeffs_[power] = std::move(coeff);
  p.normalize();
  return p;
}

void Polynomial::normalize() {
  while (!coeffs_.empty() && coeffs_.back().isZero()) coeffs_.pop_back();
}

GaussianRational Polynomial::leading() const {
  if (coeffs_.empty()) return {};
  return coeffs_.back();
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out;
  out.coeffs_.resize(std::max(coeffs_.size(), o.coeffs_.size()));
  for (std::size_t k = 0; k < out.coeffs_.size(); ++k) {
    if (k < coeffs_.size()) out.coeffs_[k] = out.coeffs_[k] + coeffs_[k];
    if (k < o.coeffs_.size()) out.coeffs_[k] = out.coeffs_[k] + o.coeffs_[k];
  }
  out.normalize();
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out;
  if (isZero() || o.isZero()) return out;
  out.coeffs_.assign(coeffs_.size() + o.coeffs_.size() - 1, GaussianRational{});
  for (std::size_t a = 0; a < coeffs_.size(); ++a)
    for (std::size_t b = 0; b < o.coeffs_.size(); ++b)
      out.coeffs_[a + b] = out.coeffs_[a + b] + coeffs_[a] * o.coeffs_[b];
  out.normalize();
  return out;
}

std::string Polynomial::str() const {
  if (isZero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const GaussianRational& c = coeffs_[k];
    if (c.isZero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    if (k == 1) os << "*z";
    if (k > 1) os << "*z^" << k;
  }
  return os.str();
}

std::string DiffMonomial::tupleStr() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t j = 0; j < t.size(); ++j)
    os << (j ? "," : "") << t[j];
  if (t.empty()) os << "0";
  os << ")";
  return os.str();
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : text(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError,
                msg + " at position " + std::to_string(pos));
  }

  void skipWs() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool atEnd() {
    skipWs();
    return pos >= text.size();
  }

  char peek() {
    skipWs();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skipWs();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  long parseInt() {
    skipWs();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) fail("expected an integer");
    long v = 0;
    for (std::size_t k = start; k < pos; ++k) {
      v = v * 10 + (text[k] - '0');
      if (v > 1000000) fail("integer too large");
    }
    return v;
  }

  int parseExponent() {
    if (!consume('^')) return 1;
    skipWs();
    if (pos < text.size() && text[pos] == '-')
      fail("negative exponents are not part of the grammar");
    long e = parseInt();
    if (e < 1) fail("exponent must be >= 1 (f^0 is excluded)");
    if (e > 64) fail("exponent too large");
    return static_cast<int>(e);
  }

  // One term: product of factors; accumulates the exponent tuple and the
  // z-polynomial coefficient.
  void parseTerm(int sign, std::map<std::vector<int>, Polynomial>& acc) {
    std::vector<int> t;
    Polynomial coeff(GaussianRational{Rational(sign), Rational(0)});
    bool sawFactor = false;
    while (true) {
      skipWs();
      if (pos >= text.size()) break;
      char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        long v = parseInt();
        coeff = coeff * Polynomial(GaussianRational{Rational(v), Rational(0)});
      } else if (c == 'z') {
        ++pos;
        int e = parseExponent();
        coeff = coeff * Polynomial::monomialZ(e, {Rational(1), Rational(0)});
      } else if (c == 'f') {
        ++pos;
        int primes = 0;
        while (pos < text.size() && text[pos] == '\'') {
          ++primes;
          ++pos;
          if (primes > 6) fail("at most 6 primes are supported");
        }
        int e = parseExponent();
        if (t.size() <= static_cast<std::size_t>(primes))
          t.resize(primes + 1, 0);
        t[primes] += e;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      sawFactor = true;
      if (!consume('*')) break;
    }
    if (!sawFactor) fail("empty term");
    while (!t.empty() && t.back() == 0) t.pop_back();
    auto it = acc.find(t);
    if (it == acc.end())
      acc.emplace(std::move(t), std::move(coeff));
    else
      it->second = it->second + coeff;
  }
};

}  // namespace

std::vector<DiffMonomial> parseEquation(const std::string& text) {
  Parser p(text);
  std::map<std::vector<int>, Polynomial> acc;
  bool first = true;
  while (!p.atEnd()) {
    if (p.peek() == '=') break;
    int sign = 1;
    if (p.consume('-'))
      sign = -1;
    else if (p.consume('+'))
      sign = 1;
    else if (!first)
      p.fail("expected '+' or '-' between terms");
    p.parseTerm(sign, acc);
    first = false;
  }
  if (first) p.fail("empty equation");
  if (p.consume('=')) {
    p.skipWs();
    if (!p.consume('0')) p.fail("only '= 0' is supported");
    if (!p.atEnd()) p.fail("trailing input after '= 0'");
  }

  std::vector<DiffMonomial> monomials;
  for (auto& [t, poly] : acc) {
    if (poly.isZero()) continue;
    monomials.push_back(DiffMonomial{t, std::move(poly)});
  }
  if (monomials.empty())
    throw Error(ErrorCode::EmptyEquation, "all terms cancel");
  return monomials;
}

OrderBoundResult orderBound(const std::vector<DiffMonomial>& monomials) {
  if (monomials.empty())
    throw Error(ErrorCode::PreconditionViolated, "no monomials");
  OrderBoundResult res;

  int dmax = 0;
  for (const auto& m : monomials) dmax = std::max(dmax, m.degree());
  for (std::size_t k = 0; k < monomials.size(); ++k)
    if (monomials[k].degree() == dmax) res.S.push_back(k);

  if (res.S.size() < 2) {
    // Theorem hypothesis forces |S| >= 2 for a transcendental meromorphic
    // solution with a direct singularity over infinity; a singleton S rules
    // such solutions out.
    res.verdict = OrderVerdict::SingletonS;
    res.zeroWeightPolicy = "not-applicable";
    return res;
  }

  std::map<int, Polynomial> byWeight;
  for (std::size_t idx : res.S) {
    const DiffMonomial& m = monomials[idx];
    auto it = byWeight.find(m.weight());
    if (it == byWeight.end())
      byWeight.emplace(m.weight(), m.coeff);
    else
      it->second = it->second + m.coeff;
  }

  bool hasZeroWeight = false;
  bool zeroWeightUZero = false;
  for (auto& [lambda, u] : byWeight) {
    WeightGroup g;
    g.lambda = lambda;
    g.u = u;
    g.zero = u.isZero();
    if (!g.zero) {
      g.b = u.leading();
      g.d = u.degree();
    }
    if (lambda == 0) {
      hasZeroWeight = true;
      zeroWeightUZero = g.zero;
    }
    if (lambda > 0) res.Lambda.push_back(lambda);
    if (g.zero) res.failedLambdas.push_back(lambda);
    res.groups.push_back(std::move(g));
  }

  // Lambda holds the positive weights (the paper's Lambda is a subset of the
  // naturals); a vanishing u at weight 0 is reported but does not defeat the
  // bound, since max(Lambda) is unaffected.
  res.zeroWeightPolicy =
      !hasZeroWeight ? "no-zero-weight-member"
                     : (zeroWeightUZero ? "zero-weight-member-u0-zero"
                                        : "zero-weight-member-u0-nonzero");

  bool positiveFailed = false;
  for (int l : res.failedLambdas)
    if (l > 0) positiveFailed = true;

  if (res.Lambda.empty() || positiveFailed) {
    res.verdict = OrderVerdict::HypothesisFails;
    return res;
  }

  res.verdict = OrderVerdict::Bound;
  res.bound = Rational(1, res.Lambda.back());

  std::vector<PuiseuxPair> pairs;
  for (const WeightGroup& g : res.groups)
    if (!g.zero) pairs.push_back(PuiseuxPair{g.lambda, g.b, g.d});
  std::map<int, bool> distinct;
  for (const auto& pr : pairs) distinct[pr.lambda] = true;
  if (distinct.size() >= 2) res.kappaCandidates = newtonPuiseux(pairs);
  return res;
}

std::vector<Rational> newtonPuiseux(const std::vector<PuiseuxPair>& pairs) {
  std::map<int, int> dOf;  // lambda -> d_lambda
  for (const PuiseuxPair& p : pairs) {
    if (p.b.isZero())
      throw Error(ErrorCode::PreconditionViolated,
                  "newtonPuiseux requires nonzero b coefficients");
    if (p.lambda < 0 || p.d < 0)
      throw Error(ErrorCode::PreconditionViolated,
                  "lambda and d must be nonnegative");
    auto it = dOf.find(p.lambda);
    if (it == dOf.end())
      dOf[p.lambda] = p.d;
    else if (it->second != p.d)
      throw Error(ErrorCode::PreconditionViolated,
                  "duplicate lambda with conflicting degree");
  }
  if (dOf.size() < 2)
    throw Error(ErrorCode::InsufficientTerms,
                "need at least two distinct lambda values");

  auto lineAt = [&](int lambda, const Rational& kappa) -> Rational {
    return Rational(lambda) * kappa + Rational(dOf[lambda] - lambda);
  };

  std::vector<Rational> out;
  for (auto a = dOf.begin(); a != dOf.end(); ++a) {
    for (auto b = std::next(a); b != dOf.end(); ++b) {
      // L_a(k) = L_b(k):  k = ((d_b - b) - (d_a - a)) / (a - b)
      Rational num = Rational((b->second - b->first) - (a->second - a->first));
      Rational den = Rational(a->first - b->first);
      Rational kappa = num / den;
      if (kappa <= 0) continue;
      Rational value = lineAt(a->first, kappa);
      bool isMax = true;
      for (const auto& [l, d] : dOf)
        if (lineAt(l, kappa) > value) isMax = false;
      if (!isMax) continue;
      if (std::find(out.begin(), out.end(), kappa) == out.end())
        out.push_back(kappa);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GrowthFitReport verifyAgainstGrowth(const OrderBoundResult& result,
                                    const GrowthProfile& profile) {
  if (result.kappaCandidates.empty())
    throw Error(ErrorCode::NoKappaCandidates,
                "the order-bound result has no kappa candidates");
  double cutoff = profile.rmax() / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const GrowthSample& s : profile.samples()) {
    if (s.r < cutoff || !s.a || *s.a <= 0.0) continue;
    double x = std::log(s.r), y = std::log(*s.a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2)
    throw Error(ErrorCode::PreconditionViolated,
                "profile too short to fit a growth exponent");
  GrowthFitReport rep;
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double bestDiff = std::numeric_limits<double>::infinity();
  for (const Rational& k : result.kappaCandidates) {
    double kd = static_cast<double>(k);
    if (std::abs(kd - rep.slope) < bestDiff) {
      bestDiff = std::abs(kd - rep.slope);
      rep.nearestKappa = k;
    }
  }
  rep.absDiff = bestDiff;
  return rep;
}

std::string canonicalEquation(const std::vector<DiffMonomial>& monomials) {
  std::ostringstream os;
  for (const DiffMonomial& m : monomials)
    os << m.tupleStr() << ":" << m.coeff.str() << ";";
  return os.str();
}

const std::map<std::string, std::string>& solvingModelRegistry() {
  static const std::map<std::string, std::string> registry = [] {
    std::map<std::string, std::string> r;
    r[canonicalEquation(parseEquation("f' - f"))] = "exp";
    return r;
  }();
  return registry;
}

}  // namespace tractlab
