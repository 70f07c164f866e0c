#include "tractlab/growth.hpp"

#include <algorithm>
#include <cmath>

#include "tractlab/errors.hpp"

namespace tractlab {

namespace {

// exp(kTowerTop) is still representable; towers above it are genuine.
constexpr double kTowerTop = 709.78;

// in-tract value of v = log(|f|/R) at r e^{i theta}, -inf when outside
double tractValueAt(const TractDescriptor& tract, double r, double theta) {
  Complex z = std::polar(r, theta);
  if (!tract.window().rect.contains(z))
    return -std::numeric_limits<double>::infinity();
  auto pix = tract.window().pixelOf(z);
  if (tract.raster().labelAt(pix->first, pix->second) != 1)
    return -std::numeric_limits<double>::infinity();
  double v = tract.model().eval(z).logAbs() - tract.logThreshold();
  return v > 0.0 ? v : -std::numeric_limits<double>::infinity();
}

// Largest radius whose full circle fits in the window.
double windowInradius(const Window& win) {
  return std::min(std::min(-win.rect.reMin, win.rect.reMax),
                  std::min(-win.rect.imMin, win.rect.imMax));
}

}  // namespace

CircleMax maximizeOnCircle(const TractDescriptor& tract, double r,
                           int coarseSamples) {
  if (r <= 0.0)
    throw Error(ErrorCode::PreconditionViolated, "radius must be positive");
  int n = std::max(coarseSamples, 64);
  double best = -std::numeric_limits<double>::infinity();
  double bestTheta = 0.0;
  for (int k = 0; k < n; ++k) {
    double theta = 2.0 * M_PI * k / n;
    double v = tractValueAt(tract, r, theta);
    if (v > best) {
      best = v;
      bestTheta = theta;
    }
  }
  if (!std::isfinite(best))
    throw Error(ErrorCode::CircleMissesTract,
                "circle |z| = " + std::to_string(r) + " misses the tract");

  // iterated grid refinement: robust to local oscillation, deterministic
  double lo = bestTheta - 2.0 * M_PI / n;
  double hi = bestTheta + 2.0 * M_PI / n;
  const int kGrid = 64;
  while (hi - lo > 1e-10) {
    double step = (hi - lo) / kGrid;
    double roundBest = -std::numeric_limits<double>::infinity();
    double roundTheta = 0.5 * (lo + hi);
    for (int k = 0; k <= kGrid; ++k) {
      double theta = lo + k * step;
      double v = tractValueAt(tract, r, theta);
      if (v > roundBest) {
        roundBest = v;
        roundTheta = theta;
      }
    }
    if (!std::isfinite(roundBest)) break;
    if (roundBest > best) {
      best = roundBest;
      bestTheta = roundTheta;
    }
    lo = roundTheta - step;
    hi = roundTheta + step;
  }
  return CircleMax{best, std::polar(r, bestTheta)};
}

GrowthProfile::GrowthProfile(std::shared_ptr<const TractDescriptor> tract,
                             double logStep, std::vector<GrowthSample> samples)
    : tract_(std::move(tract)),
      logStep_(logStep),
      samples_(std::move(samples)) {}

double GrowthProfile::interpB(double r) const {
  if (samples_.empty())
    throw Error(ErrorCode::OutOfRange, "empty profile");
  double x = std::log(r);
  double x0 = std::log(samples_.front().r);
  double xn = std::log(samples_.back().r);
  const double eps = 1e-12;
  if (x < x0 - eps || x > xn + eps)
    throw Error(ErrorCode::OutOfRange, "radius outside profile range");
  if (samples_.size() == 1) return samples_.front().B;
  auto it = std::lower_bound(
      samples_.begin(), samples_.end(), r,
      [](const GrowthSample& s, double rr) { return s.r < rr; });
  if (it == samples_.begin()) return samples_.front().B;
  if (it == samples_.end()) return samples_.back().B;
  std::size_t hi = static_cast<std::size_t>(it - samples_.begin());
  std::size_t lo = hi - 1;
  // quadratic through three neighbors: the linear chord's convexity bias
  // otherwise leaks into the modulus checks
  std::size_t a = lo > 0 ? lo - 1 : lo;
  std::size_t c = a + 2 < samples_.size() ? a + 2 : samples_.size() - 1;
  if (c - a == 2) {
    double xa = std::log(samples_[a].r);
    double xb = std::log(samples_[a + 1].r);
    double xc = std::log(samples_[c].r);
    double la = (x - xb) * (x - xc) / ((xa - xb) * (xa - xc));
    double lb = (x - xa) * (x - xc) / ((xb - xa) * (xb - xc));
    double lc = (x - xa) * (x - xb) / ((xc - xa) * (xc - xb));
    return la * samples_[a].B + lb * samples_[a + 1].B + lc * samples_[c].B;
  }
  double t = (x - std::log(samples_[lo].r)) /
             (std::log(samples_[hi].r) - std::log(samples_[lo].r));
  return samples_[lo].B + t * (samples_[hi].B - samples_[lo].B);
}

double GrowthProfile::fittedKappaTopDecade() const {
  double cutoff = rmax() / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const GrowthSample& s : samples_) {
    if (s.r < cutoff || s.B <= 0.0) continue;
    double x = std::log(s.r), y = std::log(s.B);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) {
    double denom = n * sxx - sx * sx;
    if (denom > 1e-18) return (n * sxy - sx * sy) / denom;
  }
  if (samples_.size() >= 2) {
    const GrowthSample& a = samples_[samples_.size() - 2];
    const GrowthSample& b = samples_.back();
    if (a.B > 0 && b.B > 0 && b.r > a.r)
      return (std::log(b.B) - std::log(a.B)) / (std::log(b.r) - std::log(a.r));
  }
  return 1.0;
}

GrowthProfile buildProfile(std::shared_ptr<const TractDescriptor> tract,
                           double rmin, double rmax, double logStep,
                           int coarseSamples) {
  if (!(rmin > 0.0) || rmax < rmin || logStep <= 0.0)
    throw Error(ErrorCode::PreconditionViolated, "bad radius range");
  // uniform grid in log r (plain second differences then read convexity)
  std::vector<double> radii;
  double span = std::log(rmax / rmin);
  int cells = span > 0.0
                  ? std::max(1, static_cast<int>(std::ceil(span / logStep -
                                                           1e-9)))
                  : 0;
  for (int k = 0; k <= cells; ++k)
    radii.push_back(rmin * std::exp(span * k / std::max(cells, 1)));
  radii.back() = rmax;
  if (cells > 0) logStep = span / cells;

  std::vector<GrowthSample> samples;
  for (double r : radii) {
    try {
      CircleMax cm = maximizeOnCircle(*tract, r, coarseSamples);
      samples.push_back(GrowthSample{r, cm.B, cm.zr, std::nullopt, false});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CircleMissesTract) throw;
    }
  }
  if (samples.empty())
    throw Error(ErrorCode::CircleMissesTract,
                "no sampled circle intersects the tract");

  // derivative of the quadratic through three neighbors; second order even
  // at the endpoints and under the uneven final spacing
  auto lagrangeDeriv3 = [&](std::size_t a, std::size_t b, std::size_t c,
                            double x) {
    double xa = std::log(samples[a].r);
    double xb = std::log(samples[b].r);
    double xc = std::log(samples[c].r);
    return samples[a].B * (2 * x - xb - xc) / ((xa - xb) * (xa - xc)) +
           samples[b].B * (2 * x - xa - xc) / ((xb - xa) * (xb - xc)) +
           samples[c].B * (2 * x - xa - xb) / ((xc - xa) * (xc - xb));
  };
  std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (n < 2) continue;  // single sample: a stays unset
    double x = std::log(samples[i].r);
    double value;
    if (n == 2) {
      value = (samples[1].B - samples[0].B) /
              (std::log(samples[1].r) - std::log(samples[0].r));
    } else if (i == 0) {
      value = lagrangeDeriv3(0, 1, 2, x);
    } else if (i + 1 == n) {
      value = lagrangeDeriv3(n - 3, n - 2, n - 1, x);
    } else {
      value = lagrangeDeriv3(i - 1, i, i + 1, x);
    }
    samples[i].a = std::max(0.0, value);
  }
  return GrowthProfile(std::move(tract), logStep, std::move(samples));
}

double aOfR(const GrowthProfile& profile, double r) {
  const auto& samples = profile.samples();
  if (samples.size() < 2)
    throw Error(ErrorCode::OutOfRange, "profile needs at least two samples");
  double x = std::log(r);
  double x0 = std::log(profile.rmin());
  double xn = std::log(profile.rmax());
  if (!(x > x0 && x < xn))
    throw Error(ErrorCode::OutOfRange,
                "r must be strictly inside the profile range");
  double h = std::min({profile.logStep(), x - x0, xn - x});
  if (h <= 0.0) throw Error(ErrorCode::OutOfRange, "degenerate step");
  double bPlus = profile.interpB(std::exp(x + h));
  double bMinus = profile.interpB(std::exp(x - h));
  return std::max(0.0, (bPlus - bMinus) / (2.0 * h));
}

double LogTower::logValue() const {
  if (height == 0) return top > 0 ? std::log(top) : -1e308;
  LogTower lowered{height - 1, top};
  if (lowered.height == 0) return lowered.top;
  // log of exp^h(top) = exp^(h-1)(top); unwind while representable
  double v = top;
  for (int k = 0; k < lowered.height; ++k) {
    if (v > kTowerTop) return 1e308;
    v = std::exp(v);
  }
  return v;
}

namespace {

// Minimal-height form: height 0, or top > kTowerTop at every level. After
// this, (height, top) compares lexicographically.
LogTower canonical(LogTower t) {
  while (t.height > 0 && t.top <= kTowerTop) {
    t.top = std::exp(t.top);
    --t.height;
  }
  if (t.height > kTowerCap) t.height = kTowerCap;
  return t;
}

LogTower fromLogValue(double logM) {
  if (logM <= kTowerTop) return LogTower{0, std::exp(logM)};
  return canonical(LogTower{1, logM});
}

}  // namespace

int compareTower(LogTower a, LogTower b) {
  a = canonical(a);
  b = canonical(b);
  if (a.height != b.height) return a.height < b.height ? -1 : 1;
  if (a.top < b.top) return -1;
  if (a.top > b.top) return 1;
  return 0;
}

LogTower towerFromValue(const ComplexValue& v) {
  if (v.isPole()) return LogTower{kTowerCap, 1e308};
  if (v.isFinite()) return LogTower{0, std::abs(v.value())};
  return canonical(LogTower{1, v.logAbs()});
}

std::vector<LogTower> iterateMD(const TractDescriptor& tract, double rho,
                                int n, int coarseSamples) {
  if (n < 0)
    throw Error(ErrorCode::PreconditionViolated, "n must be >= 0");
  const double logR = tract.logThreshold();
  double rEval = windowInradius(tract.window());

  // extension B_hat(r) = B(r2) (r/r2)^kappa from two in-window circles
  double kappa = 1.0, logC = 0.0, logR2 = 0.0;
  bool extReady = false;
  auto ensureExtension = [&]() {
    if (extReady) return;
    double r2 = 0.95 * rEval;
    double r1 = 0.5 * rEval;
    CircleMax m2 = maximizeOnCircle(tract, r2, coarseSamples);
    CircleMax m1 = maximizeOnCircle(tract, r1, coarseSamples);
    if (m1.B > 0 && m2.B > 0) {
      kappa = (std::log(m2.B) - std::log(m1.B)) / (std::log(r2) - std::log(r1));
      kappa = std::max(kappa, 1e-6);
    }
    logC = std::log(std::max(m2.B, 1e-300));
    logR2 = std::log(r2);
    extReady = true;
  };
  // log of B_hat at radius exp(x)
  auto logBhatAtLogR = [&](double x) {
    ensureExtension();
    return logC + kappa * (x - logR2);
  };

  auto stepTower = [&](LogTower t) -> LogTower {
    t = canonical(t);
    if (t.height == 0) {
      double r = t.top;
      if (r <= rEval) {
        CircleMax m = maximizeOnCircle(tract, r, coarseSamples);
        return fromLogValue(logR + m.B);
      }
      double lb = logBhatAtLogR(std::log(r));
      if (lb <= kTowerTop) return fromLogValue(logR + std::exp(lb));
      return canonical(LogTower{2, lb});
    }
    if (t.height == 1) {
      double lb = logBhatAtLogR(t.top);
      if (lb <= kTowerTop) return fromLogValue(logR + std::exp(lb));
      return canonical(LogTower{2, lb});
    }
    // deeper towers: one application of M_D adds one exponential; the
    // lower-order corrections are invisible at this depth
    if (t.height >= kTowerCap) return t;
    return LogTower{t.height + 1, t.top};
  };

  std::vector<LogTower> out;
  LogTower cur{0, rho};
  for (int k = 0; k < std::max(n, 1); ++k) {
    cur = stepTower(cur);
    if (k == 0) {
      if (compareTower(cur, LogTower{0, rho}) <= 0)
        throw Error(ErrorCode::NotExpanding, "M_D(rho) <= rho");
    }
    out.push_back(cur);
    if (static_cast<int>(out.size()) >= n) break;
  }
  if (n == 0) out.clear();
  return out;
}

std::vector<double> scanExceptional(GrowthProfile& profile, double alpha,
                                    double beta) {
  if (!(alpha > 0.0 && alpha < beta))
    throw Error(ErrorCode::PreconditionViolated, "need 0 < alpha < beta");
  auto& samples = profile.samples();
  if (samples.size() < 3)
    throw Error(ErrorCode::PreconditionViolated,
                "profile needs at least 3 samples");

  std::vector<double> xs(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    xs[i] = std::log(samples[i].r);
  auto interpT = [&](double x) -> double {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return samples.front().a.value_or(0.0);
    if (it == xs.end()) return samples.back().a.value_or(0.0);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    std::size_t lo = hi - 1;
    double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return samples[lo].a.value_or(0.0) +
           t * (samples[hi].a.value_or(0.0) - samples[lo].a.value_or(0.0));
  };

  std::vector<double> flagged;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].a || *samples[i].a <= 0.0) continue;
    double T = *samples[i].a;
    double delta = std::pow(T, -beta);
    double bump = std::pow(T, -alpha);
    bool bad = false;
    double xPlus = xs[i] + delta;
    if (xPlus <= xs.back()) {
      if (!(interpT(xPlus) < (1.0 + bump) * T)) bad = true;
    }
    double xMinus = xs[i] - delta;
    if (!bad && xMinus >= xs.front()) {
      if (!(interpT(xMinus) > (1.0 - bump) * T)) bad = true;
    }
    samples[i].exceptional = bad;
    if (bad) flagged.push_back(samples[i].r);
  }
  return flagged;
}

ABoundReport checkABound(const GrowthProfile& profile, double epsilon) {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::PreconditionViolated, "epsilon must be > 0");
  ABoundReport rep;
  std::size_t total = 0, ok = 0;
  for (const GrowthSample& s : profile.samples()) {
    if (!s.a) continue;
    ++total;
    if (s.B > 0.0 && *s.a <= std::pow(s.B, 1.0 + epsilon))
      ++ok;
    else
      rep.violatingRadii.push_back(s.r);
  }
  rep.fraction = total == 0 ? 1.0 : static_cast<double>(ok) / total;
  return rep;
}

SqrtGrowthReport checkSqrtGrowth(const GrowthProfile& profile) {
  if (profile.rmax() * (1.0 + 1e-12) < 10.0 * profile.rmin())
    throw Error(ErrorCode::PreconditionViolated,
                "profile must span at least one decade");
  SqrtGrowthReport rep;
  double c = std::numeric_limits<double>::infinity();
  for (const GrowthSample& s : profile.samples()) {
    if (s.r < 10.0) continue;
    c = std::min(c, s.B / std::sqrt(s.r));
  }
  if (!std::isfinite(c)) {
    for (const GrowthSample& s : profile.samples())
      c = std::min(c, s.B / std::sqrt(s.r));
  }
  rep.c = c;
  double rTop = profile.rmax();
  double lhs = c * std::sqrt(rTop);
  double rhs = std::pow(std::log(2.0 * rTop), 2.0);
  rep.holds = c > 0.0 && lhs >= rhs;
  return rep;
}

}  // namespace tractlab
