#include "tractlab/wvcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tractlab/errors.hpp"

namespace tractlab {

namespace {

// |e^delta - 1| from the log-space mismatch delta
double expm1Abs(Complex delta) {
  double re = delta.real();
  double im = wrapAngle(delta.imag());
  if (!std::isfinite(re)) return std::numeric_limits<double>::infinity();
  double er = std::exp(re);
  return std::sqrt(std::max(0.0, er * er - 2.0 * er * std::cos(im) + 1.0));
}

Complex principalLog(const ComplexValue& v) {
  return Complex(v.logAbs(), v.phase());
}

}  // namespace

std::optional<Complex> continueLogBranch(const FunctionModel& model,
                                         Complex from, Complex logFrom,
                                         Complex to, double maxStep) {
  double dist = std::abs(to - from);
  int steps = std::max(1, static_cast<int>(std::ceil(dist / maxStep)));
  Complex cur = logFrom;
  for (int k = 1; k <= steps; ++k) {
    Complex z = from + (to - from) * (static_cast<double>(k) / steps);
    ComplexValue v = model.eval(z);
    if (v.isPole()) return std::nullopt;
    double la = v.logAbs();
    if (!std::isfinite(la)) return std::nullopt;  // zero of f (or deep underflow)
    double jump = wrapAngle(v.phase() - cur.imag());
    if (std::abs(jump) > M_PI / 2.0) return std::nullopt;
    cur = Complex(la, cur.imag() + jump);
  }
  return cur;
}

WVReport wvVerify(const TractDescriptor& tract, const GrowthProfile& profile,
                  double r, double tau, int samples) {
  if (!(tau > 0.5))
    throw Error(ErrorCode::PreconditionViolated, "tau must exceed 1/2");
  double a = aOfR(profile, r);
  if (a <= 1.0)
    throw Error(ErrorCode::ExpansionTooWeak,
                "a(r) <= 1: no expansion at this radius");

  CircleMax cm = maximizeOnCircle(tract, r);
  Complex zr = cm.zr;
  ComplexValue fzr = tract.model().eval(zr);
  Complex logFzr = principalLog(fzr);

  WVReport rep;
  rep.r = r;
  rep.tau = tau;
  rep.zr = zr;
  rep.a = a;
  rep.discRadius = r / std::pow(a, tau);
  rep.discInTract = true;

  int rings = std::clamp(static_cast<int>(std::lround(std::sqrt(samples / 8.0))),
                         2, 12);
  int raysCount = std::max(4, samples / rings);
  raysCount += raysCount % 4 == 0 ? 0 : 4 - raysCount % 4;  // keep axes sampled
  double maxStep = rep.discRadius / 64.0;
  const FunctionModel& model = tract.model();
  const Window& win = tract.window();

  double supValue = 0, supModulus = 0, supDeriv = 0;
  int count = 0;
  for (int m = 0; m < raysCount; ++m) {
    double phi = 2.0 * M_PI * m / raysCount;
    Complex dir = std::polar(1.0, phi);
    Complex prevPoint = zr;
    Complex logAtPrev = logFzr;
    bool rayDead = false;
    for (int k = 1; k <= rings && !rayDead; ++k) {
      Complex z = zr + dir * (rep.discRadius * k / rings);
      auto tracked = continueLogBranch(model, prevPoint, logAtPrev, z, maxStep);
      if (!tracked) {
        rep.branchTrackingFailed = true;
        rayDead = true;
        break;
      }
      prevPoint = z;
      logAtPrev = *tracked;
      ++count;

      bool inTract = win.rect.contains(z) && tract.contains(z);
      if (!inTract) rep.discInTract = false;

      Complex logRatio = std::log(z / zr);  // z/zr near 1: principal branch
      Complex deltaV = *tracked - logFzr - a * logRatio;
      supValue = std::max(supValue, expm1Abs(deltaV));

      double absZ = std::abs(z);
      try {
        double logMD = std::log(tract.threshold()) + profile.interpB(absZ);
        double dm = model.eval(z).logAbs() - logMD;
        supModulus = std::max(supModulus, expm1Abs(Complex(dm, 0.0)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OutOfRange) throw;
        ++rep.modulusSamplesSkipped;
      }

      ComplexValue fd = model.derivative(z);
      if (!fd.isPole() && std::isfinite(fd.logAbs())) {
        // target: log a - log z + a log(z/zr) + log f(zr)
        Complex target = std::log(a) - std::log(z) + a * logRatio + logFzr;
        Complex deltaD(fd.logAbs() - target.real(),
                       wrapAngle(fd.phase() - target.imag()));
        supDeriv = std::max(supDeriv, expm1Abs(deltaD));
      }
    }
  }
  rep.relErrValue = supValue;
  rep.relErrModulus = supModulus;
  rep.relErrDerivative = supDeriv;
  rep.samples = count;
  return rep;
}

CoveringReport coveringCheck(const TractDescriptor& tract,
                             const GrowthProfile& profile, double r,
                             double beta, double gamma,
                             std::optional<double> forcedAlpha) {
  if (!(beta > 1.0))
    throw Error(ErrorCode::PreconditionViolated, "beta must exceed 1");
  if (!(gamma > M_PI))
    throw Error(ErrorCode::PreconditionViolated, "gamma must exceed pi");
  double a = aOfR(profile, r);
  if (a <= 1.0)
    throw Error(ErrorCode::ExpansionTooWeak, "a(r) <= 1");
  CircleMax cm = maximizeOnCircle(tract, r);
  Complex zr = cm.zr;
  const FunctionModel& model = tract.model();
  Complex logFzr = principalLog(model.eval(zr));

  // target grid over the rectangle |Re w - log|f(zr)|| <= log beta,
  // |Im w - arg f(zr)| <= gamma, corners included
  std::vector<Complex> targets;
  const int nRe = 7, nIm = 7;
  for (int ii = 0; ii < nRe; ++ii)
    for (int jj = 0; jj < nIm; ++jj) {
      double dRe = -std::log(beta) + 2.0 * std::log(beta) * ii / (nRe - 1);
      double dIm = -gamma + 2.0 * gamma * jj / (nIm - 1);
      targets.push_back(logFzr + Complex(dRe, dIm));
    }

  auto reachTarget = [&](Complex w, double discR) -> bool {
    Complex z = zr;
    Complex logF = logFzr;
    double maxStep = std::max(discR / 64.0, 1e-12);
    for (int it = 0; it < 120; ++it) {
      Complex resid = logF - w;
      if (std::abs(resid) < 1e-8) return true;
      ComplexValue fv = model.eval(z);
      ComplexValue fd = model.derivative(z);
      if (fv.isPole() || fd.isPole() || !std::isfinite(fv.logAbs()) ||
          !std::isfinite(fd.logAbs()))
        return false;
      // d(log f)/dz = f'/f, assembled from log data to dodge overflow
      double lm = fd.logAbs() - fv.logAbs();
      if (lm > kOverflowLogThreshold) return false;
      Complex dlog = std::polar(std::exp(lm), fd.phase() - fv.phase());
      if (std::abs(dlog) < 1e-300) return false;
      Complex step = -resid / dlog;
      // damp: stay inside the search disc and keep the branch trackable
      for (int halvings = 0; halvings < 40; ++halvings) {
        Complex zNext = z + step;
        if (std::abs(zNext - zr) <= discR) {
          auto tracked = continueLogBranch(model, z, logF, zNext, maxStep);
          if (tracked) {
            // accept only non-worsening steps once damped
            if (halvings == 0 || std::abs(*tracked - w) < std::abs(resid)) {
              z = zNext;
              logF = *tracked;
              break;
            }
          }
        }
        step *= 0.5;
        if (halvings == 39) return false;
      }
    }
    return false;
  };

  CoveringReport rep;
  rep.logFzr = logFzr;
  std::vector<double> alphas;
  if (forcedAlpha) {
    alphas.push_back(*forcedAlpha);
  } else {
    for (double alpha = 1.0; alpha <= 64.0; alpha *= 2.0)
      alphas.push_back(alpha);
  }
  for (double alpha : alphas) {
    double discR = alpha * r / a;
    std::vector<Complex> failures;
    for (Complex w : targets)
      if (!reachTarget(w, discR)) failures.push_back(w);
    rep.alphaUsed = alpha;
    rep.failures = failures;
    if (failures.empty()) {
      rep.covered = true;
      return rep;
    }
  }
  rep.covered = false;
  return rep;
}

std::vector<SweepEntry> exceptionalSweep(const TractDescriptor& tract,
                                         const GrowthProfile& profile,
                                         double rmin, double rmax, double tau,
                                         int samples, int stride) {
  std::vector<SweepEntry> entries;
  if (!(rmin <= rmax)) return entries;
  stride = std::max(1, stride);
  const auto& ss = profile.samples();
  for (std::size_t i = 0; i < ss.size(); i += stride) {
    double r = ss[i].r;
    if (r <= rmin || r >= rmax) continue;  // aOfR needs strict interior
    try {
      SweepEntry e;
      e.r = r;
      e.report = wvVerify(tract, profile, r, tau, samples);
      entries.push_back(std::move(e));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ExpansionTooWeak) throw;
    }
  }
  if (entries.empty()) return entries;

  std::vector<double> errs;
  for (const auto& e : entries) errs.push_back(e.report.relErrValue);
  std::sort(errs.begin(), errs.end());
  std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.9 * errs.size()));
  if (rank > 0) --rank;
  double p90 = errs[rank];

  for (auto& e : entries) {
    e.flagged = !e.report.discInTract || e.report.branchTrackingFailed ||
                (p90 > 0.0 && e.report.relErrValue > 5.0 * p90);
  }
  return entries;
}

}  // namespace tractlab
