#pragma once

#include <optional>
#include <vector>

#include "tractlab/growth.hpp"

namespace tractlab {

// Numerical check of the disc containment and asymptotic relations around
// the circle maximizer z_r: value relation f(z) ~ (z/z_r)^a f(z_r), modulus
// relation |f(z)| ~ M_D(|z|), and the first-derivative relation.
struct WVReport {
  double r = 0;
  double tau = 0;
  Complex zr;
  double a = 0;
  double discRadius = 0;  // r / a^tau
  bool discInTract = false;
  double relErrValue = 0;
  double relErrModulus = 0;
  double relErrDerivative = 0;
  int samples = 0;
  bool branchTrackingFailed = false;  // log f hit a zero inside the disc
  int modulusSamplesSkipped = 0;      // |z| left the profile range
};

// Samples concentric rings inside D(zr, r/a^tau); log f is branch-tracked
// along rays from zr. Throws ExpansionTooWeak when a(r) <= 1.
WVReport wvVerify(const TractDescriptor& tract, const GrowthProfile& profile,
                  double r, double tau, int samples = 256);

struct CoveringReport {
  double alphaUsed = 0;
  bool covered = false;
  std::vector<Complex> failures;  // unreached targets in log-f coordinates
  Complex logFzr;
};

// Theorem-2.3-style covering check: a damped Newton search for
// log f(z) = w, constrained to D(zr, alpha r / a), over a rectangle of
// targets around log f(zr). With no forcedAlpha the radius factor doubles
// from 1 until the rectangle is covered (cap 64).
CoveringReport coveringCheck(const TractDescriptor& tract,
                             const GrowthProfile& profile, double r,
                             double beta, double gamma,
                             std::optional<double> forcedAlpha = std::nullopt);

struct SweepEntry {
  double r = 0;
  WVReport report;
  bool flagged = false;
};

// wvVerify across the profile radii in [rmin, rmax]; flags candidate
// exceptional radii (disc leaves the tract, branch tracking failed, or
// relErrValue above 5x the sweep's 90th percentile).
std::vector<SweepEntry> exceptionalSweep(const TractDescriptor& tract,
                                         const GrowthProfile& profile,
                                         double rmin, double rmax, double tau,
                                         int samples = 128, int stride = 1);

// Tracks a continuous branch of log f from `from` (value logFrom) to `to`
// along the straight segment, in steps of at most maxStep. Returns nullopt
// when the continuation meets a zero or pole of f.
std::optional<Complex> continueLogBranch(const FunctionModel& model,
                                         Complex from, Complex logFrom,
                                         Complex to, double maxStep);

}  // namespace tractlab
