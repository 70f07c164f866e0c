#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "tractlab/tract.hpp"

namespace tractlab {

// One sampled radius: B = log(M_D(r)/R) at the in-tract circle maximizer zr,
// a = dB/dlog r by centered difference, exceptional set by the
// Borel-Nevanlinna scan.
struct GrowthSample {
  double r = 0;
  double B = 0;
  Complex zr;
  std::optional<double> a;
  bool exceptional = false;
};

struct CircleMax {
  double B;
  Complex zr;
};

// Coarse angular scan restricted to in-tract arcs, followed by iterated grid
// refinement of log|f| down to angular spacing 1e-10. Ties resolve to the
// smallest nonnegative argument. Throws CircleMissesTract.
CircleMax maximizeOnCircle(const TractDescriptor& tract, double r,
                           int coarseSamples = 512);

class GrowthProfile {
 public:
  GrowthProfile(std::shared_ptr<const TractDescriptor> tract, double logStep,
                std::vector<GrowthSample> samples);

  const TractDescriptor& tract() const { return *tract_; }
  std::shared_ptr<const TractDescriptor> tractPtr() const { return tract_; }
  double threshold() const { return tract_->threshold(); }
  double logStep() const { return logStep_; }
  const std::vector<GrowthSample>& samples() const { return samples_; }
  std::vector<GrowthSample>& samples() { return samples_; }
  double rmin() const { return samples_.front().r; }
  double rmax() const { return samples_.back().r; }

  // Linear interpolation of B in log r; throws OutOfRange.
  double interpB(double r) const;

  // Slope of log B against log r over the top decade of samples, used to
  // extend B past the sampled range.
  double fittedKappaTopDecade() const;

 private:
  std::shared_ptr<const TractDescriptor> tract_;
  double logStep_;
  std::vector<GrowthSample> samples_;
};

// Log-spaced radii from rmin to rmax (single sample when equal). Radii whose
// circle misses the tract are skipped; throws CircleMissesTract if none
// remain.
GrowthProfile buildProfile(std::shared_ptr<const TractDescriptor> tract,
                           double rmin, double rmax, double logStep = 0.02,
                           int coarseSamples = 512);

// Centered difference of B in log r with step = profile logStep (shrunk
// near the ends), clamped at 0. Pre: r strictly inside the radius range.
double aOfR(const GrowthProfile& profile, double r);

// Value exp applied `height` times to `top`. Iteration of M_D proceeds in
// plain radius space while the circle is evaluable, then through the
// profile-free power-law extension of B, growing the tower as values leave
// the representable range. Heights cap at 8: beyond that only the height
// matters at desk scale.
struct LogTower {
  int height = 0;
  double top = 0;

  // log of the value: exp^(height-1)(top) when height >= 1, log(top) else.
  double logValue() const;
};

inline constexpr int kTowerCap = 8;

// -1 / 0 / +1 comparison of tower values.
int compareTower(LogTower a, LogTower b);

LogTower towerFromValue(const ComplexValue& v);

// M_D^1(rho) .. M_D^n(rho). Throws NotExpanding when M_D(rho) <= rho.
std::vector<LogTower> iterateMD(const TractDescriptor& tract, double rho,
                                int n, int coarseSamples = 512);

// Borel-Nevanlinna exceptional-radius scan with T = a and x = log r; flags
// every sampled radius where either inequality fails and records the flags
// in the profile. Returns the flagged radii.
std::vector<double> scanExceptional(GrowthProfile& profile, double alpha,
                                    double beta);

struct ABoundReport {
  double fraction = 1.0;
  std::vector<double> violatingRadii;
};

// Fraction of samples with a <= B^(1+epsilon).
ABoundReport checkABound(const GrowthProfile& profile, double epsilon);

struct SqrtGrowthReport {
  double c = 0;
  bool holds = false;
};

// c = min B(r)/sqrt(r) over samples beyond the first decade (r >= 10);
// holds when c > 0 and c*sqrt(r) >= (log 2r)^2 at the largest sampled r.
SqrtGrowthReport checkSqrtGrowth(const GrowthProfile& profile);

}  // namespace tractlab
