#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tractlab/models.hpp"
#include "tractlab/raster.hpp"

namespace tractlab {

enum class Directness { DirectCandidate, ContainsPole, Unknown };

// One connected component of {|f| > R} on a rasterized window. Everything
// here is window-relative: membership outside the window is extrapolated
// through the far-field angular sectors where the component leaves the
// window, and the directness verdict only consults poles located inside the
// window.
class TractDescriptor {
 public:
  TractDescriptor(FunctionModel model, double R, Complex seed,
                  RegionRaster raster, Directness direct,
                  bool complementBounded, bool logarithmicHeuristic,
                  std::vector<std::pair<double, double>> farFieldSectors);

  const FunctionModel& model() const { return model_; }
  const std::string& modelId() const { return model_.id(); }
  double threshold() const { return R_; }
  double logThreshold() const { return logR_; }
  Complex seed() const { return seed_; }
  const RegionRaster& raster() const { return raster_; }
  const Window& window() const { return raster_.window; }
  Directness direct() const { return direct_; }
  bool complementBounded() const { return complementBounded_; }
  bool logarithmicHeuristic() const { return logarithmicHeuristic_; }
  const std::vector<std::pair<double, double>>& farFieldSectors() const {
    return farFieldSectors_;
  }

  // Raster label + re-evaluation of |f| > R at z; throws OutsideWindow.
  bool contains(Complex z) const;

  // Membership for orbit points that may be outside the window or past the
  // floating-point range: inside the window this is contains(); outside it
  // requires arg z in a far-field sector (and |f(z)| > R when evaluable).
  bool containsExtrapolated(const ComplexValue& z) const;

  bool sectorContains(double angle) const;

  // Pixel fraction of the window covered by the component.
  double areaFraction() const;

 private:
  FunctionModel model_;
  double R_;
  double logR_;
  Complex seed_;
  RegionRaster raster_;
  Directness direct_;
  bool complementBounded_;
  bool logarithmicHeuristic_;
  std::vector<std::pair<double, double>> farFieldSectors_;
};

// Labels the super-threshold set {|f| > R} on the window. PoleHit and
// Overflow pixels count as super-threshold (the preimage of a neighborhood
// of infinity contains the poles); the directness verdict separates them
// later. Throws WindowTooCoarse below 8x8.
RegionRaster levelRegion(const FunctionModel& model, double R,
                         const Window& window, int workers = 0);

// Restricts to the seed's component and computes the verdicts.
// Throws SeedBelowThreshold when |f(seed)| <= R.
TractDescriptor locateTract(const FunctionModel& model, double R, Complex seed,
                            const Window& window, int workers = 0);

bool containsPoint(const TractDescriptor& tract, Complex z);

// Marching-squares contour of |f| = R along the component boundary, with
// linear interpolation of log|f| between pixel centers. Each polyline's
// points are ordered along the curve.
std::vector<std::vector<Complex>> boundaryCurve(const TractDescriptor& tract);

}  // namespace tractlab
