#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tractlab/growth.hpp"
#include "tractlab/tract.hpp"

namespace tractlab {

enum class OrbitClass : std::uint8_t {
  EscapingInTract = 0,
  FastEscaping = 1,
  Basin = 2,
  Prepole = 3,
  Other = 4,
};

inline constexpr int kOrbitClassCount = 5;
const char* orbitClassName(OrbitClass c);

enum class FixedPointType { Superattracting, Attracting, Indifferent, Repelling };

struct FixedPointInfo {
  Complex location;
  Complex multiplier;
  FixedPointType type;
};

const char* fixedPointTypeName(FixedPointType t);

struct IterationParams {
  int maxIter = 200;
  double escapeLogBound = 1e4;  // log scale
  double basinCaptureRadius = 1e-4;
};

struct OrbitRecord {
  Complex z0;
  std::vector<ComplexValue> iterates;  // iterates[0] is z0 itself
  OrbitClass classification = OrbitClass::Other;
  int basinFixedPoint = -1;  // index into the attractor list
  int prepoleIndex = -1;     // orbit index sitting on the pole
  int entryIndex = -1;       // first index of the monotone in-tract tail
  int stepsUsed = 0;
};

// Iterates until the classification resolves or maxIter. Pole hits terminate
// with Prepole; values past the floating-point range continue in log space
// while the tract membership test stays decidable through the far-field
// sectors. `tract` may be null (no escape classification then).
OrbitRecord iterate(const FunctionModel& model, Complex z0,
                    const TractDescriptor* tract,
                    const std::vector<FixedPointInfo>& attractors,
                    const IterationParams& params);

struct FastEscapeReport {
  bool passed = false;
  int depthChecked = 0;
  int failIndex = -1;  // first n where the prefix check failed
};

// Prefix check of A(f,D,rho) membership: f^n(z0) in the tract and
// |f^n(z0)| >= M_D^n(rho) for 0 <= n <= depth, compared in tower form.
// This approximates the infinite-horizon definition; depthChecked is
// reported so no claim of exact membership is made.
FastEscapeReport fastEscapeTest(const FunctionModel& model, Complex z0,
                                const TractDescriptor& tract, double rho,
                                int depth);

// Newton iteration on f(z) - z from a gridDensity x gridDensity seed grid,
// deduplicated within 1e-7 and sorted by (Re, Im).
std::vector<FixedPointInfo> findFixedPoints(const FunctionModel& model,
                                            const Rect& window,
                                            int gridDensity = 24);

using Rgb = std::array<std::uint8_t, 3>;

struct RenderSpec {
  Window window;
  IterationParams iteration;
  std::array<Rgb, kOrbitClassCount> palette{};
};

struct RenderResult {
  Window window;
  std::vector<std::uint8_t> rgb;      // 3 bytes per pixel, row-major from top
  std::vector<std::uint8_t> classes;  // OrbitClass per pixel
  std::array<std::uint64_t, kOrbitClassCount> histogram{};

  OrbitClass classAt(int i, int j) const {
    return static_cast<OrbitClass>(
        classes[static_cast<std::size_t>(j) * window.width + i]);
  }
};

// Per-pixel classification; deterministic for any worker count.
RenderResult render(const FunctionModel& model, const RenderSpec& spec,
                    const TractDescriptor& tract,
                    const std::vector<FixedPointInfo>& attractors,
                    int workers = 0);

struct OuterStepResult {
  RegionRaster next;  // G_{n+1}, hole-filled, on the target window
  double rCurrent;    // largest circle radius inside the input region
  double rNext;       // largest circle radius inside G_{n+1}
};

// One step of the outer-sequence construction: B_n = G_n intersect tract,
// G_{n+1} = the hole-filled forward image of B_n rasterized on targetWindow
// with adaptive pixel subdivision (depth <= 4). Throws ImageEscapesWindow
// when the image leaves the target window.
OuterStepResult outerSequenceStep(const FunctionModel& model,
                                  const TractDescriptor& tract,
                                  const RegionRaster& region,
                                  const Window& targetWindow);

// Largest circle about 0 contained in the region (pixel-center metric,
// shrunk by half a pixel diagonal).
double largestInscribedRadius(const RegionRaster& region);

struct DerivativeBoundReport {
  int violations = 0;
  int samplesUsed = 0;
};

// Samples in-tract pixels with |z| > minAbsZ and log|f| > minLogAbsF and
// counts violations of |f'| > |f| log|f| / (16 pi |z|). Requires the tract's
// logarithmic heuristic flag.
DerivativeBoundReport derivativeBoundCheck(const TractDescriptor& tract,
                                           int samples, double minAbsZ = 10.0,
                                           double minLogAbsF = 10.0);

}  // namespace tractlab
