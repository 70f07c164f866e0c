#include "tractlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "tractlab/errors.hpp"
#include "tractlab/parallel.hpp"

namespace tractlab {

const char* orbitClassName(OrbitClass c) {
  switch (c) {
    case OrbitClass::EscapingInTract: return "EscapingInTract";
    case OrbitClass::FastEscaping: return "FastEscaping";
    case OrbitClass::Basin: return "Basin";
    case OrbitClass::Prepole: return "Prepole";
    case OrbitClass::Other: return "Other";
  }
  return "Other";
}

const char* fixedPointTypeName(FixedPointType t) {
  switch (t) {
    case FixedPointType::Superattracting: return "Superattracting";
    case FixedPointType::Attracting: return "Attracting";
    case FixedPointType::Indifferent: return "Indifferent";
    case FixedPointType::Repelling: return "Repelling";
  }
  return "Attracting";
}

namespace {

bool isAttractor(const FixedPointInfo& fp) {
  return fp.type == FixedPointType::Attracting ||
         fp.type == FixedPointType::Superattracting;
}

}  // namespace

OrbitRecord iterate(const FunctionModel& model, Complex z0,
                    const TractDescriptor* tract,
                    const std::vector<FixedPointInfo>& attractors,
                    const IterationParams& params) {
  OrbitRecord rec;
  rec.z0 = z0;
  rec.iterates.push_back(ComplexValue::finite(z0));

  auto inTract = [&](const ComplexValue& v) {
    return tract != nullptr && tract->containsExtrapolated(v);
  };

  for (int step = 0;; ++step) {
    const ComplexValue& cur = rec.iterates.back();

    if (cur.isFinite() || (cur.isOverflow() && cur.logAbs() <= 0.0)) {
      Complex where = cur.isFinite()
                          ? cur.value()
                          : std::polar(std::exp(std::max(cur.logAbs(), -700.0)),
                                       cur.phase());
      for (std::size_t fi = 0; fi < attractors.size(); ++fi) {
        if (!isAttractor(attractors[fi])) continue;
        if (std::abs(where - attractors[fi].location) <
            params.basinCaptureRadius) {
          rec.classification = OrbitClass::Basin;
          rec.basinFixedPoint = static_cast<int>(fi);
          rec.stepsUsed = step;
          return rec;
        }
      }
    }

    if (cur.logAbs() > params.escapeLogBound && inTract(cur)) {
      // walk back the monotone in-tract tail
      int k = static_cast<int>(rec.iterates.size()) - 1;
      int entry = k;
      for (int j = k - 1; j >= 0; --j) {
        if (!inTract(rec.iterates[j])) break;
        if (rec.iterates[j].logAbs() >
            rec.iterates[j + 1].logAbs() + 1e-12)
          break;
        entry = j;
      }
      rec.classification = OrbitClass::EscapingInTract;
      rec.entryIndex = entry;
      rec.stepsUsed = step;
      return rec;
    }

    if (step >= params.maxIter) {
      rec.classification = OrbitClass::Other;
      rec.stepsUsed = step;
      return rec;
    }

    ComplexValue next = model.evalExtended(cur);
    if (next.isPole()) {
      rec.classification = OrbitClass::Prepole;
      rec.prepoleIndex = static_cast<int>(rec.iterates.size()) - 1;
      rec.stepsUsed = step;
      return rec;
    }
    if (next.isOverflow() && std::isnan(next.logAbs())) {
      rec.classification = OrbitClass::Other;  // no log-eval for this model
      rec.stepsUsed = step;
      return rec;
    }
    rec.iterates.push_back(next);
  }
}

FastEscapeReport fastEscapeTest(const FunctionModel& model, Complex z0,
                                const TractDescriptor& tract, double rho,
                                int depth) {
  if (depth < 1)
    throw Error(ErrorCode::PreconditionViolated, "depth must be >= 1");
  FastEscapeReport rep;
  rep.depthChecked = depth;

  int towerDepth = std::min(depth, kTowerCap);
  std::vector<LogTower> towers = iterateMD(tract, rho, towerDepth);

  ComplexValue cur = ComplexValue::finite(z0);
  double prevLog = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= depth; ++n) {
    if (!tract.containsExtrapolated(cur)) {
      rep.failIndex = n;
      return rep;
    }
    // Orbit moduli past exp(exp(709)) saturate the log representation while
    // the M_D towers keep counting heights, so from the saturation point on
    // (as beyond the tower cap) monotone in-tract growth is all that can be
    // checked.
    bool saturated = cur.isOverflow() && cur.logAbs() >= 9e307;
    if (n <= towerDepth && !saturated) {
      LogTower bound = n == 0 ? LogTower{0, rho} : towers[n - 1];
      if (compareTower(towerFromValue(cur), bound) < 0) {
        rep.failIndex = n;
        return rep;
      }
    } else {
      if (cur.logAbs() < prevLog) {
        rep.failIndex = n;
        return rep;
      }
    }
    prevLog = cur.logAbs();
    if (n == depth) break;
    cur = model.evalExtended(cur);
    if (cur.isPole() || std::isnan(cur.logAbs())) {
      rep.failIndex = n + 1;
      return rep;
    }
  }
  rep.passed = true;
  return rep;
}

std::vector<FixedPointInfo> findFixedPoints(const FunctionModel& model,
                                            const Rect& window,
                                            int gridDensity) {
  std::vector<FixedPointInfo> found;
  gridDensity = std::max(2, gridDensity);
  std::vector<Complex> seeds;
  for (const FixedPointRef& ref : model.referenceFixedPoints())
    if (window.contains(ref.location)) seeds.push_back(ref.location);
  for (int gj = 0; gj < gridDensity; ++gj) {
    for (int gi = 0; gi < gridDensity; ++gi) {
      seeds.emplace_back(
          window.reMin +
              (gi + 0.5) * (window.reMax - window.reMin) / gridDensity,
          window.imMin +
              (gj + 0.5) * (window.imMax - window.imMin) / gridDensity);
    }
  }
  for (Complex z : seeds) {
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      ComplexValue fv = model.eval(z);
      if (!fv.isFinite()) break;
      ComplexValue dv = model.derivative(z);
      if (!dv.isFinite()) break;
      Complex g = fv.value() - z;
      Complex gp = dv.value() - 1.0;
      if (std::abs(gp) < 1e-14) break;
      Complex step = g / gp;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
      if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged || !window.contains(z)) continue;
    ComplexValue fv = model.eval(z);
    if (!fv.isFinite()) continue;
    if (std::abs(fv.value() - z) > 1e-9 * std::max(1.0, std::abs(z))) continue;
    bool dup = false;
    for (const auto& fp : found)
      if (std::abs(fp.location - z) < 1e-7) dup = true;
    if (dup) continue;
    ComplexValue dv = model.derivative(z);
    if (!dv.isFinite()) continue;
    Complex m = dv.value();
    FixedPointType type;
    double am = std::abs(m);
    if (am <= 1e-6)
      type = FixedPointType::Superattracting;
    else if (std::abs(am - 1.0) <= 1e-9)
      type = FixedPointType::Indifferent;
    else if (am < 1.0)
      type = FixedPointType::Attracting;
    else
      type = FixedPointType::Repelling;
    found.push_back(FixedPointInfo{z, m, type});
  }
  std::sort(found.begin(), found.end(),
            [](const FixedPointInfo& a, const FixedPointInfo& b) {
              if (a.location.real() != b.location.real())
                return a.location.real() < b.location.real();
              return a.location.imag() < b.location.imag();
            });
  return found;
}

RenderResult render(const FunctionModel& model, const RenderSpec& spec,
                    const TractDescriptor& tract,
                    const std::vector<FixedPointInfo>& attractors,
                    int workers) {
  const Window& win = spec.window;
  if (win.width < 1 || win.height < 1)
    throw Error(ErrorCode::PreconditionViolated, "empty render window");
  RenderResult res;
  res.window = win;
  std::size_t n = static_cast<std::size_t>(win.width) * win.height;
  res.rgb.assign(n * 3, 0);
  res.classes.assign(n, 0);

  int w = resolveWorkers(workers);
  std::vector<std::array<std::uint64_t, kOrbitClassCount>> partial(
      static_cast<std::size_t>(w) + 1);
  for (auto& h : partial) h.fill(0);

  int chunk = (win.height + w - 1) / w;
  parallelForRows(win.height, workers, [&](int lo, int hi) {
    std::size_t block = static_cast<std::size_t>(lo / std::max(1, chunk));
    if (block >= partial.size()) block = partial.size() - 1;
    auto& hist = partial[block];
    for (int j = lo; j < hi; ++j) {
      for (int i = 0; i < win.width; ++i) {
        OrbitRecord rec = iterate(model, win.pixelCenter(i, j), &tract,
                                  attractors, spec.iteration);
        std::size_t idx = static_cast<std::size_t>(j) * win.width + i;
        res.classes[idx] = static_cast<std::uint8_t>(rec.classification);
        const Rgb& c = spec.palette[static_cast<int>(rec.classification)];
        res.rgb[idx * 3] = c[0];
        res.rgb[idx * 3 + 1] = c[1];
        res.rgb[idx * 3 + 2] = c[2];
        ++hist[static_cast<int>(rec.classification)];
      }
    }
  });
  for (const auto& h : partial)
    for (int c = 0; c < kOrbitClassCount; ++c) res.histogram[c] += h[c];
  return res;
}

double largestInscribedRadius(const RegionRaster& region) {
  const Window& win = region.window;
  double halfDiag = 0.5 * std::hypot(win.pixelWidth(), win.pixelHeight());
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < win.height; ++j)
    for (int i = 0; i < win.width; ++i)
      if (region.labelAt(i, j) == 0)
        best = std::min(best, std::abs(win.pixelCenter(i, j)));
  if (!std::isfinite(best)) {
    // region covers the whole window: the window inradius bounds the circle
    best = std::min(std::min(-win.rect.reMin, win.rect.reMax),
                    std::min(-win.rect.imMin, win.rect.imMax));
    return std::max(0.0, best);
  }
  return std::max(0.0, best - halfDiag);
}

OuterStepResult outerSequenceStep(const FunctionModel& model,
                                  const TractDescriptor& tract,
                                  const RegionRaster& region,
                                  const Window& targetWindow) {
  const Window& win = region.window;
  if (targetWindow.width < 8 || targetWindow.height < 8)
    throw Error(ErrorCode::WindowTooCoarse, "target window below 8x8");

  // the region must be full (no holes) and bounded inside its window
  std::vector<std::uint8_t> filled = fillHoles(region);
  for (std::size_t k = 0; k < filled.size(); ++k) {
    bool in = region.labels[k] != 0;
    if (in != (filled[k] != 0))
      throw Error(ErrorCode::PreconditionViolated,
                  "outer-sequence region must be hole-free");
  }
  for (int i = 0; i < win.width; ++i)
    if (region.labelAt(i, 0) != 0 || region.labelAt(i, win.height - 1) != 0)
      throw Error(ErrorCode::PreconditionViolated,
                  "outer-sequence region touches its window edge");
  for (int j = 0; j < win.height; ++j)
    if (region.labelAt(0, j) != 0 || region.labelAt(win.width - 1, j) != 0)
      throw Error(ErrorCode::PreconditionViolated,
                  "outer-sequence region touches its window edge");

  double rCur = largestInscribedRadius(region);
  if (rCur <= 0.0)
    throw Error(ErrorCode::PreconditionViolated,
                "region does not surround any circle about 0");
  // desk-scale proxy for the lemma's r_0 hypotheses: at the quarter radius
  // (clamped to the evaluable window) the tract must be met and M_D must
  // expand by at least a factor two
  const Window& tw = tract.window();
  double inradius = std::min(std::min(-tw.rect.reMin, tw.rect.reMax),
                             std::min(-tw.rect.imMin, tw.rect.imMax));
  double rProbe = std::min(rCur / 4.0, 0.9 * inradius);
  try {
    CircleMax m = maximizeOnCircle(tract, rProbe);
    double md = tract.threshold() * std::exp(m.B);
    if (!(md > 2.0 * rProbe))
      throw Error(ErrorCode::PreconditionViolated,
                  "M_D(r/4) too small: region circle below the lemma range");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CircleMissesTract)
      throw Error(ErrorCode::PreconditionViolated,
                  "circle |z| = r/4 misses the tract");
    throw;
  }

  const double targetPixel =
      std::min(targetWindow.pixelWidth(), targetWindow.pixelHeight());
  std::vector<std::uint8_t> image(
      static_cast<std::size_t>(targetWindow.width) * targetWindow.height, 0);
  std::size_t escaped = 0;
  Complex escapeExample;

  // forward-map one sample; subdivide while the local stretch would skip
  // target pixels
  std::function<void(Complex, double, int)> mapPoint = [&](Complex z,
                                                           double halfSize,
                                                           int depth) {
    if (depth < 4) {
      ComplexValue dv = model.derivative(z);
      double stretch = std::exp(std::min(dv.logAbs(), 700.0)) * 2.0 * halfSize;
      if (!dv.isFinite() || stretch > targetPixel) {
        double q = halfSize / 2.0;
        mapPoint(z + Complex(-q, -q), q, depth + 1);
        mapPoint(z + Complex(q, -q), q, depth + 1);
        mapPoint(z + Complex(-q, q), q, depth + 1);
        mapPoint(z + Complex(q, q), q, depth + 1);
        return;
      }
    }
    ComplexValue w = model.eval(z);
    Complex wv;
    if (w.isFinite()) {
      wv = w.value();
    } else if (w.isOverflow() && w.logAbs() <= 0.0) {
      wv = std::polar(std::exp(std::max(w.logAbs(), -700.0)), w.phase());
    } else {
      ++escaped;
      escapeExample = z;
      return;
    }
    auto pix = targetWindow.pixelOf(wv);
    if (!pix) {
      ++escaped;
      escapeExample = z;
      return;
    }
    image[static_cast<std::size_t>(pix->second) * targetWindow.width +
          pix->first] = 1;
  };

  // B_n is sampled on the tract raster: the region window may be far
  // coarser (its scale grows with each forward image), while f is only
  // evaluable where the tract lives.
  const Window& twin = tract.window();
  double halfW = 0.5 * twin.pixelWidth();
  for (int j = 0; j < twin.height; ++j) {
    for (int i = 0; i < twin.width; ++i) {
      if (tract.raster().labelAt(i, j) != 1) continue;
      Complex z = twin.pixelCenter(i, j);
      auto rp = win.pixelOf(z);
      if (!rp || region.labelAt(rp->first, rp->second) == 0) continue;
      if (!tract.contains(z)) continue;
      mapPoint(z, halfW, 0);
    }
  }
  if (escaped > 0)
    throw Error(ErrorCode::ImageEscapesWindow,
                "forward image leaves the target window (" +
                    std::to_string(escaped) + " samples, e.g. from z = " +
                    std::to_string(escapeExample.real()) + "+" +
                    std::to_string(escapeExample.imag()) + "i)");

  RegionRaster imageRaster;
  imageRaster.window = targetWindow;
  imageRaster.labels.assign(image.begin(), image.end());
  imageRaster.componentCount = 1;
  std::vector<std::uint8_t> filledNext = fillHoles(imageRaster);

  OuterStepResult out;
  out.next = labelComponents(targetWindow, filledNext, Connectivity::Four);
  out.rCurrent = rCur;
  out.rNext = largestInscribedRadius(out.next);
  return out;
}

DerivativeBoundReport derivativeBoundCheck(const TractDescriptor& tract,
                                           int samples, double minAbsZ,
                                           double minLogAbsF) {
  if (!tract.logarithmicHeuristic())
    throw Error(ErrorCode::PreconditionViolated,
                "tract is not flagged logarithmic (heuristic)");
  if (!(minLogAbsF > 1.0))
    throw Error(ErrorCode::PreconditionViolated,
                "minLogAbsF must exceed 1 so log log |f| is defined");
  const Window& win = tract.window();
  const FunctionModel& model = tract.model();

  std::vector<std::pair<Complex, double>> candidates;  // (z, log|f(z)|)
  for (int j = 0; j < win.height; ++j)
    for (int i = 0; i < win.width; ++i) {
      if (tract.raster().labelAt(i, j) != 1) continue;
      Complex z = win.pixelCenter(i, j);
      if (std::abs(z) <= minAbsZ) continue;
      double la = model.eval(z).logAbs();
      if (!(la > minLogAbsF) || std::isinf(la)) continue;
      candidates.push_back({z, la});
    }

  DerivativeBoundReport rep;
  if (candidates.empty() || samples <= 0) return rep;
  std::size_t stride = std::max<std::size_t>(1, candidates.size() / samples);
  for (std::size_t k = 0; k < candidates.size() && rep.samplesUsed < samples;
       k += stride) {
    auto [z, la] = candidates[k];
    double ld = model.derivative(z).logAbs();
    ++rep.samplesUsed;
    // |f'| > |f| log|f| / (16 pi |z|), in log form
    if (!(ld > la + std::log(la) - std::log(16.0 * M_PI * std::abs(z))))
      ++rep.violations;
  }
  return rep;
}

}  // namespace tractlab
