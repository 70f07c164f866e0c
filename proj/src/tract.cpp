#include "tractlab/tract.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "tractlab/errors.hpp"
#include "tractlab/parallel.hpp"

namespace tractlab {

namespace {

bool superThreshold(const ComplexValue& v, double logR) {
  if (v.isPole()) return true;
  return v.logAbs() > logR;
}

std::vector<std::pair<double, double>> computeFarFieldSectors(
    const RegionRaster& raster) {
  const Window& win = raster.window;
  const int w = win.width;
  const int h = win.height;
  double halfDiag = 0.5 * std::hypot(win.pixelWidth(), win.pixelHeight());
  std::vector<std::pair<double, double>> intervals;
  auto addPixel = [&](int i, int j) {
    if (raster.labelAt(i, j) != 1) return;
    Complex z = win.pixelCenter(i, j);
    double d = std::abs(z);
    if (d <= halfDiag) {
      intervals.push_back({-M_PI, M_PI});
      return;
    }
    double theta = std::arg(z);
    double width = std::atan2(halfDiag, d);
    intervals.push_back({theta - width, theta + width});
  };
  for (int i = 0; i < w; ++i) {
    addPixel(i, 0);
    addPixel(i, h - 1);
  }
  for (int j = 1; j + 1 < h; ++j) {
    addPixel(0, j);
    addPixel(w - 1, j);
  }
  if (intervals.empty()) return intervals;
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second + 1e-12)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  return merged;
}

// Winding of arg f' around component plaquettes; a full turn flags a zero of
// f' (a critical point of f) inside the component.
bool scanFindsCriticalPoint(const FunctionModel& model,
                            const RegionRaster& raster) {
  const Window& win = raster.window;
  const int w = win.width;
  const int h = win.height;
  const double kUnset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> phase(raster.pixelCount(), kUnset);
  std::vector<std::uint8_t> usable(raster.pixelCount(), 2);  // 2 = unknown
  auto phaseAt = [&](int i, int j) -> double {
    std::size_t idx = static_cast<std::size_t>(j) * w + i;
    if (usable[idx] == 2) {
      ComplexValue d = model.derivative(win.pixelCenter(i, j));
      if (d.isPole() || !std::isfinite(d.logAbs()) ||
          d.logAbs() == -std::numeric_limits<double>::infinity()) {
        usable[idx] = 0;
      } else {
        usable[idx] = 1;
        phase[idx] = d.phase();
      }
    }
    return usable[idx] ? phase[idx] : kUnset;
  };
  for (int j = 0; j + 1 < h; ++j) {
    for (int i = 0; i + 1 < w; ++i) {
      if (raster.labelAt(i, j) != 1 || raster.labelAt(i + 1, j) != 1 ||
          raster.labelAt(i, j + 1) != 1 || raster.labelAt(i + 1, j + 1) != 1)
        continue;
      double pa = phaseAt(i, j);
      double pb = phaseAt(i + 1, j);
      double pc = phaseAt(i + 1, j + 1);
      double pd = phaseAt(i, j + 1);
      if (std::isnan(pa) || std::isnan(pb) || std::isnan(pc) || std::isnan(pd))
        continue;
      double winding = wrapAngle(pb - pa) + wrapAngle(pc - pb) +
                       wrapAngle(pd - pc) + wrapAngle(pa - pd);
      if (std::abs(winding) > M_PI) return true;
    }
  }
  return false;
}

}  // namespace

TractDescriptor::TractDescriptor(
    FunctionModel model, double R, Complex seed, RegionRaster raster,
    Directness direct, bool complementBounded, bool logarithmicHeuristic,
    std::vector<std::pair<double, double>> farFieldSectors)
    : model_(std::move(model)),
      R_(R),
      logR_(std::log(R)),
      seed_(seed),
      raster_(std::move(raster)),
      direct_(direct),
      complementBounded_(complementBounded),
      logarithmicHeuristic_(logarithmicHeuristic),
      farFieldSectors_(std::move(farFieldSectors)) {}

bool TractDescriptor::contains(Complex z) const {
  auto pix = raster_.window.pixelOf(z);
  if (!pix)
    throw Error(ErrorCode::OutsideWindow, "point outside the tract window");
  if (raster_.labelAt(pix->first, pix->second) != 1) return false;
  return superThreshold(model_.eval(z), logR_);
}

bool TractDescriptor::sectorContains(double angle) const {
  for (const auto& [lo, hi] : farFieldSectors_) {
    if (angle >= lo && angle <= hi) return true;
    if (angle + 2.0 * M_PI >= lo && angle + 2.0 * M_PI <= hi) return true;
    if (angle - 2.0 * M_PI >= lo && angle - 2.0 * M_PI <= hi) return true;
  }
  return false;
}

bool TractDescriptor::containsExtrapolated(const ComplexValue& z) const {
  if (z.isPole()) return false;
  if (z.isFinite() && raster_.window.rect.contains(z.value()))
    return contains(z.value());
  if (z.isOverflow() && z.logAbs() <= 0.0) {
    // deep-tiny point: evaluate at a representable stand-in near 0
    Complex approx =
        std::polar(std::exp(std::max(z.logAbs(), -700.0)), z.phase());
    if (raster_.window.rect.contains(approx)) return contains(approx);
    return false;
  }
  if (!sectorContains(z.phase())) return false;
  if (z.isFinite()) return superThreshold(model_.eval(z.value()), logR_);
  // Past the representable range: the sector is all the raster can say.
  return std::isfinite(z.logAbs()) || z.logAbs() > 0.0;
}

double TractDescriptor::areaFraction() const {
  std::size_t n = 0;
  for (std::uint32_t l : raster_.labels)
    if (l == 1) ++n;
  return static_cast<double>(n) / static_cast<double>(raster_.pixelCount());
}

RegionRaster levelRegion(const FunctionModel& model, double R,
                         const Window& window, int workers) {
  if (R <= 0.0)
    throw Error(ErrorCode::PreconditionViolated, "threshold R must be > 0");
  if (window.width < 8 || window.height < 8)
    throw Error(ErrorCode::WindowTooCoarse,
                "window resolution below 8x8 pixels");
  if (!(window.rect.reMin < window.rect.reMax &&
        window.rect.imMin < window.rect.imMax))
    throw Error(ErrorCode::PreconditionViolated, "degenerate window");
  const double logR = std::log(R);
  std::vector<std::uint8_t> mask(
      static_cast<std::size_t>(window.width) * window.height, 0);
  parallelForRows(window.height, workers, [&](int lo, int hi) {
    for (int j = lo; j < hi; ++j)
      for (int i = 0; i < window.width; ++i)
        mask[static_cast<std::size_t>(j) * window.width + i] =
            superThreshold(model.eval(window.pixelCenter(i, j)), logR) ? 1 : 0;
  });
  return labelComponents(window, mask, Connectivity::Four);
}

TractDescriptor locateTract(const FunctionModel& model, double R, Complex seed,
                            const Window& window, int workers) {
  RegionRaster full = levelRegion(model, R, window, workers);
  const double logR = std::log(R);
  ComplexValue sv = model.eval(seed);
  if (!superThreshold(sv, logR))
    throw Error(ErrorCode::SeedBelowThreshold, "|f(seed)| <= R");
  auto pix = window.pixelOf(seed);
  if (!pix)
    throw Error(ErrorCode::SeedBelowThreshold, "seed outside window");
  std::uint32_t lbl = full.labelAt(pix->first, pix->second);
  if (lbl == 0) {
    // seed itself is super-threshold but its pixel center is not; look one
    // pixel around before giving up
    for (int dj = -1; dj <= 1 && lbl == 0; ++dj)
      for (int di = -1; di <= 1 && lbl == 0; ++di) {
        int ni = pix->first + di, nj = pix->second + dj;
        if (ni < 0 || nj < 0 || ni >= window.width || nj >= window.height)
          continue;
        lbl = full.labelAt(ni, nj);
      }
    if (lbl == 0)
      throw Error(ErrorCode::SeedBelowThreshold,
                  "seed component not visible at this resolution");
  }

  RegionRaster restricted;
  restricted.window = window;
  restricted.connectivity = full.connectivity;
  restricted.componentCount = 1;
  restricted.labels.assign(full.labels.size(), 0);
  for (std::size_t k = 0; k < full.labels.size(); ++k)
    if (full.labels[k] == lbl) restricted.labels[k] = 1;

  Directness direct = Directness::DirectCandidate;
  for (Complex p : model.polesIn(window.rect)) {
    auto pp = window.pixelOf(p);
    if (pp && restricted.labelAt(pp->first, pp->second) == 1) {
      direct = Directness::ContainsPole;
      break;
    }
  }

  bool complementTouchesEdge = false;
  for (int i = 0; i < window.width && !complementTouchesEdge; ++i)
    complementTouchesEdge = restricted.labelAt(i, 0) != 1 ||
                            restricted.labelAt(i, window.height - 1) != 1;
  for (int j = 0; j < window.height && !complementTouchesEdge; ++j)
    complementTouchesEdge = restricted.labelAt(0, j) != 1 ||
                            restricted.labelAt(window.width - 1, j) != 1;

  // Heuristic only: no finite sampling certifies the universal-covering
  // property, so this records the absence of critical-point evidence.
  bool logHeur = direct == Directness::DirectCandidate &&
                 !scanFindsCriticalPoint(model, restricted);

  return TractDescriptor(model, R, seed, std::move(restricted), direct,
                         !complementTouchesEdge, logHeur,
                         computeFarFieldSectors(restricted));
}

bool containsPoint(const TractDescriptor& tract, Complex z) {
  return tract.contains(z);
}

namespace {

struct Segment {
  Complex a, b;
};

// edge ids: 0 = top (tl-tr), 1 = right (tr-br), 2 = bottom (bl-br), 3 = left
// (tl-bl)
const int kSegmentTable[16][5] = {
    {-1},              // 0000
    {0, 3, -1},        // a
    {0, 1, -1},        // b
    {3, 1, -1},        // a b
    {1, 2, -1},        // c
    {-2},              // a c   (ambiguous)
    {0, 2, -1},        // b c
    {3, 2, -1},        // a b c
    {2, 3, -1},        // d
    {0, 2, -1},        // a d
    {-2},              // b d   (ambiguous)
    {1, 2, -1},        // a b d
    {1, 3, -1},        // c d
    {0, 1, -1},        // a c d
    {0, 3, -1},        // b c d
    {-1},              // 1111
};

}  // namespace

std::vector<std::vector<Complex>> boundaryCurve(const TractDescriptor& tract) {
  const RegionRaster& raster = tract.raster();
  const Window& win = raster.window;
  const int w = win.width;
  const int h = win.height;
  const double logR = tract.logThreshold();
  const FunctionModel& model = tract.model();

  // field s = log|f| - log R at pixel centers, filled on demand
  std::vector<double> field(raster.pixelCount(),
                            std::numeric_limits<double>::quiet_NaN());
  auto fieldAt = [&](int i, int j) -> double {
    std::size_t idx = static_cast<std::size_t>(j) * w + i;
    if (std::isnan(field[idx])) {
      double v = model.eval(win.pixelCenter(i, j)).logAbs() - logR;
      if (std::isnan(v)) v = 0.0;
      field[idx] = v;
    }
    return field[idx];
  };
  auto inside = [&](int i, int j) { return raster.labelAt(i, j) == 1; };
  auto crossing = [&](int i1, int j1, int i2, int j2) -> Complex {
    double s1 = fieldAt(i1, j1);
    double s2 = fieldAt(i2, j2);
    double t = 0.5;
    double denom = s1 - s2;
    if (std::isfinite(s1) && std::isfinite(s2) && std::isfinite(denom) &&
        denom != 0.0) {
      t = s1 / denom;
      if (!(t >= 0.0 && t <= 1.0)) t = 0.5;
    }
    Complex p1 = win.pixelCenter(i1, j1);
    Complex p2 = win.pixelCenter(i2, j2);
    return p1 + t * (p2 - p1);
  };

  std::vector<Segment> segments;
  for (int j = 0; j + 1 < h; ++j) {
    for (int i = 0; i + 1 < w; ++i) {
      int caseIdx = (inside(i, j) ? 1 : 0) | (inside(i + 1, j) ? 2 : 0) |
                    (inside(i + 1, j + 1) ? 4 : 0) | (inside(i, j + 1) ? 8 : 0);
      if (caseIdx == 0 || caseIdx == 15) continue;
      Complex pts[4];
      auto edgePoint = [&](int e) -> Complex {
        switch (e) {
          case 0: return crossing(i, j, i + 1, j);
          case 1: return crossing(i + 1, j, i + 1, j + 1);
          case 2: return crossing(i, j + 1, i + 1, j + 1);
          default: return crossing(i, j, i, j + 1);
        }
      };
      (void)pts;
      const int* row = kSegmentTable[caseIdx];
      if (row[0] == -2) {
        double centerMean = 0.25 * (fieldAt(i, j) + fieldAt(i + 1, j) +
                                    fieldAt(i + 1, j + 1) + fieldAt(i, j + 1));
        bool centerIn = centerMean >= 0.0;
        if (caseIdx == 5) {
          if (centerIn) {
            segments.push_back({edgePoint(0), edgePoint(1)});
            segments.push_back({edgePoint(2), edgePoint(3)});
          } else {
            segments.push_back({edgePoint(0), edgePoint(3)});
            segments.push_back({edgePoint(1), edgePoint(2)});
          }
        } else {  // case 10
          if (centerIn) {
            segments.push_back({edgePoint(0), edgePoint(3)});
            segments.push_back({edgePoint(1), edgePoint(2)});
          } else {
            segments.push_back({edgePoint(0), edgePoint(1)});
            segments.push_back({edgePoint(2), edgePoint(3)});
          }
        }
      } else {
        for (int k = 0; row[k] >= 0; k += 2)
          segments.push_back({edgePoint(row[k]), edgePoint(row[k + 1])});
      }
    }
  }

  // chain segments into polylines; shared cell edges produce bit-identical
  // crossing points, so exact keys suffice
  using Key = std::pair<double, double>;
  auto keyOf = [](Complex p) { return Key(p.real(), p.imag()); };
  std::map<Key, std::vector<std::size_t>> byEndpoint;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    byEndpoint[keyOf(segments[s].a)].push_back(s);
    byEndpoint[keyOf(segments[s].b)].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<std::vector<Complex>> polylines;
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::deque<Complex> line{segments[s0].a, segments[s0].b};
    for (int dir = 0; dir < 2; ++dir) {
      while (true) {
        Complex tip = dir == 0 ? line.back() : line.front();
        auto it = byEndpoint.find(keyOf(tip));
        std::size_t nextSeg = segments.size();
        for (std::size_t cand : it->second)
          if (!used[cand]) {
            nextSeg = cand;
            break;
          }
        if (nextSeg == segments.size()) break;
        used[nextSeg] = true;
        Complex other = keyOf(segments[nextSeg].a) == keyOf(tip)
                            ? segments[nextSeg].b
                            : segments[nextSeg].a;
        if (dir == 0)
          line.push_back(other);
        else
          line.push_front(other);
      }
    }
    polylines.emplace_back(line.begin(), line.end());
  }
  return polylines;
}

}  // namespace tractlab
