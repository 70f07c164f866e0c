#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tractlab/value.hpp"

namespace tractlab {

// Rasterized rectangle. Row j = 0 is the top of the window (imMax side), so
// rasters, images and exported files share one orientation.
struct Window {
  Rect rect;
  int width = 0;
  int height = 0;

  double pixelWidth() const { return (rect.reMax - rect.reMin) / width; }
  double pixelHeight() const { return (rect.imMax - rect.imMin) / height; }

  Complex pixelCenter(int i, int j) const {
    return Complex(rect.reMin + (i + 0.5) * pixelWidth(),
                   rect.imMax - (j + 0.5) * pixelHeight());
  }

  // Pixel containing z; boundary points clamp inward.
  std::optional<std::pair<int, int>> pixelOf(Complex z) const {
    if (!rect.contains(z)) return std::nullopt;
    int i = static_cast<int>((z.real() - rect.reMin) / pixelWidth());
    int j = static_cast<int>((rect.imMax - z.imag()) / pixelHeight());
    i = std::min(std::max(i, 0), width - 1);
    j = std::min(std::max(j, 0), height - 1);
    return std::make_pair(i, j);
  }

  bool operator==(const Window& o) const {
    return rect.reMin == o.rect.reMin && rect.reMax == o.rect.reMax &&
           rect.imMin == o.rect.imMin && rect.imMax == o.rect.imMax &&
           width == o.width && height == o.height;
  }
};

enum class Connectivity { Four, Eight };

// Per-pixel component labels; 0 is background, components are numbered from 1
// in first-encountered scan order (row-major from the top row), which keeps
// labeling deterministic.
struct RegionRaster {
  Window window;
  Connectivity connectivity = Connectivity::Four;
  std::vector<std::uint32_t> labels;
  std::uint32_t componentCount = 0;

  std::uint32_t labelAt(int i, int j) const {
    return labels[static_cast<std::size_t>(j) * window.width + i];
  }
  std::uint32_t& labelAt(int i, int j) {
    return labels[static_cast<std::size_t>(j) * window.width + i];
  }
  std::size_t pixelCount() const { return labels.size(); }
};

// Labels the connected components of mask (true = foreground).
RegionRaster labelComponents(const Window& window,
                             const std::vector<std::uint8_t>& mask,
                             Connectivity connectivity);

// Foreground mask (label != 0) with all bounded complementary components
// filled in. Background connectivity is 4-connected.
std::vector<std::uint8_t> fillHoles(const RegionRaster& raster);

// Binary raster (single label 1) for a centered disc; used to seed outer
// sequences and in tests.
RegionRaster discRegion(const Window& window, double radius);

}  // namespace tractlab
