#include "tractlab/raster.hpp"

#include <array>

namespace tractlab {

namespace {

const std::array<std::pair<int, int>, 8> kNeighbors = {{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1},  // 4-connected first
    {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
}};

}  // namespace

RegionRaster labelComponents(const Window& window,
                             const std::vector<std::uint8_t>& mask,
                             Connectivity connectivity) {
  RegionRaster raster;
  raster.window = window;
  raster.connectivity = connectivity;
  raster.labels.assign(mask.size(), 0);
  const int w = window.width;
  const int h = window.height;
  const std::size_t nNeighbors = connectivity == Connectivity::Four ? 4 : 8;

  std::uint32_t next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      std::size_t idx = static_cast<std::size_t>(j) * w + i;
      if (!mask[idx] || raster.labels[idx] != 0) continue;
      ++next;
      raster.labels[idx] = next;
      stack.push_back({i, j});
      while (!stack.empty()) {
        auto [ci, cj] = stack.back();
        stack.pop_back();
        for (std::size_t n = 0; n < nNeighbors; ++n) {
          int ni = ci + kNeighbors[n].first;
          int nj = cj + kNeighbors[n].second;
          if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
          std::size_t nidx = static_cast<std::size_t>(nj) * w + ni;
          if (!mask[nidx] || raster.labels[nidx] != 0) continue;
          raster.labels[nidx] = next;
          stack.push_back({ni, nj});
        }
      }
    }
  }
  raster.componentCount = next;
  return raster;
}

std::vector<std::uint8_t> fillHoles(const RegionRaster& raster) {
  const int w = raster.window.width;
  const int h = raster.window.height;
  std::vector<std::uint8_t> outside(raster.pixelCount(), 0);
  std::vector<std::pair<int, int>> stack;
  auto pushIfBackground = [&](int i, int j) {
    std::size_t idx = static_cast<std::size_t>(j) * w + i;
    if (raster.labels[idx] == 0 && !outside[idx]) {
      outside[idx] = 1;
      stack.push_back({i, j});
    }
  };
  for (int i = 0; i < w; ++i) {
    pushIfBackground(i, 0);
    pushIfBackground(i, h - 1);
  }
  for (int j = 0; j < h; ++j) {
    pushIfBackground(0, j);
    pushIfBackground(w - 1, j);
  }
  while (!stack.empty()) {
    auto [ci, cj] = stack.back();
    stack.pop_back();
    for (std::size_t n = 0; n < 4; ++n) {
      int ni = ci + kNeighbors[n].first;
      int nj = cj + kNeighbors[n].second;
      if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
      pushIfBackground(ni, nj);
    }
  }
  std::vector<std::uint8_t> filled(raster.pixelCount());
  for (std::size_t k = 0; k < filled.size(); ++k)
    filled[k] = outside[k] ? 0 : 1;
  return filled;
}

RegionRaster discRegion(const Window& window, double radius) {
  std::vector<std::uint8_t> mask(
      static_cast<std::size_t>(window.width) * window.height, 0);
  for (int j = 0; j < window.height; ++j)
    for (int i = 0; i < window.width; ++i)
      if (std::abs(window.pixelCenter(i, j)) <= radius)
        mask[static_cast<std::size_t>(j) * window.width + i] = 1;
  return labelComponents(window, mask, Connectivity::Four);
}

}  // namespace tractlab
