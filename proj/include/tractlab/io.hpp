#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "tractlab/raster.hpp"

namespace tractlab {

// Binary P6; rgb holds 3 bytes per pixel, rows from the top.
void writePpm(const std::string& path, int width, int height,
              const std::vector<std::uint8_t>& rgb);

// Binary P5, one byte per pixel, label mod 256.
void writePgm(const std::string& path, const RegionRaster& raster);

// {window, connectivity, runs}: run-length-encoded labels in row-major
// order, each run a [label, count] pair.
nlohmann::ordered_json rasterToJson(const RegionRaster& raster);

nlohmann::ordered_json windowToJson(const Window& window);

}  // namespace tractlab
