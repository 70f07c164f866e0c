#include "tractlab/io.hpp"

#include <fstream>

#include "tractlab/errors.hpp"

namespace tractlab {

namespace {

std::ofstream openBinary(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::PreconditionViolated, "cannot open " + path);
  return out;
}

}  // namespace

void writePpm(const std::string& path, int width, int height,
              const std::vector<std::uint8_t>& rgb) {
  std::ofstream out = openBinary(path);
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
}

void writePgm(const std::string& path, const RegionRaster& raster) {
  std::ofstream out = openBinary(path);
  out << "P5\n" << raster.window.width << " " << raster.window.height
      << "\n255\n";
  for (std::uint32_t l : raster.labels) {
    char byte = static_cast<char>(l % 256);
    out.write(&byte, 1);
  }
}

nlohmann::ordered_json windowToJson(const Window& window) {
  return nlohmann::ordered_json{{"re_min", window.rect.reMin},
                                {"re_max", window.rect.reMax},
                                {"im_min", window.rect.imMin},
                                {"im_max", window.rect.imMax},
                                {"width", window.width},
                                {"height", window.height}};
}

nlohmann::ordered_json rasterToJson(const RegionRaster& raster) {
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  std::size_t k = 0;
  while (k < raster.labels.size()) {
    std::uint32_t label = raster.labels[k];
    std::size_t start = k;
    while (k < raster.labels.size() && raster.labels[k] == label) ++k;
    runs.push_back({label, k - start});
  }
  return nlohmann::ordered_json{
      {"window", windowToJson(raster.window)},
      {"connectivity", raster.connectivity == Connectivity::Four ? 4 : 8},
      {"component_count", raster.componentCount},
      {"runs", runs}};
}

}  // namespace tractlab
