#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tractlab/dynamics.hpp"

namespace tractlab::cli {

// Hard-coded figure presets: example1 with lambda = 1/2, 1, 2 on
// [-10,8]x[-12,12] and the gamma family on [-5,10]x[-10,10].
struct Preset {
  std::string name;
  std::string modelSelector;
  Window window;
  double R;
  Complex seed;
  std::string palette;  // fig1 | fig2
};

const std::vector<Preset>& presets();
std::optional<Preset> findPreset(const std::string& name);

std::array<Rgb, kOrbitClassCount> paletteByName(const std::string& name);

// Runs one subcommand; args exclude the program name. Returns the process
// exit code (0 success, 2 flag errors, 3-6 mapped module errors).
int run(const std::vector<std::string>& args);

}  // namespace tractlab::cli
