#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ballerg/holo_map.hpp"
#include "ballerg/trace.hpp"

namespace ballerg {

struct RunConfig {
  std::optional<HoloMap> map;
  double tol = 1e-3;
  unsigned jmax = 64;
  unsigned grid_levels = 40;
  unsigned dirs = 8;
  std::uint64_t seed = 1;
  double epsilon = 0.5;
  double eta = 0.5;
  unsigned rows = 20;
  double ratio_a = 0.5;
  double radius = 1.0;
  std::vector<CVector> points;
  std::vector<CVector> sequence;
  std::string out;

  GridSpec grid() const { return GridSpec::geometric(grid_levels, dirs, seed); }
};

// Parse errors are ParseError with the dotted path of the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
// Canonical form: sorted keys, complex numbers as [re, im], shortest
// round-trip doubles. parse_config(print_config(c)) prints identically.
std::string print_config(const RunConfig& config);

HoloMap parse_map(const std::string& json_text);
std::string print_map(const HoloMap& map);

// Header j,name,value; rows sorted by (name, j); values with 17 significant digits.
void write_traces_csv(std::ostream& os, const std::vector<ConvergenceTrace>& traces);
// Throws InvalidArgument for an empty list and IoError naming the path.
void emit_traces(const std::vector<ConvergenceTrace>& traces, const std::filesystem::path& path);

}  // namespace ballerg
