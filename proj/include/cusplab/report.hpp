#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cusplab/paths.hpp"

namespace cusplab::report {

// Writes text to a file, creating parent directories. Throws std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& text);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool steps = false;  // draw as a right-continuous step function
};

// Minimal self-contained SVG line chart.
std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

Series step_series(const std::string& label, const paths::StepPath& p);

}  // namespace cusplab::report
