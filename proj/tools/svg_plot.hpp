#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace membrane::cli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool reference = false;  // drawn as a horizontal line at its single y
};

struct PlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false;  // y is always logarithmic
  std::vector<Series> series;
};

/// Builds a plot from a convergence, sweep or ε-limit CSV. Throws ParseError
/// for an empty file, an unknown header or a malformed row.
PlotSpec plot_spec_from_csv(std::istream& in, const std::string& title);

/// Self-contained SVG; the same spec always renders to the same bytes.
std::string render_svg(const PlotSpec& spec);

}  // namespace membrane::cli
