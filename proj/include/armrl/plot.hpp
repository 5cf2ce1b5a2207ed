#pragma once

#include <optional>
#include <string>
#include <vector>

#include "armrl/estimation.hpp"

namespace armrl {

struct CurveSeries {
  std::string label;
  std::vector<CurveRow> rows;
};

struct PlotOptions {
  int width = 900;
  int height = 540;
  int margin = 60;
  // Fixed data ranges; unset means auto-fit to mean +- std over all series.
  std::optional<double> x_min, x_max, y_min, y_max;
};

// Data-to-pixel transform of the plot area; exposed so tests can check that
// band edges land at mean +- std.
struct PlotTransform {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  int width = 0, height = 0, margin = 0;
  double px(double x) const;
  double py(double y) const;
};

PlotTransform compute_transform(const std::vector<CurveSeries>& series,
                                const PlotOptions& options);

// Mean-return line per run with a shaded +-std band, x = episodes. Rendering
// is fully deterministic: fixed palette, fixed fonts, fixed number formatting.
std::string render_curves_svg(const std::vector<CurveSeries>& series,
                              const PlotOptions& options = {});

// Loads the named curve CSVs (labels = file stems) and writes the SVG.
// Empty CSVs are rejected.
void plot_curves(const std::vector<std::string>& csv_paths,
                 const std::string& out_path, const PlotOptions& options = {});

}  // namespace armrl
