#include "armrl/plot.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "armrl/harness.hpp"

namespace armrl {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Largest "nice" step (1/2/5 * 10^k) not exceeding span / min_ticks.
double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {5.0, 2.0, 1.0}) {
    if (m * mag <= raw) return m * mag;
  }
  return mag;
}

}  // namespace

double PlotTransform::px(double x) const {
  const double span = x_max - x_min;
  const double frac = span > 0.0 ? (x - x_min) / span : 0.5;
  return margin + frac * (width - 2 * margin);
}

double PlotTransform::py(double y) const {
  const double span = y_max - y_min;
  const double frac = span > 0.0 ? (y - y_min) / span : 0.5;
  return height - margin - frac * (height - 2 * margin);
}

PlotTransform compute_transform(const std::vector<CurveSeries>& series,
                                const PlotOptions& options) {
  PlotTransform t;
  t.width = options.width;
  t.height = options.height;
  t.margin = options.margin;

  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  bool first = true;
  for (const CurveSeries& s : series) {
    for (const CurveRow& row : s.rows) {
      const double x = static_cast<double>(row.total_episodes);
      const double lo = row.mean_return - row.std_return;
      const double hi = row.mean_return + row.std_return;
      if (first) {
        x_lo = x_hi = x;
        y_lo = lo;
        y_hi = hi;
        first = false;
      } else {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, lo);
        y_hi = std::max(y_hi, hi);
      }
    }
  }
  if (y_hi == y_lo) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;

  t.x_min = options.x_min.value_or(x_lo);
  t.x_max = options.x_max.value_or(x_hi);
  t.y_min = options.y_min.value_or(y_lo - 0.05 * (y_hi - y_lo));
  t.y_max = options.y_max.value_or(y_hi + 0.05 * (y_hi - y_lo));
  return t;
}

std::string render_curves_svg(const std::vector<CurveSeries>& series,
                              const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("render_curves_svg: no series");
  for (const CurveSeries& s : series) {
    if (s.rows.empty()) {
      throw std::invalid_argument("render_curves_svg: empty series " + s.label);
    }
  }
  const PlotTransform t = compute_transform(series, options);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << t.width
      << "\" height=\"" << t.height << "\" font-family=\"monospace\" font-size=\"12\">\n";
  svg << "<rect width=\"" << t.width << "\" height=\"" << t.height
      << "\" fill=\"white\"/>\n";

  // Axes box.
  svg << "<rect x=\"" << t.margin << "\" y=\"" << t.margin << "\" width=\""
      << t.width - 2 * t.margin << "\" height=\"" << t.height - 2 * t.margin
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks and grid.
  const double x_step = nice_step(t.x_max - t.x_min, 6);
  for (double x = std::ceil(t.x_min / x_step) * x_step; x <= t.x_max + 1e-9 * x_step;
       x += x_step) {
    const double px = t.px(x);
    svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << t.height - t.margin
        << "\" x2=\"" << fmt(px) << "\" y2=\"" << t.height - t.margin + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(px) << "\" y=\"" << t.height - t.margin + 18
        << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  const double y_step = nice_step(t.y_max - t.y_min, 6);
  for (double y = std::ceil(t.y_min / y_step) * y_step; y <= t.y_max + 1e-9 * y_step;
       y += y_step) {
    const double py = t.py(y);
    svg << "<line x1=\"" << t.margin - 5 << "\" y1=\"" << fmt(py) << "\" x2=\""
        << t.margin << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << t.margin - 8 << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  svg << "<text x=\"" << t.width / 2 << "\" y=\"" << t.height - 15
      << "\" text-anchor=\"middle\">episodes</text>\n";
  svg << "<text x=\"15\" y=\"" << t.height / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << t.height / 2
      << ")\">average return</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    const std::vector<CurveRow>& rows = series[si].rows;

    // Shaded band: forward along mean + std, back along mean - std.
    svg << "<polygon id=\"band" << si << "\" fill=\"" << color
        << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (const CurveRow& row : rows) {
      svg << fmt(t.px(static_cast<double>(row.total_episodes))) << ','
          << fmt(t.py(row.mean_return + row.std_return)) << ' ';
    }
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      svg << fmt(t.px(static_cast<double>(it->total_episodes))) << ','
          << fmt(t.py(it->mean_return - it->std_return)) << ' ';
    }
    svg << "\"/>\n";

    svg << "<polyline id=\"mean" << si << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const CurveRow& row : rows) {
      svg << fmt(t.px(static_cast<double>(row.total_episodes))) << ','
          << fmt(t.py(row.mean_return)) << ' ';
    }
    svg << "\"/>\n";

    // Legend entry.
    const int ly = t.margin + 18 * static_cast<int>(si) + 12;
    svg << "<line x1=\"" << t.margin + 10 << "\" y1=\"" << ly << "\" x2=\""
        << t.margin + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << t.margin + 40 << "\" y=\"" << ly + 4 << "\">"
        << series[si].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void plot_curves(const std::vector<std::string>& csv_paths,
                 const std::string& out_path, const PlotOptions& options) {
  if (csv_paths.empty()) throw std::invalid_argument("plot_curves: no inputs");
  std::vector<CurveSeries> series;
  for (const std::string& path : csv_paths) {
    CurveSeries s;
    s.label = std::filesystem::path(path).stem().string();
    s.rows = load_curve_csv(path);  // throws on empty CSVs
    series.push_back(std::move(s));
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("plot_curves: cannot open " + out_path);
  out << render_curves_svg(series, options);
}

}  // namespace armrl
