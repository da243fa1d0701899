#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ocm/projector.hpp"

namespace ocm {

// Minimal deterministic SVG chart writer. Data points carry their source
// values in data-x / data-y attributes so files can be checked
// value-for-value. No external renderer is involved; output is plain text.
class SvgPlot {
 public:
  SvgPlot(int width, int height, std::string title, std::string x_label,
          std::string y_label);

  void add_points(std::span<const double> x, std::span<const double> y,
                  std::span<const double> y_err, std::string color,
                  std::string label);
  void add_line(std::span<const double> x, std::span<const double> y,
                std::string color, bool dashed, std::string label);
  // Vertical marker at a data x position, spanning the plot height.
  void add_vline(double x, std::string color, bool dashed = true);
  // Log10 y axis; non-positive y values are skipped when enabled.
  void set_y_log(bool enabled) { y_log_ = enabled; }

  std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_err;
    std::string color;
    std::string label;
    bool line = false;
    bool dashed = false;
  };

  int width_;
  int height_;
  std::string title_;
  std::string x_label_;
  std::string y_label_;
  bool y_log_ = false;
  std::vector<Series> series_;
  std::vector<std::pair<double, std::pair<std::string, bool>>> vlines_;
};

// Square heatmap of a pixel-vs-pixel joint map, one cell per entry, each
// cell carrying its value in a data-value attribute.
void write_heatmap_svg(const std::filesystem::path& path, const JointMap2D& map,
                       const std::string& title);

}  // namespace ocm
