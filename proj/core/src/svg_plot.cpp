#include "ocm/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ocm/io.hpp"

namespace ocm {

namespace {

std::string fmt(double v) { return io::format_double(v); }

// Pixel coordinates rounded to 0.01 so output stays compact and stable.
std::string px(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  return fmt(r);
}

double nice_step(double raw) {
  if (!(raw > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double nice = 10.0;
  if (frac <= 1.0) {
    nice = 1.0;
  } else if (frac <= 2.0) {
    nice = 2.0;
  } else if (frac <= 5.0) {
    nice = 5.0;
  }
  return nice * mag;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgPlot::SvgPlot(int width, int height, std::string title, std::string x_label,
                 std::string y_label)
    : width_(width),
      height_(height),
      title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {
  if (width_ < 100 || height_ < 100) {
    throw std::invalid_argument("SvgPlot: canvas too small");
  }
}

void SvgPlot::add_points(std::span<const double> x, std::span<const double> y,
                         std::span<const double> y_err, std::string color,
                         std::string label) {
  if (x.size() != y.size() || (!y_err.empty() && y_err.size() != y.size())) {
    throw std::invalid_argument("SvgPlot: series size mismatch");
  }
  Series s;
  s.x.assign(x.begin(), x.end());
  s.y.assign(y.begin(), y.end());
  s.y_err.assign(y_err.begin(), y_err.end());
  s.color = std::move(color);
  s.label = std::move(label);
  series_.push_back(std::move(s));
}

void SvgPlot::add_line(std::span<const double> x, std::span<const double> y,
                       std::string color, bool dashed, std::string label) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("SvgPlot: series size mismatch");
  }
  Series s;
  s.x.assign(x.begin(), x.end());
  s.y.assign(y.begin(), y.end());
  s.color = std::move(color);
  s.label = std::move(label);
  s.line = true;
  s.dashed = dashed;
  series_.push_back(std::move(s));
}

void SvgPlot::add_vline(double x, std::string color, bool dashed) {
  vlines_.push_back({x, {std::move(color), dashed}});
}

std::string SvgPlot::render() const {
  const double margin_left = 72;
  const double margin_right = 24;
  const double margin_top = 44;
  const double margin_bottom = 56;
  const double plot_w = width_ - margin_left - margin_right;
  const double plot_h = height_ - margin_top - margin_bottom;

  const auto y_value = [&](double y) {
    return y_log_ ? std::log10(y) : y;
  };
  const auto usable = [&](double y) { return !y_log_ || y > 0.0; };

  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  bool any = false;
  for (const Series& s : series_) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.y[i])) continue;
      const double err = i < s.y_err.size() ? s.y_err[i] : 0.0;
      const double lo = usable(s.y[i] - err) ? s.y[i] - err : s.y[i];
      const double hi = s.y[i] + err;
      if (!any) {
        x_min = x_max = s.x[i];
        y_min = y_value(lo);
        y_max = y_value(hi);
        any = true;
      } else {
        x_min = std::min(x_min, s.x[i]);
        x_max = std::max(x_max, s.x[i]);
        y_min = std::min(y_min, y_value(lo));
        y_max = std::max(y_max, y_value(hi));
      }
    }
  }
  for (const auto& [x, style] : vlines_) {
    (void)style;
    if (!any) {
      x_min = x_max = x;
      any = true;
    } else {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double x_pad = 0.04 * (x_max - x_min);
  const double y_pad = 0.06 * (y_max - y_min);
  x_min -= x_pad;
  x_max += x_pad;
  y_min -= y_pad;
  y_max += y_pad;

  const auto to_px_x = [&](double x) {
    return margin_left + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto to_px_y = [&](double y) {
    const double v = y_value(y);
    return margin_top + (y_max - v) / (y_max - y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " "
      << height_ << "\">\n";
  svg << "<rect width=\"" << width_ << "\" height=\"" << height_
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width_ / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << xml_escape(title_) << "</text>\n";

  // Axes frame.
  svg << "<rect x=\"" << px(margin_left) << "\" y=\"" << px(margin_top)
      << "\" width=\"" << px(plot_w) << "\" height=\"" << px(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks.
  if (y_log_) {
    const int dec_lo = static_cast<int>(std::ceil(y_min));
    const int dec_hi = static_cast<int>(std::floor(y_max));
    for (int d = dec_lo; d <= dec_hi; ++d) {
      const double yy = margin_top + (y_max - d) / (y_max - y_min) * plot_h;
      svg << "<line x1=\"" << px(margin_left - 5) << "\" y1=\"" << px(yy)
          << "\" x2=\"" << px(margin_left) << "\" y2=\"" << px(yy)
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << px(margin_left - 8) << "\" y=\"" << px(yy + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"11\">1e"
          << d << "</text>\n";
    }
  } else {
    const double y_step = nice_step((y_max - y_min) / 5.0);
    const double y_first = std::ceil(y_min / y_step) * y_step;
    for (double v = y_first; v <= y_max + 1e-9 * y_step; v += y_step) {
      const double yy = margin_top + (y_max - v) / (y_max - y_min) * plot_h;
      svg << "<line x1=\"" << px(margin_left - 5) << "\" y1=\"" << px(yy)
          << "\" x2=\"" << px(margin_left) << "\" y2=\"" << px(yy)
          << "\" stroke=\"black\"/>\n";
      const double label = std::abs(v) < 1e-12 * y_step ? 0.0 : v;
      svg << "<text x=\"" << px(margin_left - 8) << "\" y=\"" << px(yy + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"11\">"
          << fmt(label) << "</text>\n";
    }
  }
  const double x_step = nice_step((x_max - x_min) / 6.0);
  const double x_first = std::ceil(x_min / x_step) * x_step;
  for (double v = x_first; v <= x_max + 1e-9 * x_step; v += x_step) {
    const double xx = to_px_x(v);
    svg << "<line x1=\"" << px(xx) << "\" y1=\"" << px(margin_top + plot_h)
        << "\" x2=\"" << px(xx) << "\" y2=\"" << px(margin_top + plot_h + 5)
        << "\" stroke=\"black\"/>\n";
    const double label = std::abs(v) < 1e-12 * x_step ? 0.0 : v;
    svg << "<text x=\"" << px(xx) << "\" y=\"" << px(margin_top + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(label) << "</text>\n";
  }

  svg << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << xml_escape(x_label_) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << height_ / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << height_ / 2 << ")\">" << xml_escape(y_label_) << "</text>\n";

  for (const auto& [x, style] : vlines_) {
    const double xx = to_px_x(x);
    svg << "<line x1=\"" << px(xx) << "\" y1=\"" << px(margin_top) << "\" x2=\""
        << px(xx) << "\" y2=\"" << px(margin_top + plot_h) << "\" stroke=\""
        << style.first << "\"";
    if (style.second) svg << " stroke-dasharray=\"5 4\"";
    svg << " data-x=\"" << fmt(x) << "\"/>\n";
  }

  for (const Series& s : series_) {
    if (s.line) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\"";
      if (s.dashed) svg << " stroke-dasharray=\"5 4\"";
      svg << " points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.y[i])) continue;
        if (!first) svg << ' ';
        svg << px(to_px_x(s.x[i])) << ',' << px(to_px_y(s.y[i]));
        first = false;
      }
      svg << "\"/>\n";
      continue;
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.y[i])) continue;
      const double cx = to_px_x(s.x[i]);
      const double cy = to_px_y(s.y[i]);
      if (i < s.y_err.size() && s.y_err[i] > 0.0) {
        const double lo = s.y[i] - s.y_err[i];
        const double hi = s.y[i] + s.y_err[i];
        const double y_lo = usable(lo) ? to_px_y(lo) : margin_top + plot_h;
        const double y_hi = to_px_y(hi);
        svg << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y_lo) << "\" x2=\""
            << px(cx) << "\" y2=\"" << px(y_hi) << "\" stroke=\"" << s.color
            << "\"/>\n";
        svg << "<line x1=\"" << px(cx - 3) << "\" y1=\"" << px(y_hi)
            << "\" x2=\"" << px(cx + 3) << "\" y2=\"" << px(y_hi)
            << "\" stroke=\"" << s.color << "\"/>\n";
        svg << "<line x1=\"" << px(cx - 3) << "\" y1=\"" << px(y_lo)
            << "\" x2=\"" << px(cx + 3) << "\" y2=\"" << px(y_lo)
            << "\" stroke=\"" << s.color << "\"/>\n";
      }
      svg << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(cy)
          << "\" r=\"3\" fill=\"" << s.color << "\" data-x=\"" << fmt(s.x[i])
          << "\" data-y=\"" << fmt(s.y[i]) << "\"/>\n";
    }
  }

  // Legend, top right inside the frame.
  double legend_y = margin_top + 14;
  for (const Series& s : series_) {
    if (s.label.empty()) continue;
    const double lx = margin_left + plot_w - 150;
    svg << "<line x1=\"" << px(lx) << "\" y1=\"" << px(legend_y - 4)
        << "\" x2=\"" << px(lx + 18) << "\" y2=\"" << px(legend_y - 4)
        << "\" stroke=\"" << s.color << "\"";
    if (s.dashed) svg << " stroke-dasharray=\"5 4\"";
    svg << "/>\n";
    svg << "<text x=\"" << px(lx + 24) << "\" y=\"" << px(legend_y)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << xml_escape(s.label) << "</text>\n";
    legend_y += 16;
  }

  svg << "</svg>\n";
  return svg.str();
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << render();
}

void write_heatmap_svg(const std::filesystem::path& path, const JointMap2D& map,
                       const std::string& title) {
  const int d = map.pixel_count;
  if (d < 2) throw std::invalid_argument("write_heatmap_svg: empty map");
  const double cell = std::clamp(560.0 / d, 8.0, 32.0);
  const double margin = 56;
  const double size = cell * d;
  const int width = static_cast<int>(size + 2 * margin);
  const int height = static_cast<int>(size + 2 * margin);

  double max_value = 0.0;
  for (const double v : map.values) max_value = std::max(max_value, v);
  if (max_value <= 0.0) max_value = 1.0;

  const auto shade = [&](double v) {
    const double t = std::clamp(v / max_value, 0.0, 1.0);
    // Two-segment ramp: dark blue, magenta, yellow.
    int r, g, b;
    if (t < 0.5) {
      const double u = t / 0.5;
      r = static_cast<int>(11 + u * (126 - 11));
      g = static_cast<int>(7 + u * (47 - 7));
      b = static_cast<int>(36 + u * (142 - 36));
    } else {
      const double u = (t - 0.5) / 0.5;
      r = static_cast<int>(126 + u * (242 - 126));
      g = static_cast<int>(47 + u * (227 - 47));
      b = static_cast<int>(142 + u * (76 - 142));
    }
    std::ostringstream color;
    color << "rgb(" << r << ',' << g << ',' << b << ')';
    return color.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double v = map.at(i, j);
      // Row i drawn bottom-up so pixel (0, 0) sits at the lower left.
      const double x = margin + j * cell;
      const double y = margin + (d - 1 - i) * cell;
      svg << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\""
          << px(cell) << "\" height=\"" << px(cell) << "\" fill=\"" << shade(v)
          << "\" data-i=\"" << i << "\" data-j=\"" << j << "\" data-value=\""
          << fmt(v) << "\"/>\n";
    }
  }
  const int label_stride = d <= 20 ? 1 : 5;
  for (int i = 0; i < d; i += label_stride) {
    svg << "<text x=\"" << px(margin + (i + 0.5) * cell) << "\" y=\""
        << px(margin + size + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << i << "</text>\n";
    svg << "<text x=\"" << px(margin - 8) << "\" y=\""
        << px(margin + (d - 1 - i + 0.5) * cell + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << i << "</text>\n";
  }
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">pixel j</text>\n";
  svg << "<text x=\"16\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << height / 2 << ")\">pixel i</text>\n";
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << svg.str();
}

}  // namespace ocm
