#include "ufslam/cli/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ufslam::cli {

namespace {

constexpr double kLeft = 70.0, kRight = 170.0, kTop = 40.0, kBottom = 55.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed two-decimal pixel coordinates keep files small and stable.
std::string px(double v) { return fmt::format("{:.2f}", v); }

std::string tick_label(double v, double step) {
  const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
  const double rounded = std::abs(v) < step * 1e-6 ? 0.0 : v;
  return fmt::format("{:.{}f}", rounded, std::clamp(decimals, 0, 6));
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target_count) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(target_count, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
  return ticks;
}

std::string render_svg(const Chart& chart) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : chart.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("render_svg: series '" + s.label + "' x/y length differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 >= x0)) throw std::invalid_argument("render_svg: nothing to plot");
  if (chart.y_from_zero) y0 = std::min(y0, 0.0);
  auto pad = [](double& lo, double& hi) {
    const double span = hi - lo;
    const double margin = span > 0.0 ? 0.05 * span : std::max(std::abs(lo) * 0.1, 1.0);
    lo -= margin;
    hi += margin;
  };
  pad(x0, x1);
  if (chart.y_from_zero && y0 == 0.0) {
    y1 += 0.05 * std::max(y1, 1e-12);
    if (!(y1 > y0)) y1 = 1.0;
  } else {
    pad(y0, y1);
  }

  const double plot_w = chart.width - kLeft - kRight;
  const double plot_h = chart.height - kTop - kBottom;
  if (chart.equal_aspect) {
    const double scale = std::max((x1 - x0) / plot_w, (y1 - y0) / plot_h);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    x0 = cx - 0.5 * scale * plot_w;
    x1 = cx + 0.5 * scale * plot_w;
    y0 = cy - 0.5 * scale * plot_h;
    y1 = cy + 0.5 * scale * plot_h;
  }
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * plot_w; };
  auto sy = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * plot_h; };

  fmt::memory_buffer out;
  auto put = [&out]<typename... Args>(fmt::format_string<Args...> f, Args&&... args) {
    fmt::format_to(std::back_inserter(out), f, std::forward<Args>(args)...);
  };
  put("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  put("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      chart.width, chart.height, chart.width, chart.height);
  put("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  put("<g font-family=\"sans-serif\" font-size=\"12\">\n");
  put("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", px(kLeft + plot_w / 2),
      escape(chart.title));

  // grid and ticks
  const std::vector<double> xt = nice_ticks(x0, x1);
  const std::vector<double> yt = nice_ticks(y0, y1);
  const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
  const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
  for (double t : xt) {
    put("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n", px(sx(t)), px(kTop),
        px(kTop + plot_h));
    put("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(sx(t)), px(kTop + plot_h + 16),
        tick_label(t, xstep));
  }
  for (double t : yt) {
    put("<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#dddddd\"/>\n", px(sy(t)), px(kLeft),
        px(kLeft + plot_w));
    put("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", px(kLeft - 6), px(sy(t) + 4),
        tick_label(t, ystep));
  }
  put("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", px(kLeft), px(kTop),
      px(plot_w), px(plot_h));
  put("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(kLeft + plot_w / 2),
      px(chart.height - 12), escape(chart.x_label));
  put("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
      px(kTop + plot_h / 2), escape(chart.y_label));

  // data, clipped to the plot area
  put("<clipPath id=\"plot\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>\n", px(kLeft), px(kTop),
      px(plot_w), px(plot_h));
  put("<g clip-path=\"url(#plot)\">\n");
  for (const Series& s : chart.series) {
    if (s.line && s.x.size() > 1) {
      put("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"", s.color,
          s.dashed ? " stroke-dasharray=\"6 4\"" : "");
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        put("{}{},{}", first ? "" : " ", px(sx(s.x[i])), px(sy(s.y[i])));
        first = false;
      }
      put("\"/>\n");
    }
    for (std::size_t i = 0; i < s.x.size() && s.marker != Marker::none; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double cx = sx(s.x[i]), cy = sy(s.y[i]);
      if (s.marker == Marker::circle) {
        put("<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", px(cx), px(cy),
            s.color);
      } else {
        put("<path d=\"M{} {}L{} {}M{} {}L{} {}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", px(cx - 4), px(cy - 4),
            px(cx + 4), px(cy + 4), px(cx - 4), px(cy + 4), px(cx + 4), px(cy - 4), s.color);
      }
    }
  }
  put("</g>\n");

  // legend
  double ly = kTop + 10;
  const double lx = kLeft + plot_w + 12;
  for (const Series& s : chart.series) {
    if (s.line) {
      put("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"1.5\"{4}/>\n", px(lx), px(ly),
          px(lx + 24), s.color, s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    }
    if (s.marker == Marker::circle) {
      put("<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" stroke=\"{}\"/>\n", px(lx + 12), px(ly), s.color);
    } else if (s.marker == Marker::cross) {
      put("<path d=\"M{} {}L{} {}M{} {}L{} {}\" stroke=\"{}\"/>\n", px(lx + 8), px(ly - 4), px(lx + 16), px(ly + 4),
          px(lx + 8), px(ly + 4), px(lx + 16), px(ly - 4), s.color);
    }
    put("<text x=\"{}\" y=\"{}\">{}</text>\n", px(lx + 30), px(ly + 4), escape(s.label));
    ly += 20;
  }
  put("</g>\n</svg>\n");
  return fmt::to_string(out);
}

}  // namespace ufslam::cli
