#pragma once

// Minimal deterministic SVG 1.1 line/scatter charts. Output depends only on
// the data, so identical inputs give byte-identical files.

#include <string>
#include <vector>

namespace ufslam::cli {

enum class Marker { none, circle, cross };

struct Series {
  std::string label;
  std::string color;  // any SVG color
  std::vector<double> x;
  std::vector<double> y;
  bool dashed{false};
  bool line{true};
  Marker marker{Marker::none};
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width{800};
  int height{600};
  bool equal_aspect{false};  // same metres per pixel on both axes
  bool y_from_zero{false};
  std::vector<Series> series;
};

/// Throws std::invalid_argument for mismatched x/y lengths or when no series
/// has any finite point.
std::string render_svg(const Chart& chart);

/// "Nice" tick positions (1, 2, 5 x 10^k steps) covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target_count = 6);

}  // namespace ufslam::cli
