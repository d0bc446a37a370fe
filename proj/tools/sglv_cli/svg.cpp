#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sglv/error.hpp"

namespace sglvcli {

namespace {

using sglv::Matrix;
using sglv::ObservationSeries;
using sglv::Vector;

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 776.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 432.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double pix_lo = 0.0;
  double pix_hi = 1.0;

  double map(double v) const { return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo); }
};

Axis make_axis(double lo, double hi, double pix_lo, double pix_hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo));
    lo -= 0.5 * pad;
    hi += 0.5 * pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return Axis{lo, hi, pix_lo, pix_hi};
}

void open_chart(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' '
      << num(kHeight) << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << num(kWidth / 2)
      << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Axis& x, const Axis& y) {
  out << "  <line x1=\"" << num(kLeft) << "\" y1=\"" << num(kBottom) << "\" x2=\""
      << num(kRight) << "\" y2=\"" << num(kBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "  <line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\""
      << num(kLeft) << "\" y2=\"" << num(kBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x.lo + (x.hi - x.lo) * i / 4.0;
    const double px = x.map(fx);
    out << "  <line x1=\"" << num(px) << "\" y1=\"" << num(kBottom) << "\" x2=\""
        << num(px) << "\" y2=\"" << num(kBottom + 5)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "  <text x=\"" << num(px) << "\" y=\"" << num(kBottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fx) << "</text>\n";
    const double fy = y.lo + (y.hi - y.lo) * i / 4.0;
    const double py = y.map(fy);
    out << "  <line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\""
        << num(kLeft) << "\" y2=\"" << num(py)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "  <text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fy) << "</text>\n";
  }
}

void polyline(std::ostringstream& out, const Axis& x, const Axis& y, const Vector& ts,
              const std::vector<double>& vs, const char* color, bool dashed) {
  out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (dashed) out << " stroke-dasharray=\"5 4\"";
  out << " points=\"";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i > 0) out << ' ';
    out << num(x.map(ts[i])) << ',' << num(y.map(vs[i]));
  }
  out << "\"/>\n";
}

void legend(std::ostringstream& out, std::size_t n_species) {
  for (std::size_t k = 0; k < n_species; ++k) {
    const double ly = kTop + 14.0 * static_cast<double>(k);
    out << "  <line x1=\"" << num(kRight - 90) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kRight - 66) << "\" y2=\"" << num(ly) << "\" stroke=\""
        << kPalette[k % kPaletteSize] << "\" stroke-width=\"2\"/>\n";
    out << "  <text x=\"" << num(kRight - 60) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">x_" << (k + 1)
        << "</text>\n";
  }
}

}  // namespace

std::string render_series_svg(const ObservationSeries& series, const std::string& title) {
  const std::size_t n = series.n_obs();
  const std::size_t n_species = series.n_species();

  double vmin = 1e300, vmax = -1e300;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n_species; ++k) {
      vmin = std::min(vmin, series.values()(i, k));
      vmax = std::max(vmax, series.values()(i, k));
    }
  const Axis x = make_axis(series.times().front(), series.times().back(), kLeft, kRight);
  const Axis y = make_axis(vmin, vmax, kBottom, kTop);

  std::ostringstream out;
  open_chart(out, title);
  draw_axes(out, x, y);
  for (std::size_t k = 0; k < n_species; ++k) {
    std::vector<double> vs(n);
    for (std::size_t i = 0; i < n; ++i) vs[i] = series.values()(i, k);
    polyline(out, x, y, series.times(), vs, kPalette[k % kPaletteSize], false);
  }
  legend(out, n_species);
  out << "</svg>\n";
  return out.str();
}

std::string render_prediction_svg(const ObservationSeries& series, const Matrix& predicted,
                                  const std::string& title) {
  const std::size_t n = series.n_obs();
  const std::size_t n_species = series.n_species();
  if (predicted.rows() != n - 1 || predicted.cols() != n_species)
    throw sglv::Error(sglv::ErrorCode::kDim,
                      "prediction matrix must be (n_obs - 1) x n_species");

  double vmin = 1e300, vmax = -1e300;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n_species; ++k) {
      vmin = std::min(vmin, series.log_values()(i, k));
      vmax = std::max(vmax, series.log_values()(i, k));
    }
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t k = 0; k < n_species; ++k) {
      if (!(predicted(i, k) > 0.0))
        throw sglv::Error(sglv::ErrorCode::kRange, "predictions must be positive");
      vmin = std::min(vmin, std::log(predicted(i, k)));
      vmax = std::max(vmax, std::log(predicted(i, k)));
    }

  const Axis x = make_axis(series.times().front(), series.times().back(), kLeft, kRight);
  const Axis y = make_axis(vmin, vmax, kBottom, kTop);

  std::ostringstream out;
  open_chart(out, title);
  draw_axes(out, x, y);
  Vector pred_times(n - 1);
  for (std::size_t i = 1; i < n; ++i) pred_times[i - 1] = series.times()[i];
  for (std::size_t k = 0; k < n_species; ++k) {
    std::vector<double> obs(n);
    for (std::size_t i = 0; i < n; ++i) obs[i] = series.log_values()(i, k);
    polyline(out, x, y, series.times(), obs, kPalette[k % kPaletteSize], false);
    std::vector<double> pred(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) pred[i] = std::log(predicted(i, k));
    polyline(out, x, y, pred_times, pred, kPalette[k % kPaletteSize], true);
  }
  legend(out, n_species);
  out << "</svg>\n";
  return out.str();
}

}  // namespace sglvcli
