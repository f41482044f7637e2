#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "onionlab/error.hpp"
#include "onionlab/io.hpp"

namespace onionlab {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series, bool log_axes) {
  constexpr double W = 640, Hh = 420, L = 70, R = 20, T = 40, B = 60;
  auto tx = [&](double v) { return log_axes ? std::log10(v) : v; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidInput("write_svg_plot: series '" + s.label + "' has unequal lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_axes && (s.x[i] <= 0.0 || s.y[i] <= 0.0)) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, tx(s.y[i]));
      y1 = std::max(y1, tx(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return Hh - B - (tx(v) - y0) / (y1 - y0) * (Hh - T - B); };

  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << Hh - B << "\" x2=\"" << W - R << "\" y2=\"" << Hh - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << Hh - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double sx = L + (W - L - R) * i / 4.0, sy = Hh - B - (Hh - T - B) * i / 4.0;
    out << "<text x=\"" << sx << "\" y=\"" << Hh - B + 16 << "\" text-anchor=\"middle\">"
        << num(log_axes ? std::pow(10.0, fx) : fx) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
        << num(log_axes ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << Hh - 20 << "\" text-anchor=\"middle\">" << escape(x_label)
      << "</text>\n";
  out << "<text transform=\"translate(16," << (T + Hh - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (log_axes && (series[s].x[i] <= 0.0 || series[s].y[i] <= 0.0)) continue;
      out << num(px(series[s].x[i])) << ',' << num(py(series[s].y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" text-anchor=\"end\" fill=\"" << color
        << "\">" << escape(series[s].label) << "</text>\n";
  }
  out << "</svg>\n";
  out.close();
  if (!out) throw Error("write to " + path + " failed");
}

}  // namespace onionlab
