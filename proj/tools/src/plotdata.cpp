#include "plotdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gaah::cli {

std::string_view to_string(Observable o) {
  switch (o) {
    case Observable::SP: return "SP";
    case Observable::IPR: return "IPR";
    case Observable::Variance: return "variance";
  }
  return "?";
}

const std::vector<double>& column(const dynamics::Trajectory& t, Observable o) {
  switch (o) {
    case Observable::SP: return t.sp;
    case Observable::IPR: return t.ipr;
    case Observable::Variance: return t.variance;
  }
  return t.sp;
}

namespace {

bool logarithmic(Observable o) { return o != Observable::Variance; }

void check_series(const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("plot data needs at least one trajectory");
  for (const auto& s : series) {
    if (s.trajectory == nullptr || s.trajectory->size() == 0) {
      throw std::invalid_argument("series '" + s.label + "' has no trajectory");
    }
    if (!(s.trajectory->grid == series.front().trajectory->grid)) {
      throw std::invalid_argument("series '" + s.label + "' is on a different time grid");
    }
  }
}

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colors[i % 8];
}

}  // namespace

void write_panel_csv(std::ostream& os, Observable obs, const std::vector<Series>& series,
                     const io::Metadata& meta) {
  check_series(series);
  io::Metadata header = meta;
  header.emplace_back("observable", std::string(to_string(obs)));
  const auto& grid = series.front().trajectory->grid;
  header.emplace_back("grid.dt", io::format_double(grid.dt));
  header.emplace_back("grid.steps", std::to_string(grid.steps));
  io::write_header(os, header);

  const bool logs = logarithmic(obs);
  os << "t";
  for (const auto& s : series) {
    os << ',' << s.label;
    if (logs) os << ",log10_" << s.label;
  }
  os << '\n';
  for (std::size_t i = 0; i < series.front().trajectory->size(); ++i) {
    os << io::format_double(grid.time(i));
    for (const auto& s : series) {
      const double v = column(*s.trajectory, obs)[i];
      os << ',' << io::format_double(v);
      if (logs) os << ',' << io::format_double(std::log10(std::max(v, 1e-300)));
    }
    os << '\n';
  }
}

void write_panel_svg(const std::filesystem::path& path, const std::string& title, Observable obs,
                     const std::vector<Series>& series) {
  check_series(series);
  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 40;
  const auto& grid = series.front().trajectory->grid;
  const bool logs = logarithmic(obs);
  auto yval = [&](double v) { return logs ? std::log10(std::max(v, 1e-12)) : v; };

  double lo = 1e300, hi = -1e300;
  for (const auto& s : series) {
    for (double v : column(*s.trajectory, obs)) {
      lo = std::min(lo, yval(v));
      hi = std::max(hi, yval(v));
    }
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double tmax = grid.t_max();
  auto px = [&](double t) { return L + (W - L - R) * t / tmax; };
  auto py = [&](double y) { return T + (H - T - B) * (hi - y) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\" font-size=\"12\">t (0 to "
      << tmax << ")</text>\n";
  svg << "<text x=\"12\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 " << H / 2
      << ")\">" << (logs ? "log10 " : "") << to_string(obs) << " [" << lo << ", " << hi << "]</text>\n";

  const std::size_t n = series.front().trajectory->size();
  const std::size_t stride = std::max<std::size_t>(1, n / 2000);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& col = column(*series[k].trajectory, obs);
    svg << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << palette(k) << "\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) svg << px(grid.time(i)) << ',' << py(yval(col[i])) << ' ';
    svg << "\"/>\n";
    svg << "<text x=\"" << W - R - 120 << "\" y=\"" << T + 16 + 14 * k << "\" font-size=\"11\" fill=\""
        << palette(k) << "\">" << series[k].label << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << svg.str();
}

void write_grid_svg(const std::filesystem::path& path, const std::string& title,
                    const resonance::DeterminantGrid& grid) {
  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 40;
  const int nr = grid.resolution.re, ni = grid.resolution.im;
  const double cw = (W - L - R) / nr, ch = (H - T - B) / ni;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\" font-size=\"12\">Re E ["
      << grid.region.re_min << ", " << grid.region.re_max << "], Im E [" << grid.region.im_min << ", "
      << grid.region.im_max << "]</text>\n";
  for (int j = 0; j < ni; ++j) {
    for (int i = 0; i < nr; ++i) {
      const std::complex<double> c[4] = {grid.value(i, j), grid.value(i + 1, j), grid.value(i, j + 1),
                                         grid.value(i + 1, j + 1)};
      auto changes = [&](auto part) {
        bool pos = false, neg = false;
        for (const auto& z : c) (part(z) > 0 ? pos : neg) = true;
        return pos && neg;
      };
      const double x = L + i * cw, y = T + (ni - 1 - j) * ch;
      if (changes([](std::complex<double> z) { return z.real(); })) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
            << "\" fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n";
      }
      if (changes([](std::complex<double> z) { return z.imag(); })) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
            << "\" fill=\"#d62728\" fill-opacity=\"0.4\"/>\n";
      }
    }
  }
  svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << svg.str();
}

}  // namespace gaah::cli
