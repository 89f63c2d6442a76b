#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rcmsim/simulation.hpp"

namespace rcmsim {

/// Minimal static line-plot writer producing standalone SVG files. NaN
/// samples break the polyline, which is how inconclusive stretches of
/// gamma_hat show up as gaps.
class SvgLinePlot {
 public:
  SvgLinePlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)),
        xlabel_(std::move(xlabel)),
        ylabel_(std::move(ylabel)) {}

  void add_series(std::string name, std::vector<double> x,
                  std::vector<double> y) {
    if (x.size() != y.size()) {
      throw std::invalid_argument("plot series size mismatch for " + name);
    }
    series_.push_back({std::move(name), std::move(x), std::move(y)});
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << render();
    if (!out) throw std::runtime_error("write failed: " + path);
  }

  std::string render() const {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const Series& s : series_) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
    if (!(xmin <= xmax)) {  // no finite data at all
      xmin = 0.0;
      xmax = 1.0;
      ymin = 0.0;
      ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
      ymax = ymin + (ymin == 0.0 ? 1.0 : std::abs(ymin) * 0.1);
      ymin = ymin - (ymax - ymin);
    }

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
        << "' height='" << kHeight << "' viewBox='0 0 " << kWidth << " "
        << kHeight << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << kWidth / 2 << "' y='24' font-size='16' "
        << "text-anchor='middle' font-family='sans-serif'>" << escape(title_)
        << "</text>\n";

    // plot frame
    svg << "<rect x='" << kLeft << "' y='" << kTop << "' width='"
        << plot_w() << "' height='" << plot_h()
        << "' fill='none' stroke='black'/>\n";

    for (double tx : ticks(xmin, xmax)) {
      const double px = map_x(tx, xmin, xmax);
      svg << "<line x1='" << px << "' y1='" << kTop + plot_h() << "' x2='"
          << px << "' y2='" << kTop + plot_h() + 5 << "' stroke='black'/>\n";
      svg << "<text x='" << px << "' y='" << kTop + plot_h() + 20
          << "' font-size='11' text-anchor='middle' "
          << "font-family='sans-serif'>" << tick_label(tx) << "</text>\n";
      svg << "<line x1='" << px << "' y1='" << kTop << "' x2='" << px
          << "' y2='" << kTop + plot_h()
          << "' stroke='#dddddd' stroke-width='0.5'/>\n";
    }
    for (double ty : ticks(ymin, ymax)) {
      const double py = map_y(ty, ymin, ymax);
      svg << "<line x1='" << kLeft - 5 << "' y1='" << py << "' x2='" << kLeft
          << "' y2='" << py << "' stroke='black'/>\n";
      svg << "<text x='" << kLeft - 8 << "' y='" << py + 4
          << "' font-size='11' text-anchor='end' font-family='sans-serif'>"
          << tick_label(ty) << "</text>\n";
      svg << "<line x1='" << kLeft << "' y1='" << py << "' x2='"
          << kLeft + plot_w() << "' y2='" << py
          << "' stroke='#dddddd' stroke-width='0.5'/>\n";
    }

    svg << "<text x='" << kLeft + plot_w() / 2 << "' y='" << kHeight - 10
        << "' font-size='13' text-anchor='middle' font-family='sans-serif'>"
        << escape(xlabel_) << "</text>\n";
    svg << "<text x='16' y='" << kTop + plot_h() / 2
        << "' font-size='13' text-anchor='middle' font-family='sans-serif' "
        << "transform='rotate(-90 16 " << kTop + plot_h() / 2 << ")'>"
        << escape(ylabel_) << "</text>\n";

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};
    for (std::size_t si = 0; si < series_.size(); ++si) {
      const Series& s = series_[si];
      const char* color = kColors[si % 6];
      std::ostringstream points;
      bool open = false;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          if (open) {
            svg << "<polyline fill='none' stroke='" << color
                << "' stroke-width='1.3' points='" << points.str() << "'/>\n";
            points.str("");
            open = false;
          }
          continue;
        }
        points << map_x(s.x[i], xmin, xmax) << ',' << map_y(s.y[i], ymin, ymax)
               << ' ';
        open = true;
      }
      if (open) {
        svg << "<polyline fill='none' stroke='" << color
            << "' stroke-width='1.3' points='" << points.str() << "'/>\n";
      }
      // legend
      const double ly = kTop + 16 + 18 * static_cast<double>(si);
      svg << "<line x1='" << kLeft + plot_w() - 150 << "' y1='" << ly
          << "' x2='" << kLeft + plot_w() - 126 << "' y2='" << ly
          << "' stroke='" << color << "' stroke-width='2'/>\n";
      svg << "<text x='" << kLeft + plot_w() - 120 << "' y='" << ly + 4
          << "' font-size='12' font-family='sans-serif'>" << escape(s.name)
          << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
  }

 private:
  struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
  };

  static constexpr double kWidth = 860.0;
  static constexpr double kHeight = 520.0;
  static constexpr double kLeft = 70.0;
  static constexpr double kTop = 40.0;
  static constexpr double kRight = 20.0;
  static constexpr double kBottom = 50.0;

  static double plot_w() { return kWidth - kLeft - kRight; }
  static double plot_h() { return kHeight - kTop - kBottom; }

  static double map_x(double v, double lo, double hi) {
    return kLeft + (v - lo) / (hi - lo) * plot_w();
  }
  static double map_y(double v, double lo, double hi) {
    return kTop + plot_h() - (v - lo) / (hi - lo) * plot_h();
  }

  // ~5 round-valued ticks (1/2/5 steps)
  static std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (raw <= m * mag) {
        step = m * mag;
        break;
      }
    }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step;
         v += step) {
      out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    }
    return out;
  }

  static std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
      }
    }
    return out;
  }

  std::string title_;
  std::string xlabel_;
  std::string ylabel_;
  std::vector<Series> series_;
};

/// Writes the four standard run plots (force, RCM error, gamma criterion,
/// instrument path) next to `stem`, returning the file paths.
inline std::vector<std::string> write_standard_plots(const SimLog& log,
                                                     const std::string& stem) {
  if (log.records.empty()) {
    throw ConfigError("no records: cannot plot an empty log");
  }
  const std::size_t n = log.records.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = log.records[i].t;

  std::vector<std::string> written;
  {
    std::vector<double> f_true(n), f_hat(n);
    for (std::size_t i = 0; i < n; ++i) {
      f_true[i] = log.records[i].f_rcm_true.norm();
      f_hat[i] = log.records[i].f_rcm_hat.norm();
    }
    SvgLinePlot p("RCM interaction force", "time [s]", "|f_rcm| [N]");
    p.add_series("truth", t, f_true);
    p.add_series("estimate", t, f_hat);
    p.write(stem + ".force.svg");
    written.push_back(stem + ".force.svg");
  }
  {
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = log.records[i].e_rcm;
    SvgLinePlot p("Trocar-RCM distance", "time [s]", "e_rcm [m]");
    p.add_series("e_rcm", t, e);
    p.write(stem + ".e_rcm.svg");
    written.push_back(stem + ".e_rcm.svg");
  }
  {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = log.records[i].gamma_hat;
    SvgLinePlot p("Load location criterion", "time [s]", "gamma_hat [-]");
    p.add_series("gamma_hat", t, g);
    p.write(stem + ".gamma.svg");
    written.push_back(stem + ".gamma.svg");
  }
  {
    // project instrument/desired paths onto the two axes the desired path
    // moves in most
    Vec3 mean = Vec3::Zero();
    for (const SimRecord& r : log.records) mean += r.x_des;
    mean /= static_cast<double>(n);
    Vec3 var = Vec3::Zero();
    for (const SimRecord& r : log.records) {
      var += (r.x_des - mean).cwiseAbs2();
    }
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int a, int b) { return var[a] > var[b]; });
    const int a0 = std::min(order[0], order[1]);
    const int a1 = std::max(order[0], order[1]);
    const char* axis_name[] = {"x [m]", "y [m]", "z [m]"};
    std::vector<double> ia(n), ib(n), da(n), db(n);
    for (std::size_t i = 0; i < n; ++i) {
      ia[i] = log.records[i].x_ins[a0];
      ib[i] = log.records[i].x_ins[a1];
      da[i] = log.records[i].x_des[a0];
      db[i] = log.records[i].x_des[a1];
    }
    SvgLinePlot p("Instrument path vs desired", axis_name[a0], axis_name[a1]);
    p.add_series("desired", da, db);
    p.add_series("instrument", ia, ib);
    p.write(stem + ".path.svg");
    written.push_back(stem + ".path.svg");
  }
  return written;
}

}  // namespace rcmsim
