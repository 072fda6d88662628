#pragma once

// Minimal SVG line-chart writer for report plots. File output only; the
// consumers are scripts and CI, not interactive sessions.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oolink::plot {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    double y_min_clamp = std::nan("");
    double y_max_clamp = std::nan("");
};

inline void write_svg(const std::string& path, const ChartSpec& spec,
                      const std::vector<Series>& series) {
    if (series.empty()) throw std::runtime_error("plot: no series");
    const int w = 760, h = 520;
    const int ml = 70, mr = 170, mt = 44, mb = 54;
    const double pw = w - ml - mr, ph = h - mt - mb;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            double yy = spec.log_y ? std::log10(std::max(y, 1e-12)) : y;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, yy);
            ymax = std::max(ymax, yy);
        }
    if (!std::isnan(spec.y_min_clamp))
        ymin = spec.log_y ? std::log10(spec.y_min_clamp) : spec.y_min_clamp;
    if (!std::isnan(spec.y_max_clamp))
        ymax = spec.log_y ? std::log10(spec.y_max_clamp) : spec.y_max_clamp;
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) {
        double yy = spec.log_y ? std::log10(std::max(y, 1e-12)) : y;
        yy = std::clamp(yy, ymin, ymax);
        return mt + (ymax - yy) / (ymax - ymin) * ph;
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ofstream f(path);
    if (!f) throw std::runtime_error("plot: cannot open " + path);
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    f << "<rect width='100%' height='100%' fill='white'/>\n";
    f << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>"
      << spec.title << "</text>\n";

    // frame + grid with ticks
    f << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
      << "' fill='none' stroke='black'/>\n";
    const int nx = 8, ny = 8;
    for (int i = 0; i <= nx; ++i) {
        double x = xmin + (xmax - xmin) * i / nx;
        f << "<line x1='" << px(x) << "' y1='" << mt << "' x2='" << px(x) << "' y2='"
          << mt + ph << "' stroke='#dddddd'/>\n";
        f << "<text x='" << px(x) << "' y='" << mt + ph + 18
          << "' text-anchor='middle' font-size='11'>" << x << "</text>\n";
    }
    for (int i = 0; i <= ny; ++i) {
        double yy = ymin + (ymax - ymin) * i / ny;
        double ypix = mt + (ymax - yy) / (ymax - ymin) * ph;
        f << "<line x1='" << ml << "' y1='" << ypix << "' x2='" << ml + pw << "' y2='" << ypix
          << "' stroke='#dddddd'/>\n";
        char buf[48];
        if (spec.log_y)
            std::snprintf(buf, sizeof(buf), "1e%.2g", yy);
        else
            std::snprintf(buf, sizeof(buf), "%.3g", yy);
        f << "<text x='" << ml - 6 << "' y='" << ypix + 4
          << "' text-anchor='end' font-size='11'>" << buf << "</text>\n";
    }
    f << "<text x='" << ml + pw / 2 << "' y='" << h - 12
      << "' text-anchor='middle' font-size='13'>" << spec.x_label << "</text>\n";
    f << "<text x='18' y='" << mt + ph / 2 << "' text-anchor='middle' font-size='13' "
      << "transform='rotate(-90 18 " << mt + ph / 2 << ")'>" << spec.y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % 8];
        f << "<polyline fill='none' stroke='" << color << "' stroke-width='1.8' points='";
        for (auto [x, y] : series[s].points) f << px(x) << "," << py(y) << " ";
        f << "'/>\n";
        for (auto [x, y] : series[s].points)
            f << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='2.6' fill='" << color
              << "'/>\n";
        double ly = mt + 16.0 + 18.0 * s;
        f << "<line x1='" << ml + pw + 10 << "' y1='" << ly << "' x2='" << ml + pw + 34
          << "' y2='" << ly << "' stroke='" << color << "' stroke-width='2'/>\n";
        f << "<text x='" << ml + pw + 40 << "' y='" << ly + 4 << "' font-size='12'>"
          << series[s].label << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace oolink::plot
