#include "arfrd/svg.hpp"
#include "arfrd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace arfrd {

namespace {

std::string esc(const std::string& s)
{
    std::string o;
    for (char c : s) {
        if (c == '<')
            o += "&lt;";
        else if (c == '>')
            o += "&gt;";
        else if (c == '&')
            o += "&amp;";
        else
            o += c;
    }
    return o;
}

std::vector<double> ticks(double lo, double hi)
{
    double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (span / (step * m) <= 6.0) {
            step *= m;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return t;
}

} // namespace

void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series, double vline)
{
    double xlo = HUGE_VAL, xhi = -HUGE_VAL, ylo = HUGE_VAL, yhi = -HUGE_VAL;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    if (!(xlo < xhi)) {
        xlo -= 1.0;
        xhi += 1.0;
    }
    if (!(ylo < yhi)) {
        ylo -= 1.0;
        yhi += 1.0;
    }
    double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
    const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 55;
    auto px = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };

    std::ofstream f(path);
    if (!f)
        throw DataError("cannot write '" + path + "'");
    f << std::setprecision(6);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << esc(title) << "</text>\n";
    f << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    for (double t : ticks(xlo, xhi))
        f << "<line x1=\"" << px(t) << "\" y1=\"" << H - B << "\" x2=\"" << px(t) << "\" y2=\""
          << H - B + 5 << "\" stroke=\"black\"/><text x=\"" << px(t) << "\" y=\"" << H - B + 18
          << "\" text-anchor=\"middle\">" << t << "</text>\n";
    for (double t : ticks(ylo, yhi))
        f << "<line x1=\"" << L - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << L << "\" y2=\""
          << py(t) << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << py(t) + 4
          << "\" text-anchor=\"end\">" << t << "</text>\n";
    f << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\">" << esc(xlabel) << "</text>\n";
    f << "<text transform=\"translate(16," << (T + (H - T - B) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ylabel) << "</text>\n";
    if (std::isfinite(vline) && vline >= xlo && vline <= xhi)
        f << "<line x1=\"" << px(vline) << "\" y1=\"" << T << "\" x2=\"" << px(vline) << "\" y2=\""
          << H - B << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
    int row = 0;
    for (const auto& s : series) {
        if (s.points) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                    f << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                      << "\" r=\"2\" fill=\"" << s.color << "\" fill-opacity=\"0.6\"/>\n";
        } else {
            std::ostringstream pts;
            pts << std::setprecision(6);
            auto flush = [&] {
                if (!pts.str().empty())
                    f << "<polyline fill=\"none\" stroke=\"" << s.color
                      << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
                pts.str("");
            };
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                    continue;
                if (s.split_at_zero && i > 0 && (s.x[i - 1] < 0.0) != (s.x[i] < 0.0))
                    flush();
                pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            flush();
        }
        double ly = T + 10 + 18 * row++;
        f << "<rect x=\"" << W - R + 12 << "\" y=\"" << ly - 8 << "\" width=\"12\" height=\"4\" fill=\""
          << s.color << "\"/><text x=\"" << W - R + 30 << "\" y=\"" << ly - 2 << "\">"
          << esc(s.label) << "</text>\n";
    }
    f << "</svg>\n";
}

} // namespace arfrd
