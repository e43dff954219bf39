#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

// Hand-emitted SVG line plots (log-log), enough for radius-versus-n curves.
// Output is a pure function of the data: fixed canvas, fixed palette, fixed
// number formatting, no timestamps, so identical reports produce
// byte-identical files.

namespace linf {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (x, y), y <= 0 dropped on log axis
    bool dashed = false;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace detail

inline std::string line_plot_svg(const std::string& title, const std::string& x_label,
                                 const std::string& y_label,
                                 const std::vector<PlotSeries>& series) {
    constexpr double W = 880, H = 540;
    constexpr double L = 90, R = 30, T = 50, B = 70;  // margins
    static const char* kPalette[] = {"#1f6fb4", "#d64a33", "#2f8f4e", "#8a52a8",
                                     "#c78f1e", "#4fb8c9", "#777777", "#b03a67",
                                     "#5b5ea6", "#3e7c59"};

    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (!(x > 0.0) || !(y > 0.0)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmin < xmax)) xmax = xmin * 10.0;
    if (!(ymin < ymax)) ymax = ymin * 10.0;
    if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
        xmin = 1.0; xmax = 10.0; ymin = 1.0; ymax = 10.0;
    }

    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
    const double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));
    auto X = [&](double x) { return L + (std::log10(x) - lx0) / (lx1 - lx0) * (W - L - R); };
    auto Y = [&](double y) { return H - B - (std::log10(y) - ly0) / (ly1 - ly0) * (H - T - B); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"17\">" << title << "</text>\n";

    // frame
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
        << H - T - B << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    // decade ticks
    for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
        const double x = std::pow(10.0, e);
        out << "<line x1=\"" << detail::svg_num(X(x)) << "\" y1=\"" << T << "\" x2=\""
            << detail::svg_num(X(x)) << "\" y2=\"" << H - B
            << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << detail::svg_num(X(x)) << "\" y=\"" << H - B + 22
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << detail::tick_label(x) << "</text>\n";
    }
    for (int e = static_cast<int>(ly0); e <= static_cast<int>(ly1); ++e) {
        const double y = std::pow(10.0, e);
        out << "<line x1=\"" << L << "\" y1=\"" << detail::svg_num(Y(y)) << "\" x2=\"" << W - R
            << "\" y2=\"" << detail::svg_num(Y(y)) << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << L - 8 << "\" y=\"" << detail::svg_num(Y(y) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">"
            << detail::tick_label(y) << "</text>\n";
    }

    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << x_label
        << "</text>\n";
    out << "<text x=\"24\" y=\"" << H / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 24 "
        << H / 2 << ")\">" << y_label << "</text>\n";

    // series
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::ostringstream pts;
        for (const auto& [x, y] : series[s].points) {
            if (!(x > 0.0) || !(y > 0.0)) continue;
            pts << detail::svg_num(X(x)) << ',' << detail::svg_num(Y(y)) << ' ';
        }
        out << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\"";
        if (series[s].dashed) out << " stroke-dasharray=\"6,4\"";
        out << "/>\n";
    }

    // legend
    const double lx = W - R - 190, ly = T + 12;
    out << "<rect x=\"" << lx - 10 << "\" y=\"" << ly - 14 << "\" width=\"200\" height=\""
        << 20.0 * series.size() + 8 << "\" fill=\"white\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const double yy = ly + 20.0 * s;
        out << "<line x1=\"" << lx << "\" y1=\"" << yy - 4 << "\" x2=\"" << lx + 26 << "\" y2=\""
            << yy - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
        if (series[s].dashed) out << " stroke-dasharray=\"6,4\"";
        out << "/>\n";
        out << "<text x=\"" << lx + 34 << "\" y=\"" << yy
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace linf
