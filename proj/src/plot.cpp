#include "cbh/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cbh {

namespace {

constexpr double kW = 640, kH = 420, kL = 70, kR = 150, kT = 40, kB = 55;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void header(std::ostringstream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << num(kW / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
       << "</text>\n";
}

}  // namespace

std::string svg_line_chart(const PlotSpec& spec) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (spec.log_x && !(s.x[i] > 0))) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (std::isfinite(spec.reference_y)) {
        y0 = std::min(y0, spec.reference_y);
        y1 = std::max(y1, spec.reference_y);
    }
    if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
    if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double pw = kW - kL - kR, ph = kH - kT - kB;
    auto px = [&](double x) { return kL + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kT + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream os;
    header(os, spec.title);
    os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = kL + pw * k / 4.0;
        const double sy = kT + ph * (1.0 - k / 4.0);
        os << "<text x=\"" << num(sx) << "\" y=\"" << num(kT + ph + 16) << "\" text-anchor=\"middle\">"
           << tick(spec.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        os << "<text x=\"" << num(kL - 6) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">" << tick(fy)
           << "</text>\n";
    }
    os << "<text x=\"" << num(kL + pw / 2) << "\" y=\"" << num(kH - 12) << "\" text-anchor=\"middle\">"
       << esc(spec.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(kT + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(kT + ph / 2) << ")\">" << esc(spec.y_label) << "</text>\n";
    if (std::isfinite(spec.reference_y)) {
        os << "<line x1=\"" << kL << "\" x2=\"" << kL + pw << "\" y1=\"" << num(py(spec.reference_y)) << "\" y2=\""
           << num(py(spec.reference_y)) << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
    }
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kPalette[k % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\""
           << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (spec.log_x && !(s.x[i] > 0))) continue;
            os << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
        }
        os << "\"/>\n";
        const double ly = kT + 14 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << kL + pw + 10 << "\" x2=\"" << kL + pw + 34 << "\" y1=\"" << num(ly) << "\" y2=\""
           << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
           << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        os << "<text x=\"" << kL + pw + 40 << "\" y=\"" << num(ly + 4) << "\">" << esc(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<PlotSeries>& series) {
    double ymax = 0.0;
    for (const auto& s : series) {
        for (double y : s.y) {
            if (std::isfinite(y)) ymax = std::max(ymax, y);
        }
    }
    if (!(ymax > 0)) ymax = 1.0;
    const double pw = kW - kL - kR, ph = kH - kT - kB;
    const double group = pw / std::max<std::size_t>(1, categories.size());
    const double bar = 0.8 * group / std::max<std::size_t>(1, series.size());

    std::ostringstream os;
    header(os, title);
    os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double sy = kT + ph * (1.0 - k / 4.0);
        os << "<text x=\"" << num(kL - 6) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">"
           << tick(ymax * k / 4.0) << "</text>\n";
    }
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double gx = kL + group * static_cast<double>(c);
        os << "<text x=\"" << num(gx + group / 2) << "\" y=\"" << num(kT + ph + 16) << "\" text-anchor=\"middle\">"
           << esc(categories[c]) << "</text>\n";
        for (std::size_t k = 0; k < series.size(); ++k) {
            if (c >= series[k].y.size() || !std::isfinite(series[k].y[c])) continue;
            const double h = series[k].y[c] / ymax * ph;
            os << "<rect x=\"" << num(gx + 0.1 * group + bar * static_cast<double>(k)) << "\" y=\""
               << num(kT + ph - h) << "\" width=\"" << num(bar) << "\" height=\"" << num(h) << "\" fill=\""
               << kPalette[k % 6] << "\"/>\n";
        }
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double ly = kT + 14 + 18.0 * static_cast<double>(k);
        os << "<rect x=\"" << kL + pw + 10 << "\" y=\"" << num(ly - 6) << "\" width=\"24\" height=\"10\" fill=\""
           << kPalette[k % 6] << "\"/>\n";
        os << "<text x=\"" << kL + pw + 40 << "\" y=\"" << num(ly + 4) << "\">" << esc(series[k].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace cbh
