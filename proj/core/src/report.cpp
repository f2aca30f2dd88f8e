#include "levyou/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "levyou/errors.hpp"

namespace levyou {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw InvalidInput("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw InvalidInput("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out_ << fields[i] << (i + 1 < fields.size() ? "," : "\n");
    }
}

CsvWriter::~CsvWriter() = default;

namespace {

constexpr double kW = 640.0, kH = 480.0;
constexpr double kMarginL = 70.0, kMarginR = 20.0, kMarginT = 40.0, kMarginB = 50.0;

double map_coord(double v, double lo, double hi, double out_lo, double out_hi) {
    if (hi <= lo) return 0.5 * (out_lo + out_hi);
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
}

// "Nice" tick positions across [lo, hi] in transformed units.
std::vector<double> ticks(double lo, double hi, bool log_scale) {
    std::vector<double> out;
    if (log_scale) {
        const int k0 = static_cast<int>(std::floor(lo));
        const int k1 = static_cast<int>(std::ceil(hi));
        for (int k = k0; k <= k1; ++k) out.push_back(static_cast<double>(k));
    } else {
        const double span = hi - lo;
        if (span <= 0) return {lo};
        const double raw = span / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        if (raw / mag > 5.0) {
            step = 10.0 * mag;
        } else if (raw / mag > 2.0) {
            step = 5.0 * mag;
        } else if (raw / mag > 1.0) {
            step = 2.0 * mag;
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, bool log_x, bool log_y,
                    const std::optional<SlopeFit>& fit) {
    auto tx = [log_x](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };

    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_x && !(s.x[i] > 0)) continue;
            if (log_y && !(s.y[i] > 0)) continue;
            xlo = std::min(xlo, tx(s.x[i]));
            xhi = std::max(xhi, tx(s.x[i]));
            ylo = std::min(ylo, ty(s.y[i]));
            yhi = std::max(yhi, ty(s.y[i]));
        }
    }
    if (xhi < xlo) {
        xlo = 0;
        xhi = 1;
        ylo = 0;
        yhi = 1;
    }
    const double xpad = 0.05 * (xhi - xlo + 1e-12);
    const double ypad = 0.05 * (yhi - ylo + 1e-12);
    xlo -= xpad;
    xhi += xpad;
    ylo -= ypad;
    yhi += ypad;

    auto px = [&](double v) { return map_coord(tx(v), xlo, xhi, kMarginL, kW - kMarginR); };
    auto py = [&](double v) { return map_coord(ty(v), ylo, yhi, kH - kMarginB, kMarginT); };

    std::ofstream out(path);
    if (!out) throw InvalidInput("write_svg_plot: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
        << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";

    // axes
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kH - kMarginB << "\" x2=\""
        << kW - kMarginR << "\" y2=\"" << kH - kMarginB
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL
        << "\" y2=\"" << kH - kMarginB << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (double v : ticks(xlo, xhi, log_x)) {
        const double X = map_coord(v, xlo, xhi, kMarginL, kW - kMarginR);
        if (X < kMarginL - 0.5 || X > kW - kMarginR + 0.5) continue;
        out << "<line x1=\"" << X << "\" y1=\"" << kH - kMarginB << "\" x2=\"" << X
            << "\" y2=\"" << kH - kMarginB + 5 << "\" stroke=\"black\"/>\n";
        const double label = log_x ? std::pow(10.0, v) : v;
        out << "<text x=\"" << X << "\" y=\"" << kH - kMarginB + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << format_number(label)
            << "</text>\n";
    }
    for (double v : ticks(ylo, yhi, log_y)) {
        const double Y = map_coord(v, ylo, yhi, kH - kMarginB, kMarginT);
        if (Y < kMarginT - 0.5 || Y > kH - kMarginB + 0.5) continue;
        out << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << Y << "\" x2=\"" << kMarginL
            << "\" y2=\"" << Y << "\" stroke=\"black\"/>\n";
        const double label = log_y ? std::pow(10.0, v) : v;
        out << "<text x=\"" << kMarginL - 8 << "\" y=\"" << Y + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << format_number(label)
            << "</text>\n";
    }
    out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << kH / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << kH / 2 << ")\">" << y_label << "</text>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    int ci = 0;
    double legend_y = kMarginT + 8;
    for (const auto& s : series) {
        const char* color = colors[ci % 4];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((log_x && !(s.x[i] > 0)) || (log_y && !(s.y[i] > 0))) continue;
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((log_x && !(s.x[i] > 0)) || (log_y && !(s.y[i] > 0))) continue;
            out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        if (!s.label.empty()) {
            out << "<text x=\"" << kW - kMarginR - 8 << "\" y=\"" << legend_y
                << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">"
                << s.label << "</text>\n";
            legend_y += 16;
        }
        ++ci;
    }

    if (fit && log_x && log_y && !series.empty() && series[0].x.size() >= 2) {
        // Draw the fitted power law across the first series' range.
        const double x0 = *std::min_element(series[0].x.begin(), series[0].x.end());
        const double x1 = *std::max_element(series[0].x.begin(), series[0].x.end());
        const double y0 = std::exp(fit->intercept + fit->slope * std::log(x0));
        const double y1 = std::exp(fit->intercept + fit->slope * std::log(x1));
        out << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1)
            << "\" y2=\"" << py(y1)
            << "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"6 3\"/>\n";
        std::ostringstream ann;
        ann << "slope " << std::setprecision(3) << fit->slope << ", R^2 "
            << std::setprecision(3) << fit->r2;
        out << "<text x=\"" << kW - kMarginR - 8 << "\" y=\"" << legend_y
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#555555\">" << ann.str()
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace levyou
