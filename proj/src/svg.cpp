#include "fkmc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fkmc/errors.hpp"

namespace fkmc {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginL = 70.0;
constexpr double kMarginR = 30.0;
constexpr double kMarginT = 50.0;
constexpr double kMarginB = 60.0;

const char* kPalette[] = {"#1f6feb", "#d1242f", "#1a7f37", "#8250df", "#bf5b15", "#0b6e75"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double place(double v, double pix_lo, double pix_hi) const {
        double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
        return pix_lo + t * (pix_hi - pix_lo);
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi));
                 ++e)
                out.push_back(std::pow(10.0, e));
            return out;
        }
        const double span = hi - lo;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            step = m * mag;
            if (step >= raw) break;
        }
        const double first = std::ceil(lo / step) * step;
        for (double v = first; v <= hi + 1e-12 * span; v += step) out.push_back(v);
        return out;
    }
};

Axis make_axis(double lo, double hi, bool log) {
    Axis ax;
    ax.log = log;
    if (log) {
        lo = std::log10(lo);
        hi = std::log10(hi);
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.06 * (hi - lo);
    ax.lo = lo - pad;
    ax.hi = hi + pad;
    return ax;
}

} // namespace

std::string emit_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
    if (series.empty()) throw DomainError("emit_svg: no series");
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw DomainError("emit_svg: series '" + s.name + "' has mismatched x/y sizes");
        if (s.x.empty()) throw DomainError("emit_svg: series '" + s.name + "' is empty");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_x && !(s.x[i] > 0.0))
                throw DomainError("emit_svg: log x-axis but series '" + s.name +
                                  "' has a non-positive x at index " + std::to_string(i));
            if (spec.log_y && !(s.y[i] > 0.0))
                throw DomainError("emit_svg: log y-axis but series '" + s.name +
                                  "' has a non-positive y at index " + std::to_string(i));
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    const Axis ax = make_axis(x_min, x_max, spec.log_x);
    const Axis ay = make_axis(y_min, y_max, spec.log_y);
    const double px_lo = kMarginL;
    const double px_hi = kWidth - kMarginR;
    const double py_lo = kHeight - kMarginB; // SVG y grows downward
    const double py_hi = kMarginT;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape(spec.title) << "</text>\n";

    for (double tx : ax.ticks()) {
        const double px = ax.place(tx, px_lo, px_hi);
        if (px < px_lo - 0.5 || px > px_hi + 0.5) continue;
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << py_lo << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << py_hi << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << py_lo + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(tx) << "</text>\n";
    }
    for (double ty : ay.ticks()) {
        const double py = ay.place(ty, py_lo, py_hi);
        if (py > py_lo + 0.5 || py < py_hi - 0.5) continue;
        out << "<line x1=\"" << px_lo << "\" y1=\"" << fmt(py) << "\" x2=\"" << px_hi
            << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << px_lo - 8 << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ty)
            << "</text>\n";
    }
    out << "<rect x=\"" << px_lo << "\" y=\"" << py_hi << "\" width=\"" << px_hi - px_lo
        << "\" height=\"" << py_lo - py_hi
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << (px_lo + px_hi) / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape(spec.x_label) << "</text>\n";
    out << "<text x=\"20\" y=\"" << (py_lo + py_hi) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 20 " << (py_lo + py_hi) / 2 << ")\">" << escape(spec.y_label)
        << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << fmt(ax.place(s.x[i], px_lo, px_hi)) << ','
                << fmt(ay.place(s.y[i], py_lo, py_hi));
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << "<circle cx=\"" << fmt(ax.place(s.x[i], px_lo, px_hi)) << "\" cy=\""
                << fmt(ay.place(s.y[i], py_lo, py_hi)) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        out << "<text x=\"" << px_hi - 10 << "\" y=\"" << py_hi + 18 + 16 * static_cast<double>(si)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
            << color << "\">" << escape(s.name) << "</text>\n";
    }
    for (std::size_t i = 0; i < spec.annotations.size(); ++i)
        out << "<text x=\"" << px_lo + 10 << "\" y=\"" << py_hi + 18 + 16 * static_cast<double>(i)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">"
            << escape(spec.annotations[i]) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace fkmc
