#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "capdrop/errors.hpp"

namespace capdrop::cli {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    return f;
}

std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct Frame {
    double x0, x1, y0, y1;
    double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
    double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

void axes(std::ostream& o, const Frame& f, const PlotStyle& s) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.W << "\" height=\"" << f.H << "\" viewBox=\"0 0 "
      << f.W << ' ' << f.H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << f.W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << escape(s.title) << "</text>\n";
    o << "<rect x=\"" << f.L << "\" y=\"" << f.T << "\" width=\"" << f.W - f.L - f.R << "\" height=\""
      << f.H - f.T - f.B << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 4, y = f.y0 + (f.y1 - f.y0) * i / 4;
        o << "<text x=\"" << short_num(f.px(x)) << "\" y=\"" << f.H - f.B + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << short_num(x) << "</text>\n";
        const std::string lab = s.logy ? "1e" + short_num(y) : short_num(y);
        o << "<text x=\"" << f.L - 6 << "\" y=\"" << short_num(f.py(y) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << lab << "</text>\n";
    }
    o << "<text x=\"" << f.W / 2 << "\" y=\"" << f.H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(s.xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << f.H / 2 << "\" transform=\"rotate(-90 16 " << f.H / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(s.ylabel)
      << "</text>\n";
}

void pad(double& lo, double& hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
}

}  // namespace

std::string fmt(double x) {
    if (!std::isfinite(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json num_array(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw Error("csv header and column count differ");
    auto f = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c) f << (c ? "," : "") << header[c];
    f << "\r\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) f << (c ? "," : "") << fmt(columns[c][r]);
        f << "\r\n";
    }
}

void write_json(const std::string& path, const Json& j) {
    auto f = open_out(path);
    f << j.dump(2) << "\n";
}

void write_line_svg(const std::string& path, const std::vector<Series>& series, const PlotStyle& style) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto yv = [&](double y) { return style.logy ? std::log10(y) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = yv(s.y[i]);
            if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    pad(x0, x1);
    pad(y0, y1);
    Frame f{x0, x1, y0, y1};
    if (style.equal_aspect) {
        const double sx = (x1 - x0) / (f.W - f.L - f.R), sy = (y1 - y0) / (f.H - f.T - f.B);
        if (sx > sy) {
            const double c = 0.5 * (y0 + y1), h = 0.5 * sx * (f.H - f.T - f.B);
            f.y0 = c - h, f.y1 = c + h;
        } else {
            const double c = 0.5 * (x0 + x1), w = 0.5 * sy * (f.W - f.L - f.R);
            f.x0 = c - w, f.x1 = c + w;
        }
    }
    std::ostringstream o;
    axes(o, f, style);
    for (std::size_t k = 0; k < series.size(); ++k) {
        o << "<polyline fill=\"none\" stroke=\"" << kColors[k % 5] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            const double y = yv(series[k].y[i]);
            if (!std::isfinite(y)) continue;
            o << short_num(f.px(series[k].x[i])) << ',' << short_num(f.py(y)) << ' ';
        }
        o << "\"/>\n";
        if (!series[k].label.empty())
            o << "<text x=\"" << f.W - f.R - 8 << "\" y=\"" << f.T + 16 + 16 * k << "\" text-anchor=\"end\" fill=\""
              << kColors[k % 5] << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(series[k].label)
              << "</text>\n";
    }
    o << "</svg>\n";
    auto file = open_out(path);
    file << o.str();
}

void write_stem_svg(const std::string& path, const std::vector<double>& values, const PlotStyle& style) {
    double y0 = 0.0, y1 = 0.0;
    for (double v : values)
        if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    pad(y0, y1);
    Frame f{-0.5, values.size() - 0.5, y0, y1};
    std::ostringstream o;
    axes(o, f, style);
    o << "<line x1=\"" << f.L << "\" x2=\"" << f.W - f.R << "\" y1=\"" << short_num(f.py(0)) << "\" y2=\""
      << short_num(f.py(0)) << "\" stroke=\"gray\"/>\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) continue;
        const double x = f.px(static_cast<double>(k));
        o << "<line x1=\"" << short_num(x) << "\" x2=\"" << short_num(x) << "\" y1=\"" << short_num(f.py(0))
          << "\" y2=\"" << short_num(f.py(values[k])) << "\" stroke=\"" << kColors[0] << "\"/>\n";
        o << "<circle cx=\"" << short_num(x) << "\" cy=\"" << short_num(f.py(values[k]))
          << "\" r=\"3.5\" fill=\"" << kColors[0] << "\"/>\n";
    }
    o << "</svg>\n";
    auto file = open_out(path);
    file << o.str();
}

}  // namespace capdrop::cli
