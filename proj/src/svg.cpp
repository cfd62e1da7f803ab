#include "lossforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lossforge/errors.hpp"

namespace lossforge::svg {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 60;

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double map(double v, double pix_lo, double pix_hi) const {
        double t;
        if (log)
            t = (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        else
            t = (v - lo) / (hi - lo);
        return pix_lo + t * (pix_hi - pix_lo);
    }
};

void expand(Axis& axis, const std::vector<double>& values) {
    for (const double v : values) {
        if (!std::isfinite(v)) continue;
        if (axis.log && !(v > 0.0)) continue;
        axis.lo = std::min(axis.lo, v);
        axis.hi = std::max(axis.hi, v);
    }
}

std::string esc(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">"
        << esc(title) << "</text>\n";
}

void axes_labels(std::ostringstream& out, const ChartSpec& spec, const Axis& ax, const Axis& ay) {
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << kWidth - kMarginLeft - kMarginRight << "\" height=\""
        << kHeight - kMarginTop - kMarginBottom
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
        << esc(spec.xlabel) << "</text>\n";
    out << "<text x=\"18\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 "
        << kHeight / 2 << ")\">" << esc(spec.ylabel) << "</text>\n";
    // Corner range annotations keep the plot self-describing without a full
    // tick engine.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g .. %.3g", ax.lo, ax.hi);
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - 34
        << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"#444\">x: " << buf
        << (ax.log ? " (log)" : "") << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g .. %.3g", ay.lo, ay.hi);
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << kMarginTop - 8
        << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"#444\">y: " << buf
        << (ay.log ? " (log)" : "") << "</text>\n";
}

void save(const std::filesystem::path& path, const std::ostringstream& out) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) fail_validation("file-unwritable", "cannot write '" + path.string() + "'");
    file << out.str() << "</svg>\n";
}

} // namespace

void write_chart(const std::filesystem::path& path, const ChartSpec& spec,
                 const std::vector<Series>& series) {
    Axis ax{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            spec.logx};
    Axis ay{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            spec.logy};
    for (const auto& s : series) {
        expand(ax, s.x);
        expand(ay, s.y);
    }
    if (!(ax.lo < ax.hi)) ax.hi = ax.lo + 1.0;
    if (!(ay.lo < ay.hi)) ay.hi = ay.lo + 1.0;

    std::ostringstream out;
    open_svg(out, spec.title);
    axes_labels(out, spec, ax, ay);
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop; // inverted y
    int legend_row = 0;
    for (const auto& s : series) {
        if (s.line && s.x.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (spec.logx && !(s.x[i] > 0)) continue;
                if (spec.logy && !(s.y[i] > 0)) continue;
                out << ax.map(s.x[i], x0, x1) << ',' << ay.map(s.y[i], y0, y1) << ' ';
            }
            out << "\"/>\n";
        }
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (spec.logx && !(s.x[i] > 0)) continue;
                if (spec.logy && !(s.y[i] > 0)) continue;
                out << "<circle cx=\"" << ax.map(s.x[i], x0, x1) << "\" cy=\""
                    << ay.map(s.y[i], y0, y1) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
            }
        }
        if (!s.name.empty()) {
            out << "<text x=\"" << x1 - 150 << "\" y=\"" << y1 + 16 + 16 * legend_row
                << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << s.color << "\">"
                << esc(s.name) << "</text>\n";
            ++legend_row;
        }
    }
    save(path, out);
}

void write_heatmap(const std::filesystem::path& path, const ChartSpec& spec,
                   const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::vector<std::vector<double>>& z, double z_max) {
    Axis ax{xs.front(), xs.back(), true};
    Axis ay{ys.front(), ys.back(), true};
    std::ostringstream out;
    open_svg(out, spec.title);
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    const double cell_w = (x1 - x0) / static_cast<double>(xs.size());
    const double cell_h = (y0 - y1) / static_cast<double>(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double v = std::clamp(z[i][j] / z_max, 0.0, 1.0);
            // Blue (resolvable) to red (not) through white at the threshold.
            const int r = static_cast<int>(255 * v);
            const int b = static_cast<int>(255 * (1.0 - v));
            const double px = ax.map(xs[i], x0, x1) - cell_w / 2;
            const double py = ay.map(ys[j], y0, y1) - cell_h / 2;
            out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell_w + 0.5
                << "\" height=\"" << cell_h + 0.5 << "\" fill=\"rgb(" << r << ",64," << b
                << ")\"/>\n";
        }
    }
    axes_labels(out, spec, ax, ay);
    save(path, out);
}

void write_complex_plane(const std::filesystem::path& path, const std::string& title,
                         const std::vector<std::complex<double>>& data,
                         const std::vector<std::complex<double>>& model) {
    Series pts;
    pts.name = "data";
    pts.line = false;
    pts.markers = true;
    pts.color = "#1f77b4";
    for (const auto& z : data) {
        pts.x.push_back(z.real());
        pts.y.push_back(z.imag());
    }
    Series fit;
    fit.name = "fit";
    fit.color = "#d62728";
    for (const auto& z : model) {
        fit.x.push_back(z.real());
        fit.y.push_back(z.imag());
    }
    ChartSpec spec;
    spec.title = title;
    spec.xlabel = "Re S21";
    spec.ylabel = "Im S21";
    write_chart(path, spec, {pts, fit});
}

} // namespace lossforge::svg
