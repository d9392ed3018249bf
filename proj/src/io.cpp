#include "flexmimo/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace flexmimo {

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_text_file(const std::string& content, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);  // binary: LF newlines everywhere
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_csv(const std::vector<CsvRow>& rows, const std::filesystem::path& path) {
    std::string out;
    for (const CsvRow& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    write_text_file(out, path);
}

namespace {

constexpr int kWidth = 640, kHeight = 480;
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_svg(const std::vector<Series>& series, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::filesystem::path& path) {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool have_data = false;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!have_data) {
                x_min = x_max = s.x[i];
                y_min = y_max = s.y[i];
                have_data = true;
            } else {
                x_min = std::min(x_min, s.x[i]);
                x_max = std::max(x_max, s.x[i]);
                y_min = std::min(y_min, s.y[i]);
                y_max = std::max(y_max, s.y[i]);
            }
        }
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return kMarginTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + title + "</text>\n";
    // Axes.
    svg += "<line x1=\"" + fmt_px(kMarginLeft) + "\" y1=\"" + fmt_px(kMarginTop) + "\" x2=\"" +
           fmt_px(kMarginLeft) + "\" y2=\"" + fmt_px(kHeight - kMarginBottom) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_px(kMarginLeft) + "\" y1=\"" + fmt_px(kHeight - kMarginBottom) +
           "\" x2=\"" + fmt_px(kWidth - kMarginRight) + "\" y2=\"" +
           fmt_px(kHeight - kMarginBottom) + "\" stroke=\"black\"/>\n";
    // Range labels.
    svg += "<text x=\"" + fmt_px(kMarginLeft) + "\" y=\"" + fmt_px(kHeight - kMarginBottom + 18) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + format_num(x_min) + "</text>\n";
    svg += "<text x=\"" + fmt_px(kWidth - kMarginRight) + "\" y=\"" +
           fmt_px(kHeight - kMarginBottom + 18) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_num(x_max) + "</text>\n";
    svg += "<text x=\"" + fmt_px(kMarginLeft - 6) + "\" y=\"" + fmt_px(kHeight - kMarginBottom) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_num(y_min) + "</text>\n";
    svg += "<text x=\"" + fmt_px(kMarginLeft - 6) + "\" y=\"" + fmt_px(kMarginTop + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_num(y_max) + "</text>\n";
    svg += "<text x=\"" + fmt_px(kMarginLeft + plot_w / 2) + "\" y=\"" +
           fmt_px(kHeight - 12) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt_px(kMarginTop + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " + fmt_px(kMarginTop + plot_h / 2) + ")\">" + y_label +
           "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const Series& ser = series[s];
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string pts;
        for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
            if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
            if (!pts.empty()) pts += ' ';
            pts += fmt_px(px(ser.x[i])) + "," + fmt_px(py(ser.y[i]));
        }
        if (!pts.empty())
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        svg += "<text x=\"" + fmt_px(kWidth - kMarginRight - 6) + "\" y=\"" +
               fmt_px(kMarginTop + 16 + 16 * static_cast<double>(s)) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
               color + "\">" + ser.name + "</text>\n";
    }
    svg += "</svg>\n";
    write_text_file(svg, path);
}

}  // namespace flexmimo
