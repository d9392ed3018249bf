#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace flexmimo {

// Fixed 9-significant-digit formatting so repeated runs emit identical bytes.
std::string format_num(double v);

using CsvRow = std::vector<std::string>;

// First row is the header. LF newlines, no trailing separator.
void write_csv(const std::vector<CsvRow>& rows, const std::filesystem::path& path);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal line chart: axes, one polyline per series, fixed palette.
void write_svg(const std::vector<Series>& series, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::filesystem::path& path);

void write_text_file(const std::string& content, const std::filesystem::path& path);

}  // namespace flexmimo
