#pragma once

// Deterministic report emission: JSON, CSV tables, and SVG line-plot data.
// Identical inputs produce byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fgeo::report {

std::string format_number(double v);  // %.12g, canonical for all tables

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::initializer_list<double> values);
  std::string to_string() const;
};
void write_csv(const std::filesystem::path& path, const Csv& table);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
// Minimal line plot: axes, tick labels, one polyline per series.
std::string svg_lineplot(const std::vector<Series>& series,
                         const std::string& x_label,
                         const std::string& y_label);
void write_svg(const std::filesystem::path& path, const std::string& svg);

}  // namespace fgeo::report
