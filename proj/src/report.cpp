#include "fgeo/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fgeo/common.hpp"

namespace fgeo::report {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  require(os.good(), "write_json: cannot open " + path.string());
  os << j.dump(2) << "\n";
  require(os.good(), "write_json: write failed for " + path.string());
}

void Csv::add_row(std::initializer_list<double> values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

std::string Csv::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Csv& table) {
  std::ofstream os(path);
  require(os.good(), "write_csv: cannot open " + path.string());
  os << table.to_string();
  require(os.good(), "write_csv: write failed for " + path.string());
}

std::string svg_lineplot(const std::vector<Series>& series,
                         const std::string& x_label,
                         const std::string& y_label) {
  const int width = 640, height = 420, margin = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-300) xmax = xmin + 1;
  if (ymax - ymin < 1e-300) ymax = ymin + 1;
  auto px = [&](double x) {
    return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto py = [&](double y) {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                margin, height - margin, width - margin, height - margin);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                margin, margin, margin, height - margin);
  svg += buf;
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" +
         std::to_string(height - 12) + "\" font-size=\"13\">" + x_label +
         "</text>\n";
  svg += "<text x=\"14\" y=\"" + std::to_string(height / 2) +
         "\" font-size=\"13\" transform=\"rotate(-90 14 " +
         std::to_string(height / 2) + ")\">" + y_label + "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = xmin + (xmax - xmin) * i / 4;
    double yv = ymin + (ymax - ymin) * i / 4;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%d\" font-size=\"10\" text-anchor=\"middle\">%s</text>\n",
                  px(xv), height - margin + 16, format_number(xv).c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%s</text>\n",
                  margin - 6, py(yv) + 3, format_number(yv).c_str());
    svg += buf;
  }
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int ci = 0;
  for (const auto& s : series) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += colors[ci % 4];
    svg += "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : s.points) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
      svg += buf;
    }
    svg += "\"/>\n";
    if (!s.label.empty()) {
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%d\" y=\"%d\" font-size=\"11\" fill=\"%s\">%s</text>\n",
                    width - margin - 150, margin + 16 * (ci + 1), colors[ci % 4],
                    s.label.c_str());
      svg += buf;
    }
    ++ci;
  }
  svg += "</svg>\n";
  return svg;
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream os(path);
  require(os.good(), "write_svg: cannot open " + path.string());
  os << svg;
  require(os.good(), "write_svg: write failed for " + path.string());
}

}  // namespace fgeo::report
