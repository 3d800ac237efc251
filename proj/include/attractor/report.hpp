#pragma once

// CSV reports with '#'-prefixed provenance headers, the run manifest, and
// deterministic SVG plots. Numeric formatting is fixed (%.17g) so identical
// runs produce byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "attractor/core.hpp"
#include "attractor/errors.hpp"

namespace attractor {

inline constexpr const char* kVersion = "attractor-lab 0.1.0";

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::string config_hash, std::uint64_t seed) {
    header_lines_.push_back("# " + std::string(kVersion));
    header_lines_.push_back("# config_hash: " + config_hash);
    header_lines_.push_back("# seed: " + std::to_string(seed));
  }

  void comment(const std::string& line) { header_lines_.push_back("# " + line); }

  void columns(const std::vector<std::string>& names) {
    std::string line;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) line += ",";
      line += names[i];
    }
    rows_.push_back(line);
  }

  void row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += ",";
      line += fmt(values[i]);
    }
    rows_.push_back(line);
  }

  void row_mixed(const std::vector<std::string>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += ",";
      line += values[i];
    }
    rows_.push_back(line);
  }

  std::string str() const {
    std::string out;
    for (const auto& l : header_lines_) out += l + "\n";
    for (const auto& l : rows_) out += l + "\n";
    return out;
  }

 private:
  std::vector<std::string> header_lines_;
  std::vector<std::string> rows_;
};

// Collects artifacts, writes them under the output directory, and emits a
// manifest with a content hash per file. The manifest timestamp line is the
// single non-reproducible output line.
class ArtifactSink {
 public:
  explicit ArtifactSink(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write artifact: " + path.string());
    out << content;
    names_.push_back(name);
    hashes_.push_back(fnv1a(content));
  }

  void write_manifest(const std::string& timestamp) {
    std::string m = "# manifest " + std::string(kVersion) + "\n";
    m += "# generated: " + timestamp + "\n";
    for (std::size_t i = 0; i < names_.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%016llx",
                    static_cast<unsigned long long>(hashes_[i]));
      m += std::string(buf) + "  " + names_[i] + "\n";
    }
    std::ofstream out(dir_ / "manifest.txt", std::ios::binary);
    out << m;
  }

  std::size_t count() const { return names_.size(); }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
  std::vector<std::uint64_t> hashes_;
};

// ---- SVG ------------------------------------------------------------------

struct PlotSeries {
  Vec x;
  Vec y;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// A minimal deterministic line/scatter plot. `scatter` draws markers instead
// of a polyline.
inline std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title,
                              bool scatter = false) {
  const double width = 640, height = 480, margin = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto py = [&](double y) {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title +
         "</text>\n";
  // axes
  svg += "<line x1=\"" + detail::svg_num(margin) + "\" y1=\"" + detail::svg_num(height - margin) +
         "\" x2=\"" + detail::svg_num(width - margin) + "\" y2=\"" +
         detail::svg_num(height - margin) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + detail::svg_num(margin) + "\" y1=\"" + detail::svg_num(margin) +
         "\" x2=\"" + detail::svg_num(margin) + "\" y2=\"" + detail::svg_num(height - margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + detail::svg_num(margin) + "\" y=\"" + detail::svg_num(height - 8) +
         "\" font-size=\"10\">" + detail::svg_num(xmin) + "</text>\n";
  svg += "<text x=\"" + detail::svg_num(width - margin) + "\" y=\"" +
         detail::svg_num(height - 8) + "\" text-anchor=\"end\" font-size=\"10\">" +
         detail::svg_num(xmax) + "</text>\n";
  svg += "<text x=\"4\" y=\"" + detail::svg_num(height - margin) + "\" font-size=\"10\">" +
         detail::svg_num(ymin) + "</text>\n";
  svg += "<text x=\"4\" y=\"" + detail::svg_num(margin) + "\" font-size=\"10\">" +
         detail::svg_num(ymax) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = colors[si % 5];
    if (scatter) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        svg += "<circle cx=\"" + detail::svg_num(px(s.x[i])) + "\" cy=\"" +
               detail::svg_num(py(s.y[i])) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    } else if (!s.x.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) pts += " ";
        pts += detail::svg_num(px(s.x[i])) + "," + detail::svg_num(py(s.y[i]));
      }
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

// Reads a CSV written by CsvWriter: skips '#' lines, first data line is the
// column header.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<Vec> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV: " + path);
  CsvData data;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!header_done) {
      while (std::getline(ss, cell, ',')) data.columns.push_back(cell);
      header_done = true;
      continue;
    }
    Vec row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        row.push_back(0.0);
      }
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace attractor
