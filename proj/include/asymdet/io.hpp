#pragma once

#include <string>
#include <vector>

#include "asymdet/core.hpp"
#include "asymdet/detector.hpp"
#include "asymdet/spectrum.hpp"

namespace asymdet::io {

// Dense real matrix, comma separated, row-major, no header.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);

// Columns: index,re,im,magnitude,arg[,flagged].
void write_spectrum_csv(const std::string& path, const spectrum::SpectrumResult& result,
                        const detector::DetectionReport* report = nullptr);

// Columns: index,value,flagged.
void write_singular_csv(const std::string& path, const Vector& sv, double flag_above);

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  double radius = 2.0;
};

struct SvgLine {
  double value = 0.0;
  bool vertical = true;  // vertical: x = value; otherwise y = value
  std::string color = "#d62728";
  std::string label;
};

// Minimal scatter writer: points, axes, reference lines, title.
void write_svg_scatter(const std::string& path, const std::vector<SvgSeries>& series,
                       const std::vector<SvgLine>& lines, const std::string& title);

}  // namespace asymdet::io
