#include "asymdet/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace asymdet::io {

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ": ragged CSV row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_spectrum_csv(const std::string& path, const spectrum::SpectrumResult& result,
                        const detector::DetectionReport* report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(12);
  out << "index,re,im,magnitude,arg" << (report ? ",flagged" : "") << '\n';
  const double thr = report ? report->lambda_max_s + report->threshold_shift : 0.0;
  for (Index i = 0; i < result.lambdas.size(); ++i) {
    const Complex lam = result.lambdas[i];
    out << i << ',' << lam.real() << ',' << lam.imag() << ',' << std::abs(lam) << ','
        << std::arg(lam);
    if (report) out << ',' << (lam.real() >= thr ? 1 : 0);
    out << '\n';
  }
}

void write_singular_csv(const std::string& path, const Vector& sv, double flag_above) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(12);
  out << "index,value,flagged\n";
  for (Index i = 0; i < sv.size(); ++i)
    out << i << ',' << sv[i] << ',' << (sv[i] > flag_above ? 1 : 0) << '\n';
}

void write_svg_scatter(const std::string& path, const std::vector<SvgSeries>& series,
                       const std::vector<SvgLine>& lines, const std::string& title) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  for (const auto& l : lines) {
    if (l.vertical) {
      xmin = std::min(xmin, l.value);
      xmax = std::max(xmax, l.value);
    } else {
      ymin = std::min(ymin, l.value);
      ymax = std::max(ymax, l.value);
    }
  }
  const double xpad = 0.05 * std::max(xmax - xmin, 1e-9);
  const double ypad = 0.05 * std::max(ymax - ymin, 1e-9);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double w = 640, h = 480, ml = 50, mr = 15, mt = 30, mb = 40;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(8);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + k * (xmax - xmin) / 4;
    const double yv = ymin + k * (ymax - ymin) / 4;
    out << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << xv << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 3
        << "\" text-anchor=\"end\" font-size=\"10\">" << yv << "</text>\n";
  }
  for (const auto& l : lines) {
    if (l.vertical)
      out << "<line x1=\"" << px(l.value) << "\" y1=\"" << mt << "\" x2=\"" << px(l.value)
          << "\" y2=\"" << h - mb << "\" stroke=\"" << l.color
          << "\" stroke-dasharray=\"4 3\"/>\n";
    else
      out << "<line x1=\"" << ml << "\" y1=\"" << py(l.value) << "\" x2=\"" << w - mr
          << "\" y2=\"" << py(l.value) << "\" stroke=\"" << l.color
          << "\" stroke-dasharray=\"4 3\"/>\n";
    if (!l.label.empty())
      out << "<text x=\"" << (l.vertical ? px(l.value) + 4 : ml + 6) << "\" y=\""
          << (l.vertical ? mt + 12 : py(l.value) - 4) << "\" font-size=\"10\" fill=\"" << l.color
          << "\">" << l.label << "</text>\n";
  }
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"" << s.radius
          << "\" fill=\"" << s.color << "\" fill-opacity=\"0.7\"/>\n";
  out << "</svg>\n";
}

}  // namespace asymdet::io
