#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "gradlayer/measure.hpp"
#include "gradlayer/metrics.hpp"

namespace gradlayer {

/// Point files: header row ("x,y" in 2-D, "x0,x1,..." otherwise), one point
/// per line, comma separated, LF endings, full double precision.
inline std::string points_csv(const EmpiricalMeasure& m, int dim_hint = 0) {
  const int dim = m.dim > 0 ? m.dim : dim_hint;
  std::string out;
  if (dim == 2) {
    out = "x,y\n";
  } else {
    for (int j = 0; j < dim; ++j) {
      out += (j ? ",x" : "x") + std::to_string(j);
    }
    out += '\n';
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto p = m.point(i);
    for (int j = 0; j < dim; ++j) {
      if (j) out += ',';
      out += detail::format_double(p[j]);
    }
    out += '\n';
  }
  return out;
}

inline void write_points_csv(const EmpiricalMeasure& m, const std::string& path, int dim_hint = 0) {
  write_text_file(path, points_csv(m, dim_hint));
}

inline EmpiricalMeasure read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("point file has no header: " + path);
  int dim = 1;
  for (char c : line) {
    if (c == ',') ++dim;
  }
  EmpiricalMeasure m(dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    int j = 0;
    while (std::getline(row, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      m.data.push_back(v);
      ++j;
    }
    if (j != dim) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(dim) + " columns");
    }
  }
  return m;
}

}  // namespace gradlayer
