#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gradlayer/errors.hpp"

namespace gradlayer {

/// Uniformly weighted particle set in R^dim, stored row-major.
struct EmpiricalMeasure {
  int dim = 0;
  std::vector<double> data;  // size() * dim entries

  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(int dim_) : dim(dim_) {
    if (dim_ <= 0) throw ShapeError("EmpiricalMeasure: dim must be positive");
  }
  EmpiricalMeasure(int dim_, std::vector<double> flat) : dim(dim_), data(std::move(flat)) {
    if (dim_ <= 0) throw ShapeError("EmpiricalMeasure: dim must be positive");
    if (data.size() % static_cast<std::size_t>(dim_) != 0) {
      throw ShapeError("EmpiricalMeasure: flat data length not a multiple of dim");
    }
  }

  std::size_t size() const { return dim > 0 ? data.size() / static_cast<std::size_t>(dim) : 0; }
  bool empty() const { return data.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<double> point(std::size_t i) {
    return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }

  void push_back(std::span<const double> p) {
    if (static_cast<int>(p.size()) != dim) throw ShapeError("EmpiricalMeasure: point dim mismatch");
    data.insert(data.end(), p.begin(), p.end());
  }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace gradlayer
