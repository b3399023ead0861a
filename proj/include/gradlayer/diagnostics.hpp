#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gradlayer/errors.hpp"
#include "gradlayer/gradient_layer.hpp"
#include "gradlayer/measure.hpp"
#include "gradlayer/metrics.hpp"
#include "gradlayer/net.hpp"

namespace gradlayer {

using GradientField = std::function<std::vector<double>(std::span<const double>)>;

/// Monte-Carlo estimate of the squared functional-gradient norm: the particle
/// mean of ||grad f(x)||^2.
inline double functional_grad_norm_sq(const GradientField& field, const EmpiricalMeasure& particles) {
  if (particles.empty()) throw ShapeError("functional_grad_norm_sq: empty particle set");
  double acc = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const auto g = field(particles.point(i));
    double s = 0.0;
    for (double v : g) {
      if (!std::isfinite(v)) {
        throw NumericError("functional_grad_norm_sq: non-finite gradient", static_cast<std::ptrdiff_t>(i));
      }
      s += v * v;
    }
    acc += s;
  }
  return acc / static_cast<double>(particles.size());
}

inline double functional_grad_norm_sq(const DenseNet& critic, const EmpiricalMeasure& particles) {
  return functional_grad_norm_sq(
      [&critic](std::span<const double> x) { return grad_input(critic, x); }, particles);
}

struct Theorem1Report {
  double lhs = 0.0;  // min over recorded squared gradient norms
  double rhs = 0.0;  // 2/(eta T) * (objective(0) - floor)
  bool satisfied = false;
};

/// Audits the O(1/T) stationarity bound of constant-step functional gradient
/// descent: min_k ||grad L(phi_k)||^2 <= 2/(eta T) (L(phi_0) - L*). Only
/// meaningful when the objective floor L* is known (exact-oracle runs).
inline Theorem1Report theorem1_audit(const RunMetrics& metrics, double eta, int T,
                                     double loss_floor) {
  if (!std::isfinite(loss_floor)) throw ShapeError("theorem1_audit: objective floor required");
  if (T < 1) throw ShapeError("theorem1_audit: T must be >= 1");
  if (metrics.size() < static_cast<std::size_t>(T)) {
    throw ShapeError("theorem1_audit: metrics must contain at least T records");
  }
  Theorem1Report report;
  report.lhs = metrics[0].fgrad_norm_sq;
  for (int k = 1; k < T; ++k) report.lhs = std::min(report.lhs, metrics[static_cast<std::size_t>(k)].fgrad_norm_sq);
  report.rhs = 2.0 / (eta * static_cast<double>(T)) * (metrics[0].objective - loss_floor);
  report.satisfied = report.lhs <= report.rhs;
  return report;
}

struct DescentAudit {
  std::vector<bool> holds;  // per consecutive step pair
  bool all_hold = true;
};

/// Checks the per-step descent inequality
/// L(phi_{k+1}) <= L(phi_k) - eta/2 ||grad L(phi_k)||^2 up to `tol`.
inline DescentAudit descent_audit(const RunMetrics& metrics, double eta, double tol = 1e-9) {
  DescentAudit audit;
  for (std::size_t k = 0; k + 1 < metrics.size(); ++k) {
    const bool ok =
        metrics[k + 1].objective <= metrics[k].objective - 0.5 * eta * metrics[k].fgrad_norm_sq + tol;
    audit.holds.push_back(ok);
    audit.all_hold = audit.all_hold && ok;
  }
  return audit;
}

struct EscapeReport {
  double eta = 0.0;
  double param_grad_norm = 0.0;          // |d E[-f(g2(z;w))] / dw|
  std::array<double, 2> displacement{};  // layer output minus input
  double objective_before = 0.0;         // E[-f] at the stationary model
  double objective_after = 0.0;          // E[-f] after one gradient layer
};

/// The finite-model stationary point the gradient layer escapes: the
/// generator family g2(z;w) = (w, 0) against the critic f(x) = x2. The
/// parameter gradient E[J_w^T grad f] vanishes identically (the Jacobian is
/// orthogonal to the gradient field) while the layer still moves every sample
/// by eta * grad f = (0, eta) and improves E[-f] by exactly eta.
inline EscapeReport escape_demo(double eta = 0.1) {
  NetSpec spec;
  spec.layer_dims = {2, 1};
  DenseNet critic(spec, {0.0, 1.0, 0.0});  // f(x) = x2

  const double w = 0.7;
  const std::vector<double> x{w, 0.0};

  EscapeReport report;
  report.eta = eta;

  // d/dw of -f((w,0)): Jacobian column of g2 is (1,0).
  const auto g = grad_input(critic, x);
  report.param_grad_norm = std::abs(-g[0]);

  const GradientLayer layer(critic, eta);
  const auto moved = gradlayer::apply(layer, x);
  report.displacement = std::array<double, 2>{moved[0] - x[0], moved[1] - x[1]};
  report.objective_before = -forward(critic, x)[0];
  report.objective_after = -forward(critic, moved)[0];
  return report;
}

namespace detail {

inline std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

constexpr std::array<const char*, 8> kSvgPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
};

}  // namespace detail

/// Standalone scatter plot of 2-D measures on the fixed viewport
/// [-1.2, 1.2]^2, one palette color per measure. Output bytes depend only on
/// the input.
inline std::string scatter_svg(const std::vector<std::pair<std::string, EmpiricalMeasure>>& named) {
  constexpr double kExtent = 1.2;
  constexpr int kSize = 480;
  auto map_x = [&](double x) { return (x + kExtent) / (2.0 * kExtent) * kSize; };
  auto map_y = [&](double y) { return (kExtent - y) / (2.0 * kExtent) * kSize; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
         "viewBox=\"0 0 480 480\">\n";
  svg += "<rect width=\"480\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg += "<line x1=\"0\" y1=\"" + detail::svg_coord(map_y(0.0)) + "\" x2=\"480\" y2=\"" +
         detail::svg_coord(map_y(0.0)) + "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + detail::svg_coord(map_x(0.0)) + "\" y1=\"0\" x2=\"" +
         detail::svg_coord(map_x(0.0)) + "\" y2=\"480\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";

  for (std::size_t m = 0; m < named.size(); ++m) {
    const auto& measure = named[m].second;
    if (measure.dim != 2) throw ShapeError("scatter_svg: measures must be 2-D");
    const char* color = detail::kSvgPalette[m % detail::kSvgPalette.size()];
    svg += std::string("<g fill=\"") + color + "\" fill-opacity=\"0.75\">\n";
    for (std::size_t i = 0; i < measure.size(); ++i) {
      const auto p = measure.point(i);
      svg += "<circle cx=\"" + detail::svg_coord(map_x(p[0])) + "\" cy=\"" +
             detail::svg_coord(map_y(p[1])) + "\" r=\"2.5\"/>\n";
    }
    svg += "</g>\n";
  }
  for (std::size_t m = 0; m < named.size(); ++m) {
    const char* color = detail::kSvgPalette[m % detail::kSvgPalette.size()];
    svg += std::string("<text x=\"8\" y=\"") + detail::svg_coord(16.0 + 14.0 * m) + "\" fill=\"" +
           color + "\" font-family=\"monospace\" font-size=\"12\">" + named[m].first + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_scatter_svg(const std::vector<std::pair<std::string, EmpiricalMeasure>>& named,
                             const std::string& path) {
  write_text_file(path, scatter_svg(named));
}

}  // namespace gradlayer
