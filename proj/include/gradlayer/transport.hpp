#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gradlayer/errors.hpp"
#include "gradlayer/measure.hpp"

namespace gradlayer {

/// Optimal assignment between two equal-size uniform empirical measures.
/// cost = (sum_i ||x_i - y_perm[i]||^p / n)^(1/p).
struct TransportPlan {
  std::vector<int> permutation;  // source index -> target index
  double cost = 0.0;
  int p = 1;
};

namespace detail {

// Largest instance the exact solver accepts. Above ~500 points the O(n^3)
// solve takes noticeable time; the CLI warns there.
constexpr std::size_t kMaxAssignmentSize = 2000;

inline std::vector<double> pairwise_costs(int p, const EmpiricalMeasure& mu,
                                          const EmpiricalMeasure& nu) {
  const std::size_t n = mu.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d2 = squared_distance(mu.point(i), nu.point(j));
      cost[i * n + j] = p == 2 ? d2 : std::sqrt(d2);
    }
  }
  return cost;
}

// Exact O(n^3) assignment via shortest augmenting paths with potentials
// (Jonker-Volgenant style). Rows and columns are scanned in index order, so
// the result is deterministic; among cost ties the permutation is whichever
// the stable scan reaches first.
inline std::vector<int> solve_assignment(const std::vector<double>& a, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> perm(n);
  for (std::size_t j = 1; j <= n; ++j) perm[p[j] - 1] = static_cast<int>(j - 1);
  return perm;
}

inline void check_pair(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int p) {
  if (p != 1 && p != 2) throw ShapeError("wasserstein: p must be 1 or 2");
  if (mu.empty() || nu.empty()) throw ShapeError("wasserstein: measures must be nonempty");
  if (mu.dim != nu.dim) throw ShapeError("wasserstein: dimension mismatch");
  if (mu.size() != nu.size()) throw ShapeError("wasserstein: sizes must match");
}

inline double plan_cost(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                        const std::vector<int>& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d2 = squared_distance(mu.point(i), nu.point(static_cast<std::size_t>(perm[i])));
    total += p == 2 ? d2 : std::sqrt(d2);
  }
  const double mean = total / static_cast<double>(mu.size());
  return p == 2 ? std::sqrt(mean) : mean;
}

}  // namespace detail

/// Exact W_p between equal-size uniform empirical measures via optimal
/// assignment. On such measures the Monge and Kantorovich optima coincide,
/// so the returned permutation is an optimal transport map.
inline TransportPlan wasserstein(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  detail::check_pair(mu, nu, p);
  const std::size_t n = mu.size();
  if (n > detail::kMaxAssignmentSize) {
    throw ShapeError("wasserstein: instance exceeds the exact-solver cap of 2000 points");
  }
  TransportPlan plan;
  plan.p = p;
  const auto cost = detail::pairwise_costs(p, mu, nu);
  plan.permutation = detail::solve_assignment(cost, n);
  plan.cost = detail::plan_cost(p, mu, nu, plan.permutation);
  return plan;
}

/// Exhaustive reference: minimum over all n! permutations, n <= 8. Ties go to
/// the lexicographically smallest permutation.
inline TransportPlan brute_force_wasserstein(int p, const EmpiricalMeasure& mu,
                                             const EmpiricalMeasure& nu) {
  detail::check_pair(mu, nu, p);
  const std::size_t n = mu.size();
  if (n > 8) throw ShapeError("brute_force_wasserstein: n must be <= 8");
  const auto cost = detail::pairwise_costs(p, mu, nu);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + static_cast<std::size_t>(perm[i])];
    if (s < best_sum) {
      best_sum = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  TransportPlan plan;
  plan.p = p;
  plan.permutation = std::move(best);
  plan.cost = detail::plan_cost(p, mu, nu, plan.permutation);
  return plan;
}

/// Displacement interpolation x_i -> (1-t) x_i + t y_perm[i] along an optimal
/// plan from mu toward nu.
inline EmpiricalMeasure mccann_interpolate(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                           const TransportPlan& plan, double t) {
  if (t < 0.0 || t > 1.0) throw ShapeError("mccann_interpolate: t must lie in [0,1]");
  if (plan.permutation.size() != mu.size() || mu.size() != nu.size() || mu.dim != nu.dim) {
    throw ShapeError("mccann_interpolate: plan does not match the measures");
  }
  EmpiricalMeasure out(mu.dim);
  out.data.resize(mu.data.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto x = mu.point(i);
    const auto y = nu.point(static_cast<std::size_t>(plan.permutation[i]));
    for (int j = 0; j < mu.dim; ++j) {
      out.data[i * static_cast<std::size_t>(mu.dim) + j] = (1.0 - t) * x[j] + t * y[j];
    }
  }
  return out;
}

using VelocityField = std::function<std::vector<double>(std::span<const double>)>;

namespace detail {

inline void rk4_advance(const VelocityField& v, EmpiricalMeasure& m, double duration) {
  if (duration <= 0.0) return;
  const int steps = std::max(1, static_cast<int>(std::ceil(duration / 1e-3)));
  const double h = duration / steps;
  const int d = m.dim;
  std::vector<double> k1, k2, k3, k4, tmp(static_cast<std::size_t>(d));
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto x = m.point(i);
      k1 = v(x);
      for (int j = 0; j < d; ++j) tmp[j] = x[j] + 0.5 * h * k1[j];
      k2 = v(tmp);
      for (int j = 0; j < d; ++j) tmp[j] = x[j] + 0.5 * h * k2[j];
      k3 = v(tmp);
      for (int j = 0; j < d; ++j) tmp[j] = x[j] + h * k3[j];
      k4 = v(tmp);
      for (int j = 0; j < d; ++j) {
        x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (!std::isfinite(x[j])) {
          throw NumericError("discretization_error: trajectory left the finite range",
                             static_cast<std::ptrdiff_t>(i));
        }
      }
    }
  }
}

}  // namespace detail

/// Probe for the one-step discretization gap of a smooth velocity field:
/// integrates particles to nu_t and nu_{t+delta} with a fine fixed-step RK4,
/// then reports W_2(nu_{t+delta}, (id + delta v)_push nu_t) / delta. For
/// fields generating absolutely continuous curves this ratio vanishes with
/// delta; on finite particle sets it decays first order.
inline double discretization_error(const VelocityField& v, const EmpiricalMeasure& mu0, double t,
                                   double delta) {
  if (delta <= 0.0) throw ShapeError("discretization_error: delta must be positive");
  if (mu0.empty()) throw ShapeError("discretization_error: empty initial measure");
  EmpiricalMeasure nu_t = mu0;
  detail::rk4_advance(v, nu_t, t);
  EmpiricalMeasure nu_next = nu_t;
  detail::rk4_advance(v, nu_next, delta);
  EmpiricalMeasure euler = nu_t;
  for (std::size_t i = 0; i < euler.size(); ++i) {
    auto x = euler.point(i);
    const auto vel = v(nu_t.point(i));
    for (int j = 0; j < euler.dim; ++j) x[j] += delta * vel[j];
  }
  return wasserstein(2, nu_next, euler).cost / delta;
}

}  // namespace gradlayer
