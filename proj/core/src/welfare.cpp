// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskmech/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskmech {

namespace {

void check_shape(const FractionalAllocation& x,
                 std::span<const CoverageValuation> reports) {
  if (static_cast<int>(reports.size()) != x.n_players) {
    throw InputError("profile size does not match allocation rows");
  }
  for (const auto& v : reports) {
    if (v.n_items() != x.n_items) {
      throw InputError("valuation item count does not match allocation columns");
    }
  }
}

// d(expected value)/d(q_kj) for player k: the weight of the elements item j
// covers for k, discounted by the chance each element is already covered by
// k's other items.
double marginal_coverage_weight(const CoverageValuation& v,
                                const std::vector<double>& q_row, int j) {
  double total = 0.0;
  for (int e : v.item_sets()[j]) {
    double p = 1.0;
    for (int j2 = 0; j2 < v.n_items(); ++j2) {
      if (j2 == j) continue;
      const auto& s = v.item_sets()[j2];
      if (std::find(s.begin(), s.end(), e) != s.end()) p *= 1.0 - q_row[j2];
    }
    total += v.universe()[e].weight * p;
  }
  return total;
}

}  // namespace

std::vector<std::vector<double>> rounding_marginals(const FractionalAllocation& x) {
  std::vector<std::vector<double>> q(x.n_players,
                                     std::vector<double>(x.n_items, 0.0));
  for (int j = 0; j < x.n_items; ++j) {
    double prefix = 1.0;  // exp(-sum of earlier players' mass on j)
    for (int i = 0; i < x.n_players; ++i) {
      double e = std::exp(-x.at(i, j));
      q[i][j] = prefix * (1.0 - e);
      prefix *= e;
    }
  }
  return q;
}

void check_feasible(const FractionalAllocation& x) {
  for (int j = 0; j < x.n_items; ++j) {
    double col = 0.0;
    for (int i = 0; i < x.n_players; ++i) {
      if (x.at(i, j) < -kValueTolerance) {
        throw InputError("fractional allocation has a negative entry");
      }
      col += x.at(i, j);
    }
    if (col > 1.0 + kValueTolerance) {
      throw InputError("fractional allocation column exceeds unit mass");
    }
  }
}

std::vector<double> project_column(std::span<const double> column) {
  std::vector<double> clamped(column.begin(), column.end());
  for (auto& v : clamped) v = std::max(v, 0.0);
  double total = std::accumulate(clamped.begin(), clamped.end(), 0.0);
  if (total <= 1.0) return clamped;

  // Projection onto the full simplex: subtract the water level tau that
  // keeps the positive part summing to one.
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) tau = t;
  }
  std::vector<double> out(column.begin(), column.end());
  for (auto& v : out) v = std::max(v - tau, 0.0);
  return out;
}

FractionalAllocation project_to_polytope(const FractionalAllocation& x) {
  FractionalAllocation out(x.n_players, x.n_items);
  std::vector<double> column(x.n_players);
  for (int j = 0; j < x.n_items; ++j) {
    for (int i = 0; i < x.n_players; ++i) column[i] = x.at(i, j);
    std::vector<double> projected = project_column(column);
    for (int i = 0; i < x.n_players; ++i) out.at(i, j) = projected[i];
  }
  return out;
}

Money expected_welfare(const FractionalAllocation& x,
                       std::span<const CoverageValuation> reports) {
  check_shape(x, reports);
  check_feasible(x);
  auto q = rounding_marginals(x);
  Money total = 0.0;
  for (int i = 0; i < x.n_players; ++i) {
    total += expected_value_product(reports[i], q[i]);
  }
  return total;
}

FractionalAllocation welfare_gradient(const FractionalAllocation& x,
                                      std::span<const CoverageValuation> reports) {
  check_shape(x, reports);
  check_feasible(x);
  auto q = rounding_marginals(x);

  FractionalAllocation g(x.n_players, x.n_items);
  std::vector<std::vector<double>> d(x.n_players,
                                     std::vector<double>(x.n_items, 0.0));
  for (int k = 0; k < x.n_players; ++k) {
    for (int j = 0; j < x.n_items; ++j) {
      d[k][j] = marginal_coverage_weight(reports[k], q[k], j);
    }
  }
  for (int j = 0; j < x.n_items; ++j) {
    double below = 0.0;  // cumulative mass of players up to i on item j
    for (int i = 0; i < x.n_players; ++i) {
      below += x.at(i, j);
      // Raising x_ij grows player i's own win chance by exp(-mass up to i)
      // and shrinks every later player's by their current marginal.
      double gij = std::exp(-below) * d[i][j];
      for (int k = i + 1; k < x.n_players; ++k) gij -= q[k][j] * d[k][j];
      g.at(i, j) = gij;
    }
  }
  return g;
}

WelfareSolution maximize_expected_welfare(
    std::span<const CoverageValuation> reports, const OptimizerParams& params) {
  if (params.tolerance <= 0.0) throw InputError("tolerance must be positive");
  if (params.max_iterations <= 0) throw InputError("iteration cap must be positive");
  int n = static_cast<int>(reports.size());
  int m = n > 0 ? reports[0].n_items() : 0;

  double total_weight = 0.0;
  for (const auto& v : reports) total_weight += v.total_weight();
  // Curvature bound from the total universe weight and the profile shape.
  double lipschitz = std::max((n + m) * total_weight, 1e-9);
  double step = 1.0 / lipschitz;

  FractionalAllocation x(n, m);
  Money fx = expected_welfare(x, reports);
  double residual = 0.0;
  for (int it = 0; it < params.max_iterations; ++it) {
    FractionalAllocation g = welfare_gradient(x, reports);
    FractionalAllocation next(n, m);
    for (std::size_t k = 0; k < x.x.size(); ++k) next.x[k] = x.x[k] + step * g.x[k];
    next = project_to_polytope(next);

    double moved = 0.0;
    for (std::size_t k = 0; k < x.x.size(); ++k) {
      double dk = next.x[k] - x.x[k];
      moved += dk * dk;
    }
    residual = std::sqrt(moved) / step;
    if (residual <= params.tolerance) {
      return {std::move(x), fx, residual, it};
    }
    Money fn = expected_welfare(next, reports);
    if (fn < fx - 1e-12) {
      // The fixed step overshot; the curvature bound was too optimistic.
      step *= 0.5;
      continue;
    }
    x = std::move(next);
    fx = fn;
  }
  throw ConvergenceError("surplus maximization hit the iteration cap", residual);
}

std::vector<CoverageValuation> coverage_profile(const Profile& reports) {
  std::vector<CoverageValuation> out;
  out.reserve(reports.size());
  for (const auto& r : reports) {
    const auto* c = std::get_if<CoverageValuation>(&r);
    if (!c) throw InputError("profile mixes coverage and non-coverage valuations");
    out.push_back(*c);
  }
  return out;
}

}  // namespace riskmech
