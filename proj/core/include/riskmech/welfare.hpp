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
//
// Fractional surplus maximization for coverage valuations. A point x in the
// polytope {x >= 0, sum_i x_ij <= 1 per item} induces a lottery that hands
// item j to player i with probability exp(-sum_{k<i} x_kj) * (1 - exp(-x_ij))
// (players scanned in index order; with the leftover probability the item
// stays unassigned). The expected welfare of that lottery is smooth, and on
// the shipped instances concave; maximized by projected gradient ascent.

#ifndef RISKMECH_WELFARE_HPP_
#define RISKMECH_WELFARE_HPP_

#include <span>
#include <vector>

#include "riskmech/instance.hpp"
#include "riskmech/valuation.hpp"

namespace riskmech {

struct FractionalAllocation {
  int n_players = 0;
  int n_items = 0;
  std::vector<double> x;  // row-major n_players x n_items

  FractionalAllocation() = default;
  FractionalAllocation(int n, int m)
      : n_players(n), n_items(m), x(static_cast<std::size_t>(n) * m, 0.0) {}

  double& at(int i, int j) { return x[static_cast<std::size_t>(i) * n_items + j]; }
  double at(int i, int j) const {
    return x[static_cast<std::size_t>(i) * n_items + j];
  }
};

// Win probability of each (player, item) pair under the induced lottery.
std::vector<std::vector<double>> rounding_marginals(const FractionalAllocation& x);

// Throws InputError when x leaves the polytope by more than 1e-9.
void check_feasible(const FractionalAllocation& x);

// Euclidean projection of one item column onto {y >= 0, sum y <= 1}.
std::vector<double> project_column(std::span<const double> column);

// Column-wise projection onto the allocation polytope. Idempotent.
FractionalAllocation project_to_polytope(const FractionalAllocation& x);

// Expected total reported value of the induced lottery.
Money expected_welfare(const FractionalAllocation& x,
                       std::span<const CoverageValuation> reports);

// Closed-form gradient of expected_welfare in x.
FractionalAllocation welfare_gradient(const FractionalAllocation& x,
                                      std::span<const CoverageValuation> reports);

struct WelfareSolution {
  FractionalAllocation x;
  Money objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Projected gradient ascent from x = 0 with fixed step 1/L (L bounded from
// the total universe weight), halving the step if an ascent step ever
// decreases the objective. Stops when the fixed-point residual
// |project(x + step * grad) - x| / step drops to params.tolerance; throws
// ConvergenceError at the iteration cap.
WelfareSolution maximize_expected_welfare(
    std::span<const CoverageValuation> reports, const OptimizerParams& params);

// The coverage view of a profile; throws InputError on other valuations.
std::vector<CoverageValuation> coverage_profile(const Profile& reports);

}  // namespace riskmech

#endif  // RISKMECH_WELFARE_HPP_
