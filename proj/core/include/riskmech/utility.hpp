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
// Utility-for-money curves used by the risk-averse audits. All shipped
// forms are nondecreasing, concave and normalized so u(0) = 0.

#ifndef RISKMECH_UTILITY_HPP_
#define RISKMECH_UTILITY_HPP_

#include <span>
#include <string>
#include <vector>

#include "riskmech/valuation.hpp"

namespace riskmech {

class UtilityModel {
 public:
  static UtilityModel identity();
  // u(x) = (1 - exp(-a x)) / a, a > 0.
  static UtilityModel cara(double a);
  // u(x) = ln(x + c) - ln(c), c > 0, defined for x > -c.
  static UtilityModel log_shifted(double c);
  // Continuous piecewise-linear curve through the origin. slopes[k] applies
  // between breakpoints[k-1] and breakpoints[k] (unbounded at the ends).
  // Slopes must be nonnegative; concavity is certified, not assumed.
  static UtilityModel piecewise_linear(std::vector<double> breakpoints,
                                       std::vector<double> slopes);

  double operator()(Money x) const;
  const std::string& name() const { return name_; }

 private:
  enum class Kind { kIdentity, kCara, kLogShifted, kPiecewiseLinear };

  UtilityModel(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  double a_ = 0.0;                  // cara
  double c_ = 0.0;                  // log_shifted
  std::vector<double> breaks_;      // piecewise_linear
  std::vector<double> slopes_;
  std::vector<double> break_values_;
};

// Checks that u is nondecreasing and midpoint-concave on the sorted grid:
// u(x_{k+1}) >= u(x_k) and u((x_k + x_{k+2}) / 2) >= (u(x_k) + u(x_{k+2})) / 2
// up to 1e-12. Grids with fewer than 3 points are input errors.
bool certify_shape(const UtilityModel& u, std::span<const Money> grid);

// The grid certify_shape is run on by default: [-100, 100] in steps of 0.5,
// clipped to the utility's domain.
std::vector<Money> standard_shape_grid(double domain_min);

// Identity, CARA(0.1), CARA(1), CARA(5), LogShifted(1 + |min_payoff|), and
// a three-slope piecewise-linear curve. `min_payoff` is the smallest payoff
// the audit will evaluate; the log shift adapts to keep it in-domain.
std::vector<UtilityModel> standard_battery(Money min_payoff);

// Subset of the standard battery by name ("identity", "cara(1)", ...).
std::vector<UtilityModel> battery_by_names(const std::vector<std::string>& names,
                                           Money min_payoff);

}  // namespace riskmech

#endif  // RISKMECH_UTILITY_HPP_
