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

#include "riskmech/utility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace riskmech {

UtilityModel UtilityModel::identity() {
  return UtilityModel(Kind::kIdentity, "identity");
}

UtilityModel UtilityModel::cara(double a) {
  if (a <= 0.0) throw InputError("cara coefficient must be positive");
  UtilityModel u(Kind::kCara, "cara(" + format_double(a) + ")");
  u.a_ = a;
  return u;
}

UtilityModel UtilityModel::log_shifted(double c) {
  if (c <= 0.0) throw InputError("log shift must be positive");
  UtilityModel u(Kind::kLogShifted, "log_shifted(" + format_double(c) + ")");
  u.c_ = c;
  return u;
}

UtilityModel UtilityModel::piecewise_linear(std::vector<double> breakpoints,
                                            std::vector<double> slopes) {
  if (slopes.size() != breakpoints.size() + 1) {
    throw InputError("piecewise-linear curve needs one more slope than breakpoints");
  }
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw InputError("piecewise-linear breakpoints must be sorted");
  }
  for (double s : slopes) {
    if (s < 0.0) throw InputError("piecewise-linear slopes must be nonnegative");
  }
  std::string name = "piecewise_linear(";
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (k) name += ",";
    name += format_double(slopes[k]);
  }
  name += ")";
  UtilityModel u(Kind::kPiecewiseLinear, std::move(name));
  u.breaks_ = std::move(breakpoints);
  u.slopes_ = std::move(slopes);
  // Anchor the curve at u(0) = 0 and precompute values at breakpoints.
  u.break_values_.assign(u.breaks_.size(), 0.0);
  if (!u.breaks_.empty()) {
    // Value at breaks_[k] relative to breaks_[0], then shift so that the
    // segment containing 0 passes through the origin.
    for (std::size_t k = 1; k < u.breaks_.size(); ++k) {
      u.break_values_[k] = u.break_values_[k - 1] +
                           u.slopes_[k] * (u.breaks_[k] - u.breaks_[k - 1]);
    }
    std::size_t seg = 0;
    while (seg < u.breaks_.size() && u.breaks_[seg] <= 0.0) ++seg;
    // seg = index of first breakpoint above 0; slope seg applies at 0.
    double at_zero;
    if (seg == 0) {
      at_zero = u.break_values_[0] + u.slopes_[0] * (0.0 - u.breaks_[0]);
    } else {
      at_zero = u.break_values_[seg - 1] +
                u.slopes_[seg] * (0.0 - u.breaks_[seg - 1]);
    }
    for (auto& v : u.break_values_) v -= at_zero;
  }
  return u;
}

double UtilityModel::operator()(Money x) const {
  switch (kind_) {
    case Kind::kIdentity:
      return x;
    case Kind::kCara:
      return (1.0 - std::exp(-a_ * x)) / a_;
    case Kind::kLogShifted:
      if (x <= -c_) {
        throw InputError("log_shifted utility evaluated outside its domain");
      }
      return std::log(x + c_) - std::log(c_);
    case Kind::kPiecewiseLinear: {
      if (breaks_.empty()) return slopes_[0] * x;
      std::size_t seg = 0;
      while (seg < breaks_.size() && breaks_[seg] <= x) ++seg;
      if (seg == 0) return break_values_[0] + slopes_[0] * (x - breaks_[0]);
      return break_values_[seg - 1] + slopes_[seg] * (x - breaks_[seg - 1]);
    }
  }
  std::abort();
}

bool certify_shape(const UtilityModel& u, std::span<const Money> grid) {
  if (grid.size() < 3) throw InputError("shape grid needs at least 3 points");
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw InputError("shape grid must be sorted");
  }
  constexpr double kTol = 1e-12;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (u(grid[k + 1]) < u(grid[k]) - kTol) return false;
  }
  for (std::size_t k = 0; k + 2 < grid.size(); ++k) {
    double mid = 0.5 * (grid[k] + grid[k + 2]);
    if (u(mid) < 0.5 * (u(grid[k]) + u(grid[k + 2])) - kTol) return false;
  }
  return true;
}

std::vector<Money> standard_shape_grid(double domain_min) {
  std::vector<Money> grid;
  for (double x = -100.0; x <= 100.0 + 1e-12; x += 0.5) {
    if (x > domain_min) grid.push_back(x);
  }
  return grid;
}

std::vector<UtilityModel> standard_battery(Money min_payoff) {
  double shift = 1.0 + std::abs(min_payoff);
  return {UtilityModel::identity(),
          UtilityModel::cara(0.1),
          UtilityModel::cara(1.0),
          UtilityModel::cara(5.0),
          UtilityModel::log_shifted(shift),
          UtilityModel::piecewise_linear({0.0, 2.0}, {3.0, 1.0, 0.2})};
}

std::vector<UtilityModel> battery_by_names(const std::vector<std::string>& names,
                                           Money min_payoff) {
  std::vector<UtilityModel> out;
  for (const auto& name : names) {
    if (name == "identity") {
      out.push_back(UtilityModel::identity());
    } else if (name.rfind("cara(", 0) == 0 && name.back() == ')') {
      out.push_back(UtilityModel::cara(std::stod(name.substr(5))));
    } else if (name == "log_shifted") {
      out.push_back(UtilityModel::log_shifted(1.0 + std::abs(min_payoff)));
    } else if (name.rfind("log_shifted(", 0) == 0 && name.back() == ')') {
      out.push_back(UtilityModel::log_shifted(std::stod(name.substr(12))));
    } else if (name == "piecewise_linear") {
      out.push_back(UtilityModel::piecewise_linear({0.0, 2.0}, {3.0, 1.0, 0.2}));
    } else {
      throw InputError("unknown utility model '" + name + "'");
    }
  }
  return out;
}

}  // namespace riskmech
