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
// Valuation types for auction players. Coverage valuations assign each item
// a subset of a weighted element universe; the value of a bundle is the
// weight of the union of the covered elements. Single-item valuations pay a
// flat amount for receiving anything at all.

#ifndef RISKMECH_VALUATION_HPP_
#define RISKMECH_VALUATION_HPP_

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "riskmech/errors.hpp"

namespace riskmech {

using Money = double;

// Toolkit-wide comparison tolerance for exact arithmetic paths.
inline constexpr double kValueTolerance = 1e-9;

// Shortest round-trip decimal form; used for canonical encodings.
std::string format_double(double v);

struct WeightedElement {
  std::string id;
  double weight = 0.0;
};

class CoverageValuation {
 public:
  // `item_sets[j]` lists the universe indices covered by item j. Every
  // index must resolve, element ids must be unique, weights nonnegative.
  CoverageValuation(std::vector<WeightedElement> universe,
                    std::vector<std::vector<int>> item_sets);

  // Id-based construction: `item_sets` keyed by item id, resolved against
  // `items`. Items without an entry cover nothing. Unknown item or element
  // ids are input errors.
  CoverageValuation(
      const std::vector<WeightedElement>& universe,
      const std::map<std::string, std::vector<std::string>>& item_sets,
      const std::vector<std::string>& items);

  int n_items() const { return static_cast<int>(item_sets_.size()); }
  int n_elements() const { return static_cast<int>(universe_.size()); }
  const std::vector<WeightedElement>& universe() const { return universe_; }
  const std::vector<std::vector<int>>& item_sets() const { return item_sets_; }

  // Weight of the union of the elements covered by `bundle` (item indices).
  Money value(std::span<const int> bundle) const;

  // Total universe weight; the value of the grand bundle is at most this.
  Money total_weight() const { return total_weight_; }

  // Same sets, weights multiplied by `factor` (factor >= 0).
  CoverageValuation scaled(double factor) const;

 private:
  std::vector<WeightedElement> universe_;
  std::vector<std::vector<int>> item_sets_;
  Money total_weight_ = 0.0;
};

// Expected value of a random bundle that contains item j independently
// with probability q[j]. Closed form: sum over elements of
// w_u * (1 - prod_{j covering u} (1 - q_j)).
Money expected_value_product(const CoverageValuation& v,
                             std::span<const double> q);

struct SingleItemValuation {
  Money value = 0.0;  // value for receiving any nonempty bundle

  SingleItemValuation() = default;
  explicit SingleItemValuation(Money v);
};

using Valuation = std::variant<CoverageValuation, SingleItemValuation>;
using Profile = std::vector<Valuation>;
using TypeSpace = std::vector<std::vector<Valuation>>;

// Value of `bundle` (item indices) under either valuation kind.
Money valuation_value(const Valuation& v, std::span<const int> bundle);

// Worth of every item at once; upper bound used in payment sanity checks.
Money grand_bundle_value(const Valuation& v, int n_items);

// Weights multiplied by `factor` (single-item: value scaled).
Valuation scale_valuation(const Valuation& v, double factor);

// Deterministic one-line encoding; used for cache keys, table lookups and
// audit witnesses.
std::string canonical_encoding(const Valuation& v);
std::string profile_key(const Profile& reports);

}  // namespace riskmech

#endif  // RISKMECH_VALUATION_HPP_
