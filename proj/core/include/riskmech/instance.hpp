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

#ifndef RISKMECH_INSTANCE_HPP_
#define RISKMECH_INSTANCE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "riskmech/valuation.hpp"

namespace riskmech {

struct PriorEntry {
  Valuation valuation;
  double probability = 0.0;
};

// Independent per-player discrete type distribution.
class Prior {
 public:
  explicit Prior(std::vector<std::vector<PriorEntry>> support);

  int n_players() const { return static_cast<int>(support_.size()); }
  const std::vector<PriorEntry>& player(int i) const { return support_.at(i); }
  const std::vector<std::vector<PriorEntry>>& support() const { return support_; }

 private:
  std::vector<std::vector<PriorEntry>> support_;
};

// A market: the item list, one true valuation per player, and optionally a
// prior over types. Instances with no players or no items are valid and
// produce empty allocations and zero payments.
struct Instance {
  std::vector<std::string> items;
  Profile true_valuations;
  std::optional<Prior> prior;

  int n_players() const { return static_cast<int>(true_valuations.size()); }
  int n_items() const { return static_cast<int>(items.size()); }

  // Shape checks: valuations sized to the item list, prior (if any) sized
  // to the player list. Throws InputError.
  void validate() const;
};

struct OptimizerParams {
  double tolerance = 1e-7;     // fixed-point residual target
  int max_iterations = 100000;
};

}  // namespace riskmech

#endif  // RISKMECH_INSTANCE_HPP_
