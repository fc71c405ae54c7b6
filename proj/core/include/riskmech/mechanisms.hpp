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
// The built-in mechanisms: a second-price auction, posted lottery menus,
// and a fractional-surplus coverage auction with externality payments.

#ifndef RISKMECH_MECHANISMS_HPP_
#define RISKMECH_MECHANISMS_HPP_

#include <variant>
#include <vector>

#include "riskmech/mechanism.hpp"
#include "riskmech/welfare.hpp"

namespace riskmech {

// One menu region: applies to reports in [min_report, next entry's
// min_report). The player receives the item with probability alloc_prob and
// is charged `charge` whether or not the item arrives.
struct MenuEntry {
  double min_report = 0.0;
  double alloc_prob = 0.0;
  Money charge = 0.0;
};

// Regions must start at 0 and be strictly increasing, so they partition
// the nonnegative reports.
struct LotteryMenu {
  std::vector<MenuEntry> entries;
};

// Highest single-item report wins and pays the second-highest report; ties
// go to the lowest player index. A lone player wins at price 0.
// Deterministic: one coin outcome with probability 1.
Mechanism make_second_price(int n_players);
Mechanism make_second_price(int n_players, std::vector<std::string> items);

// One player facing one menu. Coins enumerate the fixed partition of [0,1)
// cut at the menu's distinct allocation probabilities, so expectations are
// exact sums over outcomes.
Mechanism make_lottery(const LotteryMenu& menu);

// Independent per-player menus (player i draws for item i); the coin space
// is the product of the per-menu partitions.
Mechanism make_lottery_profile(std::vector<LotteryMenu> menus);
Mechanism make_lottery_profile(std::vector<LotteryMenu> menus,
                               std::vector<std::string> items);

// Coverage auction: reports are coverage valuations; the auction maximizes
// expected reported surplus over the fractional polytope, samples one
// winner per item from the induced lottery (streamed coins), and charges
// each player the expected surplus the others lose from their presence.
// Payments and the surplus point are deterministic in the reports;
// expectations use the closed-form product marginals.
Mechanism make_coverage_auction(int n_players, std::vector<std::string> items,
                                const OptimizerParams& params);

// The expected externality player `player` imposes: the others' optimal
// expected surplus with the player's report zeroed out, minus the others'
// expected surplus at the chosen point.
Money coverage_externality_payment(const Profile& reports, int player,
                                   const OptimizerParams& params);

struct SecondPriceSpec {};
struct LotterySpec {
  std::vector<LotteryMenu> menus;  // one per player
};
struct CoverageAuctionSpec {};
using MechanismSpec =
    std::variant<SecondPriceSpec, LotterySpec, CoverageAuctionSpec>;

// Instantiates the spec against an instance's shape (player count, items).
Mechanism build_mechanism(const MechanismSpec& spec, const Instance& instance,
                          const OptimizerParams& params);

bool is_coverage_spec(const MechanismSpec& spec);

}  // namespace riskmech

#endif  // RISKMECH_MECHANISMS_HPP_
