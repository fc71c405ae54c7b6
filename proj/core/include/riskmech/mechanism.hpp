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
// Randomized direct-revelation mechanisms with replayable coins. A
// mechanism's internal randomness is either Enumerable (a fixed finite
// outcome distribution, independent of reports) or Streamed (a uniform
// stream derived deterministically from the execution seed). Allocation and
// payments for one run always come from the same coin outcome.

#ifndef RISKMECH_MECHANISM_HPP_
#define RISKMECH_MECHANISM_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "riskmech/instance.hpp"
#include "riskmech/rng.hpp"
#include "riskmech/valuation.hpp"

namespace riskmech {

inline constexpr int kNoWinner = -1;

struct Allocation {
  // winner[j] = player receiving item j, or kNoWinner.
  std::vector<int> winner;

  std::vector<int> bundle_of(int player) const;
  bool operator==(const Allocation&) const = default;
};

// Fixed finite coin distribution; outcomes are indices 0..K-1.
struct EnumerableCoins {
  std::vector<double> probabilities;
};
// One uniform draw stream per run, a pure function of the seed.
struct StreamedCoins {};
using CoinModel = std::variant<EnumerableCoins, StreamedCoins>;

// The coin outcome handed through allocate and pay. Enumerable outcomes
// expose their index; streamed outcomes expose a deterministic U[0,1)
// stream. The same Coin instance flows through both rules so payments can
// correlate with the allocation draw.
class Coin {
 public:
  static Coin enumerable(std::size_t outcome_index);
  static Coin streamed(std::uint64_t seed);

  std::size_t outcome_index() const;
  double uniform();

  bool is_enumerable() const { return index_.has_value(); }
  std::uint64_t seed() const { return seed_; }

 private:
  Coin() = default;
  std::optional<std::size_t> index_;
  std::optional<UniformStream> stream_;
  std::uint64_t seed_ = 0;
};

struct CoinOutcome {
  bool enumerable = false;
  std::uint64_t index_or_seed = 0;
  bool operator==(const CoinOutcome&) const = default;
};

struct Realization {
  Allocation allocation;
  std::vector<Money> payments;
  CoinOutcome coin_outcome;
};

// One support point of a player's exact outcome distribution: the bundle
// the player receives and the payment charged, with its probability.
struct PayoffAtom {
  std::vector<int> bundle;
  Money payment = 0.0;
  double probability = 0.0;
};
using PayoffDistribution = std::vector<PayoffAtom>;

struct Exact {};
struct MonteCarlo {
  long samples = 100000;
  std::uint64_t seed = 0;
};
using Method = std::variant<Exact, MonteCarlo>;

std::string method_name(const Method& m);

class Mechanism {
 public:
  using AllocateFn = std::function<Allocation(const Profile&, Coin&)>;
  using PayFn =
      std::function<std::vector<Money>(const Profile&, Coin&, const Allocation&)>;
  // Exact per-player distribution over (bundle, payment); optional, lets
  // streamed mechanisms support exact expectations.
  using PayoffDistFn = std::function<PayoffDistribution(const Profile&, int)>;

  Mechanism(int n_players, std::vector<std::string> items, CoinModel coins,
            AllocateFn allocate, PayFn pay, PayoffDistFn payoff_dist = nullptr,
            Method payoff_oracle = Exact{});

  int n_players() const { return n_players_; }
  int n_items() const { return static_cast<int>(items_.size()); }
  const std::vector<std::string>& items() const { return items_; }
  const CoinModel& coin_model() const { return coins_; }
  const Method& payoff_oracle() const { return payoff_oracle_; }

  bool has_exact_oracle() const;

  Allocation allocate(const Profile& reports, Coin& coin) const;
  std::vector<Money> pay(const Profile& reports, Coin& coin,
                         const Allocation& a) const;

  // Exact distribution of (bundle, payment) for `player`, from the closed
  // form when the mechanism ships one, otherwise by enumerating the coins.
  // Throws UnsupportedMethodError for streamed coins without a closed form.
  PayoffDistribution payoff_distribution(const Profile& reports, int player) const;

  void check_reports(const Profile& reports) const;

 private:
  int n_players_;
  std::vector<std::string> items_;
  CoinModel coins_;
  AllocateFn allocate_;
  PayFn pay_;
  PayoffDistFn payoff_dist_;
  Method payoff_oracle_;
};

// Simulates one run. Replays of the same (reports, seed) are bit-identical.
Realization run(const Mechanism& mech, const Profile& reports,
                std::uint64_t seed);

// Runs with a forced coin outcome instead of sampling one.
Realization run_with_coin(const Mechanism& mech, const Profile& reports,
                          Coin coin);

// E[value_i(allocation) - payment_i] where the mechanism sees `reports` and
// the value accrues to `as_if_true` (the player's actual valuation).
Money expected_payoff(const Mechanism& mech, const Profile& reports,
                      const Valuation& as_if_true, int player,
                      const Method& method);

struct MonteCarloEstimate {
  double mean = 0.0;
  double sample_std = 0.0;  // std of one draw, not of the mean
  long samples = 0;
};

MonteCarloEstimate monte_carlo_payoff(const Mechanism& mech,
                                      const Profile& reports,
                                      const Valuation& as_if_true, int player,
                                      const MonteCarlo& mc);

}  // namespace riskmech

#endif  // RISKMECH_MECHANISM_HPP_
