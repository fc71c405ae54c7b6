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

#include "riskmech/mechanism.hpp"

#include <cmath>
#include <utility>

namespace riskmech {

Prior::Prior(std::vector<std::vector<PriorEntry>> support)
    : support_(std::move(support)) {
  for (const auto& player_support : support_) {
    if (player_support.empty()) {
      throw InputError("prior support must be nonempty for every player");
    }
    double total = 0.0;
    for (const auto& entry : player_support) {
      if (entry.probability < 0.0) {
        throw InputError("prior probabilities must be nonnegative");
      }
      total += entry.probability;
    }
    if (std::abs(total - 1.0) > kValueTolerance) {
      throw InputError("prior probabilities must sum to 1");
    }
  }
}

void Instance::validate() const {
  for (const auto& v : true_valuations) {
    if (const auto* c = std::get_if<CoverageValuation>(&v)) {
      if (c->n_items() != n_items()) {
        throw InputError("coverage valuation item count does not match instance");
      }
    }
  }
  if (prior) {
    if (prior->n_players() != n_players()) {
      throw InputError("prior player count does not match instance");
    }
    for (int i = 0; i < n_players(); ++i) {
      for (const auto& entry : prior->player(i)) {
        if (const auto* c = std::get_if<CoverageValuation>(&entry.valuation)) {
          if (c->n_items() != n_items()) {
            throw InputError("prior valuation item count does not match instance");
          }
        }
      }
    }
  }
}

std::vector<int> Allocation::bundle_of(int player) const {
  std::vector<int> bundle;
  for (int j = 0; j < static_cast<int>(winner.size()); ++j) {
    if (winner[j] == player) bundle.push_back(j);
  }
  return bundle;
}

Coin Coin::enumerable(std::size_t outcome_index) {
  Coin c;
  c.index_ = outcome_index;
  return c;
}

Coin Coin::streamed(std::uint64_t seed) {
  Coin c;
  c.stream_.emplace(seed);
  c.seed_ = seed;
  return c;
}

std::size_t Coin::outcome_index() const {
  if (!index_) throw InputError("streamed coin has no outcome index");
  return *index_;
}

double Coin::uniform() {
  if (!stream_) throw InputError("enumerable coin has no uniform stream");
  return stream_->next();
}

std::string method_name(const Method& m) {
  if (std::holds_alternative<Exact>(m)) return "exact";
  const auto& mc = std::get<MonteCarlo>(m);
  return "monte_carlo(samples=" + std::to_string(mc.samples) +
         ",seed=" + std::to_string(mc.seed) + ")";
}

Mechanism::Mechanism(int n_players, std::vector<std::string> items,
                     CoinModel coins, AllocateFn allocate, PayFn pay,
                     PayoffDistFn payoff_dist, Method payoff_oracle)
    : n_players_(n_players),
      items_(std::move(items)),
      coins_(std::move(coins)),
      allocate_(std::move(allocate)),
      pay_(std::move(pay)),
      payoff_dist_(std::move(payoff_dist)),
      payoff_oracle_(payoff_oracle) {
  if (n_players_ < 0) throw InputError("negative player count");
  if (const auto* e = std::get_if<EnumerableCoins>(&coins_)) {
    if (e->probabilities.empty()) {
      throw InputError("enumerable coin model needs at least one outcome");
    }
    double total = 0.0;
    for (double p : e->probabilities) {
      if (p < 0.0) throw InputError("coin probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > kValueTolerance) {
      throw InputError("coin probabilities must sum to 1");
    }
  }
}

bool Mechanism::has_exact_oracle() const {
  return payoff_dist_ != nullptr ||
         std::holds_alternative<EnumerableCoins>(coins_);
}

void Mechanism::check_reports(const Profile& reports) const {
  if (static_cast<int>(reports.size()) != n_players_) {
    throw InputError("report profile size does not match player count");
  }
  for (const auto& r : reports) {
    if (const auto* c = std::get_if<CoverageValuation>(&r)) {
      if (c->n_items() != n_items()) {
        throw InputError("coverage report item count does not match mechanism");
      }
    }
  }
}

Allocation Mechanism::allocate(const Profile& reports, Coin& coin) const {
  check_reports(reports);
  Allocation a = allocate_(reports, coin);
  if (static_cast<int>(a.winner.size()) != n_items()) {
    throw InputError("allocation size does not match item count");
  }
  return a;
}

std::vector<Money> Mechanism::pay(const Profile& reports, Coin& coin,
                                  const Allocation& a) const {
  std::vector<Money> p = pay_(reports, coin, a);
  if (static_cast<int>(p.size()) != n_players_) {
    throw InputError("payment vector size does not match player count");
  }
  return p;
}

PayoffDistribution Mechanism::payoff_distribution(const Profile& reports,
                                                  int player) const {
  check_reports(reports);
  if (player < 0 || player >= n_players_) {
    throw InputError("player index out of range");
  }
  if (payoff_dist_) return payoff_dist_(reports, player);
  const auto* e = std::get_if<EnumerableCoins>(&coins_);
  if (!e) {
    throw UnsupportedMethodError(
        "exact expectations need enumerable coins or a closed form");
  }
  PayoffDistribution dist;
  for (std::size_t k = 0; k < e->probabilities.size(); ++k) {
    Coin coin = Coin::enumerable(k);
    Allocation a = allocate_(reports, coin);
    std::vector<Money> p = pay(reports, coin, a);
    dist.push_back({a.bundle_of(player), p[player], e->probabilities[k]});
  }
  return dist;
}

Realization run(const Mechanism& mech, const Profile& reports,
                std::uint64_t seed) {
  mech.check_reports(reports);
  if (const auto* e = std::get_if<EnumerableCoins>(&mech.coin_model())) {
    UniformStream stream(derive_seed(seed, 0));
    double u = stream.next();
    double acc = 0.0;
    std::size_t outcome = e->probabilities.size() - 1;
    for (std::size_t k = 0; k < e->probabilities.size(); ++k) {
      acc += e->probabilities[k];
      if (u < acc) {
        outcome = k;
        break;
      }
    }
    return run_with_coin(mech, reports, Coin::enumerable(outcome));
  }
  return run_with_coin(mech, reports, Coin::streamed(seed));
}

Realization run_with_coin(const Mechanism& mech, const Profile& reports,
                          Coin coin) {
  CoinOutcome outcome;
  outcome.enumerable = coin.is_enumerable();
  outcome.index_or_seed =
      coin.is_enumerable() ? coin.outcome_index() : coin.seed();
  Allocation a = mech.allocate(reports, coin);
  std::vector<Money> p = mech.pay(reports, coin, a);
  return Realization{std::move(a), std::move(p), outcome};
}

Money expected_payoff(const Mechanism& mech, const Profile& reports,
                      const Valuation& as_if_true, int player,
                      const Method& method) {
  if (const auto* mc = std::get_if<MonteCarlo>(&method)) {
    return monte_carlo_payoff(mech, reports, as_if_true, player, *mc).mean;
  }
  Money total = 0.0;
  for (const auto& atom : mech.payoff_distribution(reports, player)) {
    total += atom.probability *
             (valuation_value(as_if_true, atom.bundle) - atom.payment);
  }
  return total;
}

MonteCarloEstimate monte_carlo_payoff(const Mechanism& mech,
                                      const Profile& reports,
                                      const Valuation& as_if_true, int player,
                                      const MonteCarlo& mc) {
  if (mc.samples <= 0) throw InputError("sample count must be positive");
  if (player < 0 || player >= mech.n_players()) {
    throw InputError("player index out of range");
  }
  double mean = 0.0, m2 = 0.0;
  for (long k = 0; k < mc.samples; ++k) {
    Realization r = run(mech, reports, derive_seed(mc.seed, k));
    double payoff = valuation_value(as_if_true, r.allocation.bundle_of(player)) -
                    r.payments[player];
    double delta = payoff - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (payoff - mean);
  }
  double var = mc.samples > 1 ? m2 / static_cast<double>(mc.samples - 1) : 0.0;
  return {mean, std::sqrt(var), mc.samples};
}

}  // namespace riskmech
