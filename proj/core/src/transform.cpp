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

#include "riskmech/transform.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <utility>

#include "riskmech/errors.hpp"
#include "riskmech/rng.hpp"

namespace riskmech {

namespace {

// Pi provider: truthful expected payoff per (reports, player), memoized so
// payments and payoff distributions never re-estimate.
class PiCache {
 public:
  using Fn = std::function<Money(const Profile&, int)>;

  explicit PiCache(Fn compute) : compute_(std::move(compute)) {}

  Money get(const Profile& reports, int player, const std::string& key) {
    const std::string full = key + "#" + std::to_string(player);
    {
      std::scoped_lock lock(mu_);
      auto it = values_.find(full);
      if (it != values_.end()) return it->second;
    }
    const Money pi = compute_(reports, player);
    std::scoped_lock lock(mu_);
    return values_.emplace(full, pi).first->second;
  }

 private:
  Fn compute_;
  std::mutex mu_;
  std::map<std::string, Money> values_;
};

// Builds the rewritten mechanism around any Pi provider. `pi_key` maps a
// report profile to the cache key Pi actually depends on (the full profile
// for the dominant-strategy variant, the player's own report for the
// Bayesian one; the player index is appended by the cache).
TransformedMechanism rewrite_payments(
    const Mechanism& base, Method method, PiCache::Fn compute_pi,
    std::function<std::string(const Profile&, int)> pi_key) {
  auto cache = std::make_shared<PiCache>(std::move(compute_pi));
  auto key = std::move(pi_key);
  auto base_copy = std::make_shared<Mechanism>(base);

  auto pi_of = [cache, key](const Profile& reports, int player) {
    return cache->get(reports, player, key(reports, player));
  };

  auto allocate = [base_copy](const Profile& reports, Coin& coin) {
    return base_copy->allocate(reports, coin);
  };
  auto pay = [base_copy, pi_of](const Profile& reports, Coin& coin,
                                const Allocation& a) {
    std::vector<Money> p(reports.size(), 0.0);
    for (int i = 0; i < static_cast<int>(reports.size()); ++i) {
      p[i] = valuation_value(reports[i], a.bundle_of(i)) - pi_of(reports, i);
    }
    return p;
  };

  Mechanism::PayoffDistFn payoff_dist = nullptr;
  if (base.has_exact_oracle()) {
    payoff_dist = [base_copy, pi_of](const Profile& reports, int player) {
      PayoffDistribution dist = base_copy->payoff_distribution(reports, player);
      const Money pi = pi_of(reports, player);
      for (PayoffAtom& atom : dist) {
        atom.payment = valuation_value(reports[player], atom.bundle) - pi;
      }
      return dist;
    };
  }

  Method oracle = base.has_exact_oracle() ? Method{Exact{}} : base.payoff_oracle();
  Mechanism mech(base.n_players(), base.items(), base.coin_model(),
                 std::move(allocate), std::move(pay), std::move(payoff_dist),
                 oracle);
  return TransformedMechanism{std::move(mech), std::move(method)};
}

std::string own_report_key(const Profile& reports, int player) {
  return canonical_encoding(reports[player]);
}

std::string full_profile_key(const Profile& reports, int) {
  return profile_key(reports);
}

}  // namespace

TransformedMechanism transform(const Mechanism& base, const Method& method) {
  if (std::holds_alternative<Exact>(method) && !base.has_exact_oracle()) {
    throw UnsupportedMethodError(
        "exact transform needs an exact payoff oracle on the base mechanism");
  }
  auto base_copy = std::make_shared<Mechanism>(base);
  PiCache::Fn compute = [base_copy, method](const Profile& reports,
                                            int player) -> Money {
    if (std::holds_alternative<Exact>(method)) {
      return expected_payoff(*base_copy, reports, reports[player], player,
                             Exact{});
    }
    const auto& mc = std::get<MonteCarlo>(method);
    MonteCarlo derived = mc;
    derived.seed = derive_seed(derive_seed(mc.seed, hash_bytes(profile_key(reports))),
                               static_cast<std::uint64_t>(player));
    return monte_carlo_payoff(*base_copy, reports, reports[player], player,
                              derived)
        .mean;
  };
  return rewrite_payments(base, method, std::move(compute), &full_profile_key);
}

Money interim_truthful_payoff(const Mechanism& base, const Prior& prior,
                              int player, const Valuation& own_report,
                              const Method& method) {
  if (prior.n_players() != base.n_players()) {
    throw InputError("prior does not cover every player");
  }
  // Enumerate the others' joint support (independent per player) and weight
  // the truthful conditional payoff by the product probability.
  const int n = base.n_players();
  Money total = 0.0;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Profile reports;
    double prob = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k == player) {
        reports.push_back(own_report);
      } else {
        const PriorEntry& e = prior.player(k)[idx[k]];
        reports.push_back(e.valuation);
        prob *= e.probability;
      }
    }
    if (prob > 0.0) {
      Money conditional;
      if (std::holds_alternative<Exact>(method)) {
        conditional =
            expected_payoff(base, reports, own_report, player, Exact{});
      } else {
        const auto& mc = std::get<MonteCarlo>(method);
        MonteCarlo derived = mc;
        derived.seed = derive_seed(
            derive_seed(mc.seed, hash_bytes(profile_key(reports))),
            static_cast<std::uint64_t>(player));
        conditional =
            monte_carlo_payoff(base, reports, own_report, player, derived).mean;
      }
      total += prob * conditional;
    }
    // Mixed-radix increment over everyone but `player`.
    int k = 0;
    for (; k < n; ++k) {
      if (k == player) continue;
      if (++idx[k] < prior.player(k).size()) break;
      idx[k] = 0;
    }
    if (k == n) break;
  }
  return total;
}

TransformedMechanism transform_bayesian(const Mechanism& base,
                                        const Instance& instance,
                                        const Method& method) {
  if (!instance.prior.has_value()) {
    throw InputError("Bayesian transform needs an instance with a prior");
  }
  return transform_bayesian(base, *instance.prior, method);
}

TransformedMechanism transform_bayesian(const Mechanism& base,
                                        const Prior& prior,
                                        const Method& method) {
  if (std::holds_alternative<Exact>(method) && !base.has_exact_oracle()) {
    throw UnsupportedMethodError(
        "exact transform needs an exact payoff oracle on the base mechanism");
  }
  auto base_copy = std::make_shared<Mechanism>(base);
  auto prior_copy = std::make_shared<Prior>(prior);
  PiCache::Fn compute = [base_copy, prior_copy, method](const Profile& reports,
                                                        int player) -> Money {
    return interim_truthful_payoff(*base_copy, *prior_copy, player,
                                   reports[player], method);
  };
  return rewrite_payments(base, method, std::move(compute), &own_report_key);
}

const std::vector<PayoffTableEntry>& PayoffTable::lookup(
    const Profile& reports) const {
  auto it = entries.find(profile_key(reports));
  if (it == entries.end()) {
    throw InputError("report profile missing from payoff table");
  }
  return it->second;
}

PayoffTable estimated_payoff_table(const Mechanism& base,
                                   std::span<const Profile> grid,
                                   const MonteCarlo& mc) {
  PayoffTable table;
  const int n = base.n_players();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Profile& reports = grid[g];
    std::vector<PayoffTableEntry> row(n);
    for (int i = 0; i < n; ++i) {
      MonteCarlo derived = mc;
      derived.seed =
          derive_seed(mc.seed, g * static_cast<std::uint64_t>(n) + i);
      const MonteCarloEstimate est =
          monte_carlo_payoff(base, reports, reports[i], i, derived);
      row[i] = {est.mean, est.sample_std, est.samples};
    }
    table.entries[profile_key(reports)] = std::move(row);
  }
  return table;
}

PayoffTable exact_payoff_table(const Mechanism& base,
                               std::span<const Profile> grid) {
  PayoffTable table;
  const int n = base.n_players();
  for (const Profile& reports : grid) {
    std::vector<PayoffTableEntry> row(n);
    for (int i = 0; i < n; ++i) {
      row[i] = {expected_payoff(base, reports, reports[i], i, Exact{}), 0.0, 0};
    }
    table.entries[profile_key(reports)] = std::move(row);
  }
  return table;
}

TransformedMechanism transform_with_table(const Mechanism& base,
                                          const PayoffTable& table) {
  auto shared = std::make_shared<PayoffTable>(table);
  PiCache::Fn compute = [shared](const Profile& reports, int player) -> Money {
    return shared->lookup(reports).at(player).estimate;
  };
  return rewrite_payments(base, MonteCarlo{}, std::move(compute),
                          &full_profile_key);
}

}  // namespace riskmech
