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

#include "riskmech/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "riskmech/errors.hpp"

namespace riskmech {

namespace {

const SingleItemValuation& require_single_item(const Valuation& v, int player) {
  const auto* s = std::get_if<SingleItemValuation>(&v);
  if (s == nullptr) {
    throw InputError("player " + std::to_string(player) +
                     ": this mechanism takes single-item reports");
  }
  return *s;
}

void validate_menu(const LotteryMenu& menu, int player) {
  const std::string who = "menu for player " + std::to_string(player);
  if (menu.entries.empty()) throw InputError(who + ": no entries");
  if (menu.entries.front().min_report != 0.0) {
    throw InputError(who + ": first region must start at report 0");
  }
  double prev = -1.0;
  for (const MenuEntry& e : menu.entries) {
    if (!(e.min_report > prev)) {
      throw InputError(who + ": region thresholds must be strictly increasing");
    }
    prev = e.min_report;
    if (!(e.alloc_prob >= 0.0) || !(e.alloc_prob <= 1.0)) {
      throw InputError(who + ": allocation probability outside [0, 1]");
    }
    if (!(e.charge >= 0.0) || !std::isfinite(e.charge)) {
      throw InputError(who + ": charge must be finite and nonnegative");
    }
  }
}

const MenuEntry& menu_region(const LotteryMenu& menu, double report) {
  const MenuEntry* hit = &menu.entries.front();
  for (const MenuEntry& e : menu.entries) {
    if (e.min_report <= report) hit = &e;
  }
  return *hit;
}

// Cut points of [0, 1) at the menu's distinct interior probabilities. A
// region with probability q is served exactly by the outcomes whose
// interval sits inside [0, q), so the partition is report-independent.
std::vector<double> menu_partition_edges(const LotteryMenu& menu) {
  std::vector<double> edges = {0.0, 1.0};
  for (const MenuEntry& e : menu.entries) {
    if (e.alloc_prob > 0.0 && e.alloc_prob < 1.0) edges.push_back(e.alloc_prob);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

bool outcome_allocates(const std::vector<double>& edges, std::size_t k,
                       double prob) {
  return edges[k + 1] <= prob + 1e-12;
}

// Expected surplus accruing to everyone except `player` at the point x.
Money others_welfare(const FractionalAllocation& x,
                     std::span<const CoverageValuation> reports, int player) {
  const auto q = rounding_marginals(x);
  Money total = 0.0;
  for (int k = 0; k < static_cast<int>(reports.size()); ++k) {
    if (k == player) continue;
    total += expected_value_product(reports[k], q[k]);
  }
  return total;
}

// Memoizes the (deterministic) optimizer and payment work per report
// profile, so replaying runs and auditing grids does not re-solve.
struct CoverageCache {
  std::mutex mu;
  std::map<std::string, WelfareSolution> solutions;
  std::map<std::string, std::vector<Money>> payments;
};

WelfareSolution solve_cached(CoverageCache& cache, const Profile& reports,
                             const OptimizerParams& params) {
  const std::string key = profile_key(reports);
  {
    std::scoped_lock lock(cache.mu);
    auto it = cache.solutions.find(key);
    if (it != cache.solutions.end()) return it->second;
  }
  const auto cov = coverage_profile(reports);
  WelfareSolution sol = maximize_expected_welfare(cov, params);
  std::scoped_lock lock(cache.mu);
  return cache.solutions.emplace(key, std::move(sol)).first->second;
}

std::vector<Money> payments_cached(CoverageCache& cache,
                                   const Profile& reports,
                                   const OptimizerParams& params) {
  const std::string key = profile_key(reports);
  {
    std::scoped_lock lock(cache.mu);
    auto it = cache.payments.find(key);
    if (it != cache.payments.end()) return it->second;
  }
  const auto cov = coverage_profile(reports);
  const WelfareSolution sol = solve_cached(cache, reports, params);
  const int n = static_cast<int>(reports.size());
  std::vector<Money> p(n, 0.0);
  for (int i = 0; i < n; ++i) {
    Profile zeroed = reports;
    zeroed[i] = scale_valuation(reports[i], 0.0);
    const WelfareSolution without = solve_cached(cache, zeroed, params);
    p[i] = others_welfare(without.x, cov, i) - others_welfare(sol.x, cov, i);
  }
  std::scoped_lock lock(cache.mu);
  return cache.payments.emplace(key, std::move(p)).first->second;
}

}  // namespace

Mechanism make_second_price(int n_players) {
  return make_second_price(n_players, {"item"});
}

Mechanism make_second_price(int n_players, std::vector<std::string> items) {
  if (items.size() != 1) {
    throw InputError("second-price auction sells exactly one item");
  }
  auto allocate = [](const Profile& reports, Coin&) {
    Allocation a;
    int best = 0;
    for (int i = 0; i < static_cast<int>(reports.size()); ++i) {
      const auto& v = require_single_item(reports[i], i);
      if (v.value > require_single_item(reports[best], best).value) best = i;
    }
    a.winner = {best};
    return a;
  };
  auto pay = [](const Profile& reports, Coin&, const Allocation& a) {
    std::vector<Money> p(reports.size(), 0.0);
    const int winner = a.winner[0];
    Money second = 0.0;
    for (int i = 0; i < static_cast<int>(reports.size()); ++i) {
      if (i == winner) continue;
      second = std::max(second, require_single_item(reports[i], i).value);
    }
    p[winner] = second;
    return p;
  };
  return Mechanism(n_players, std::move(items),
                   EnumerableCoins{{1.0}}, std::move(allocate), std::move(pay));
}

Mechanism make_lottery(const LotteryMenu& menu) {
  return make_lottery_profile({menu}, {"prize"});
}

Mechanism make_lottery_profile(std::vector<LotteryMenu> menus) {
  std::vector<std::string> items;
  for (std::size_t i = 0; i < menus.size(); ++i) {
    items.push_back("prize_" + std::to_string(i));
  }
  return make_lottery_profile(std::move(menus), std::move(items));
}

Mechanism make_lottery_profile(std::vector<LotteryMenu> menus,
                               std::vector<std::string> items) {
  const int n = static_cast<int>(menus.size());
  if (n == 0) throw InputError("lottery profile needs at least one menu");
  if (items.size() != menus.size()) {
    throw InputError("lottery profile needs one item per player");
  }
  for (int i = 0; i < n; ++i) validate_menu(menus[i], i);

  auto shared = std::make_shared<std::vector<LotteryMenu>>(std::move(menus));
  std::vector<std::vector<double>> edges;
  std::vector<std::size_t> radix;
  for (const LotteryMenu& m : *shared) {
    edges.push_back(menu_partition_edges(m));
    radix.push_back(edges.back().size() - 1);
  }
  std::size_t total = 1;
  for (std::size_t k : radix) total *= k;

  std::vector<double> probs(total, 1.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int i = 0; i < n; ++i) {
      const std::size_t k = rest % radix[i];
      rest /= radix[i];
      probs[idx] *= edges[i][k + 1] - edges[i][k];
    }
  }

  auto decode = [radix](std::size_t idx, int player) {
    for (int i = 0; i < player; ++i) idx /= radix[i];
    return idx % radix[player];
  };

  auto allocate = [shared, edges, decode, n](const Profile& reports,
                                             Coin& coin) {
    Allocation a;
    a.winner.assign(n, kNoWinner);
    for (int i = 0; i < n; ++i) {
      const auto& v = require_single_item(reports[i], i);
      const MenuEntry& region = menu_region((*shared)[i], v.value);
      const std::size_t k = decode(coin.outcome_index(), i);
      if (outcome_allocates(edges[i], k, region.alloc_prob)) a.winner[i] = i;
    }
    return a;
  };
  auto pay = [shared, n](const Profile& reports, Coin&, const Allocation&) {
    std::vector<Money> p(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto& v = require_single_item(reports[i], i);
      p[i] = menu_region((*shared)[i], v.value).charge;
    }
    return p;
  };
  auto payoff_dist = [shared](const Profile& reports, int player) {
    const auto& v = require_single_item(reports[player], player);
    const MenuEntry& region = menu_region((*shared)[player], v.value);
    PayoffDistribution dist;
    if (region.alloc_prob > 0.0) {
      dist.push_back({{player}, region.charge, region.alloc_prob});
    }
    if (region.alloc_prob < 1.0) {
      dist.push_back({{}, region.charge, 1.0 - region.alloc_prob});
    }
    return dist;
  };
  return Mechanism(n, std::move(items), EnumerableCoins{std::move(probs)},
                   std::move(allocate), std::move(pay), std::move(payoff_dist));
}

Mechanism make_coverage_auction(int n_players, std::vector<std::string> items,
                                const OptimizerParams& params) {
  const int m = static_cast<int>(items.size());
  auto cache = std::make_shared<CoverageCache>();

  auto allocate = [cache, params, n_players, m](const Profile& reports,
                                                Coin& coin) {
    const WelfareSolution sol = solve_cached(*cache, reports, params);
    Allocation a;
    a.winner.assign(m, kNoWinner);
    for (int j = 0; j < m; ++j) {
      const double u = coin.uniform();
      double acc = 0.0;
      double prefix = 1.0;
      for (int i = 0; i < n_players; ++i) {
        const double w = prefix * (1.0 - std::exp(-sol.x.at(i, j)));
        if (u < acc + w) {
          a.winner[j] = i;
          break;
        }
        acc += w;
        prefix *= std::exp(-sol.x.at(i, j));
      }
    }
    return a;
  };
  auto pay = [cache, params](const Profile& reports, Coin&, const Allocation&) {
    return payments_cached(*cache, reports, params);
  };
  auto payoff_dist = [cache, params, m](const Profile& reports, int player) {
    if (m > 20) {
      throw UnsupportedMethodError(
          "exact bundle enumeration not supported past 20 items; "
          "use Monte Carlo");
    }
    const WelfareSolution sol = solve_cached(*cache, reports, params);
    const Money payment = payments_cached(*cache, reports, params)[player];
    const std::vector<double> q = rounding_marginals(sol.x)[player];
    PayoffDistribution dist;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      PayoffAtom atom;
      atom.payment = payment;
      atom.probability = 1.0;
      for (int j = 0; j < m; ++j) {
        if (mask & (std::size_t{1} << j)) {
          atom.bundle.push_back(j);
          atom.probability *= q[j];
        } else {
          atom.probability *= 1.0 - q[j];
        }
      }
      if (atom.probability > 0.0) dist.push_back(std::move(atom));
    }
    return dist;
  };
  return Mechanism(n_players, std::move(items), StreamedCoins{},
                   std::move(allocate), std::move(pay), std::move(payoff_dist));
}

Money coverage_externality_payment(const Profile& reports, int player,
                                   const OptimizerParams& params) {
  if (player < 0 || player >= static_cast<int>(reports.size())) {
    throw InputError("player index out of range");
  }
  const auto cov = coverage_profile(reports);
  const WelfareSolution with = maximize_expected_welfare(cov, params);
  Profile zeroed = reports;
  zeroed[player] = scale_valuation(reports[player], 0.0);
  const WelfareSolution without =
      maximize_expected_welfare(coverage_profile(zeroed), params);
  return others_welfare(without.x, cov, player) -
         others_welfare(with.x, cov, player);
}

Mechanism build_mechanism(const MechanismSpec& spec, const Instance& instance,
                          const OptimizerParams& params) {
  const int n = instance.n_players();
  return std::visit(
      [&](const auto& s) -> Mechanism {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SecondPriceSpec>) {
          return make_second_price(n, instance.items);
        } else if constexpr (std::is_same_v<T, LotterySpec>) {
          if (static_cast<int>(s.menus.size()) != n) {
            throw InputError("lottery mechanism needs one menu per player");
          }
          return make_lottery_profile(s.menus, instance.items);
        } else {
          return make_coverage_auction(n, instance.items, params);
        }
      },
      spec);
}

bool is_coverage_spec(const MechanismSpec& spec) {
  return std::holds_alternative<CoverageAuctionSpec>(spec);
}

}  // namespace riskmech
