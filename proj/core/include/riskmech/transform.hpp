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
// The risk-neutralizing payment rewrite. Given a mechanism whose truthful
// expected payoff is Pi_i(reports), the rewritten payment
//
//   p'_i = value(report_i, realized bundle) - Pi_i
//
// keeps the allocation rule and every expected payment unchanged while
// making a truthful player's realized payoff constant across the
// mechanism's coins. Pi can come from the exact oracle, from Monte-Carlo
// estimation, or from a precomputed table.

#ifndef RISKMECH_TRANSFORM_HPP_
#define RISKMECH_TRANSFORM_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "riskmech/instance.hpp"
#include "riskmech/mechanism.hpp"

namespace riskmech {

struct TransformedMechanism {
  Mechanism mechanism;  // ready to run; same coin model as the base
  Method method;        // how Pi was obtained
};

// Dominant-strategy variant: Pi_i depends on the full report profile.
// Payments are a deterministic function of reports; with the Monte-Carlo
// method the estimation seed is derived from (method seed, reports, player)
// and fixed at transform time, never from the execution seed.
// Throws UnsupportedMethodError when Exact is requested but the base has
// no exact oracle.
TransformedMechanism transform(const Mechanism& base, const Method& method);

// Bayesian variant: Pi_i depends only on the player's own report, averaging
// the truthful payoff over the other players' prior types and the coins.
// Throws InputError when the instance carries no prior.
TransformedMechanism transform_bayesian(const Mechanism& base,
                                        const Instance& instance,
                                        const Method& method);
TransformedMechanism transform_bayesian(const Mechanism& base,
                                        const Prior& prior,
                                        const Method& method);

// Interim truthful expected payoff used by the Bayesian variant.
Money interim_truthful_payoff(const Mechanism& base, const Prior& prior,
                              int player, const Valuation& own_report,
                              const Method& method);

struct PayoffTableEntry {
  Money estimate = 0.0;
  double std_dev = 0.0;  // sample std of one draw; 0 when exact
  long samples = 0;
};

// Truthful expected payoffs per (report profile, player), keyed by the
// profile's canonical encoding.
struct PayoffTable {
  std::map<std::string, std::vector<PayoffTableEntry>> entries;

  const std::vector<PayoffTableEntry>& lookup(const Profile& reports) const;
};

// Monte-Carlo estimates of Pi over a grid of report profiles. Entry
// (profile index g, player i) uses the derived seed
// derive_seed(mc.seed, g * n_players + i), so estimates are independent of
// evaluation order.
PayoffTable estimated_payoff_table(const Mechanism& base,
                                   std::span<const Profile> grid,
                                   const MonteCarlo& mc);

// Exact table over a grid, for side-by-side comparison with estimates.
PayoffTable exact_payoff_table(const Mechanism& base,
                               std::span<const Profile> grid);

// Applies the payment rewrite with Pi read from the table. Running the
// result on a profile absent from the table throws InputError.
TransformedMechanism transform_with_table(const Mechanism& base,
                                          const PayoffTable& table);

}  // namespace riskmech

#endif  // RISKMECH_TRANSFORM_HPP_
