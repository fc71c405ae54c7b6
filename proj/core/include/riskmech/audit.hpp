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
// Brute-force incentive audits over finite type spaces. Every audit
// enumerates all (player, true profile, deviation) triples from the grids,
// compares the truthful and deviating expectations, and reports the worst
// margin with reproducible witnesses. Monte-Carlo audits attach 99%
// confidence intervals and say "inconclusive" when an interval straddles
// the tolerance instead of guessing.

#ifndef RISKMECH_AUDIT_HPP_
#define RISKMECH_AUDIT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskmech/instance.hpp"
#include "riskmech/mechanism.hpp"
#include "riskmech/transform.hpp"
#include "riskmech/utility.hpp"

namespace riskmech {

enum class Verdict { kPass, kFail, kInconclusive };

std::string verdict_name(Verdict v);

// One failing (or inconclusive) check. Indices address the grids handed to
// the audit so the two expectations can be recomputed from the tuple:
//   - tie/risk-averse/apx: `profile` holds one type-space index per player;
//     `deviation` indexes the type space of `player`.
//   - bic: `profile` holds a single index, the player's true type in the
//     prior support; `deviation` indexes the type space of `player`.
//   - claims: `profile` indexes the type space; `deviation` is -1 and
//     `check` names the violated claim.
struct AuditWitness {
  int player = -1;
  std::vector<int> profile;
  int deviation = -1;
  std::string check;  // utility name, claim id; empty for payoff checks
  double margin = 0.0;
  double ci_halfwidth = 0.0;  // 0 for exact expectations
  bool inconclusive = false;
  bool additive_fallback = false;
  std::vector<std::string> profile_encoding;
  std::string deviation_encoding;
};

struct AuditReport {
  std::string kind;  // "tie", "risk-averse", "bic", "apx", "claims"
  Verdict verdict = Verdict::kPass;
  double worst_margin = 0.0;  // min over checks of LHS - required RHS
  double tolerance = 0.0;
  double epsilon = 0.0;  // apx factor; 0 elsewhere
  std::string method;
  long n_checks = 0;
  bool degraded = false;  // apx: some check fell back to additive margins
  std::vector<AuditWitness> witnesses;  // sorted by margin, then tuple
};

// E[u(value(as_if_true, bundle) - payment)], expectation over the
// mechanism's coins at the reported profile. The utility is applied per
// realization, never to the mean.
Money expected_utility(const Mechanism& mech, const Profile& reports,
                       const Valuation& as_if_true, int player,
                       const UtilityModel& u, const Method& method);

// Truthful reporting beats every unilateral grid deviation in expected
// payoff (risk-neutral).
AuditReport audit_tie(const Mechanism& mech, const TypeSpace& space,
                      const Method& method, double tol);

// Same quantifiers, but in expected utility for every model in `utilities`.
AuditReport audit_risk_averse(const Mechanism& mech, const TypeSpace& space,
                              std::span<const UtilityModel> utilities,
                              const Method& method, double tol);

// Interim (Bayesian) check: true types range over the player's prior
// support, deviations over the type space, expectations over the others'
// prior and the coins. With risk_averse = false only the risk-neutral
// payoff is checked and `utilities` is ignored.
AuditReport audit_bic(const Mechanism& mech, const Prior& prior,
                      const TypeSpace& space,
                      std::span<const UtilityModel> utilities,
                      const Method& method, double tol, bool risk_averse);

// Approximate incentive compatibility at factor (1 - epsilon):
//   E[u(truthful)] >= (1 - epsilon) * E[u(deviation)] - tol.
// The multiplicative reading needs nonnegative utility values; any check
// that sees a negative value falls back to the additive margin
// E[truthful] - E[deviation] and flags the report as degraded.
AuditReport audit_apx(const Mechanism& mech, const TypeSpace& space,
                      std::span<const UtilityModel> utilities, double epsilon,
                      const Method& method, double tol);

// Structural claims of the payment rewrite, checked per grid profile:
//   (a) per-player expected payments are preserved,
//   (b) a truthful player's realized payoff is constant across coins,
//   (c) base and rewritten runs allocate identically for every seed,
//   (d) expected revenue is preserved.
// Margins are -|discrepancy|, so pass means every discrepancy is <= tol.
AuditReport verify_transform_claims(const Mechanism& base,
                                    const Mechanism& transformed,
                                    const TypeSpace& space,
                                    std::span<const std::uint64_t> seeds,
                                    double tol);

// Smallest realized payoff across all audit checks (truthful and
// deviating), used to place LogShifted's domain shift. Exact oracles
// enumerate; otherwise falls back to seeded sampling.
Money min_audit_payoff(const Mechanism& mech, const TypeSpace& space);

// All report profiles of a type space, in mixed-radix order (player 0
// fastest).
std::vector<std::vector<int>> enumerate_index_profiles(
    std::span<const std::size_t> sizes);
std::vector<Profile> enumerate_profiles(const TypeSpace& space);

}  // namespace riskmech

#endif  // RISKMECH_AUDIT_HPP_
