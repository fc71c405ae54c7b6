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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "riskmech/audit.hpp"
#include "riskmech/errors.hpp"
#include "riskmech/mechanism.hpp"
#include "riskmech/mechanisms.hpp"
#include "riskmech/transform.hpp"
#include "riskmech/utility.hpp"

using namespace riskmech;

namespace {

Mechanism half_lottery() {
  return make_lottery(LotteryMenu{{{0.0, 0.0, 0.0}, {5.0, 0.5, 1.0}}});
}

Mechanism free_lottery() {
  return make_lottery(LotteryMenu{{{0.0, 0.0, 0.0}, {5.0, 0.5, 0.0}}});
}

TypeSpace one_player_space() {
  return {{Valuation{SingleItemValuation(1.0)},
           Valuation{SingleItemValuation(10.0)}}};
}

std::vector<std::uint64_t> some_seeds() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 16; ++k) seeds.push_back(k);
  return seeds;
}

}  // namespace

TEST_CASE("expected utility applies the curve per realization") {
  Mechanism lot = half_lottery();
  Profile reports = {Valuation{SingleItemValuation(10.0)}};
  UtilityModel c1 = UtilityModel::cara(1.0);
  CHECK(expected_utility(lot, reports, reports[0], 0, c1, Exact{}) ==
        doctest::Approx(-0.35920261913156587).epsilon(1e-15));
  CHECK(expected_utility(lot, reports, reports[0], 0,
                         UtilityModel::identity(), Exact{}) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("risk-neutral audit accepts the truthful lottery") {
  AuditReport r = audit_tie(half_lottery(), one_player_space(), Exact{}, 1e-9);
  CHECK(r.kind == "tie");
  CHECK(r.verdict == Verdict::kPass);
  CHECK(r.n_checks == 4);
  CHECK(r.worst_margin >= -1e-9);
  CHECK(r.witnesses.empty());
  CHECK(r.method == "exact");
}

TEST_CASE("risk-neutral audit rejects a rigged menu") {
  // Charging 6 in the upper band makes the truthful high report lose to
  // shading down into the free band.
  Mechanism rigged =
      make_lottery(LotteryMenu{{{0.0, 0.0, 0.0}, {5.0, 0.5, 6.0}}});
  AuditReport r = audit_tie(rigged, one_player_space(), Exact{}, 1e-9);
  CHECK(r.verdict == Verdict::kFail);
  REQUIRE(!r.witnesses.empty());
  // Truthful at 10 nets 0.5 * 10 - 6 = -1; deviating to 1 nets 0.
  CHECK(r.worst_margin == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.witnesses[0].deviation_encoding == "single_item:1");
}

TEST_CASE("risk-averse audit flags the exposed lottery and names the curves") {
  AuditReport r = audit_risk_averse(half_lottery(), one_player_space(),
                                    standard_battery(-1.0), Exact{}, 1e-9);
  CHECK(r.kind == "risk-averse");
  CHECK(r.verdict == Verdict::kFail);
  CHECK(r.n_checks == 24);
  REQUIRE(r.witnesses.size() == 2);

  // Witnesses arrive worst first.
  CHECK(r.witnesses[0].check == "cara(5)");
  CHECK(r.witnesses[0].margin ==
        doctest::Approx(-14.64131591025766).epsilon(1e-12));
  CHECK(r.witnesses[1].check == "cara(1)");
  CHECK(r.witnesses[1].margin ==
        doctest::Approx(-0.35920261913156587).epsilon(1e-12));
  CHECK(r.worst_margin == doctest::Approx(-14.64131591025766).epsilon(1e-12));

  CHECK(r.witnesses[1].player == 0);
  CHECK(r.witnesses[1].profile == std::vector<int>{1});
  CHECK(r.witnesses[1].deviation == 0);
  CHECK(r.witnesses[1].profile_encoding ==
        std::vector<std::string>{"single_item:10"});
  CHECK(r.witnesses[1].deviation_encoding == "single_item:1");
}

TEST_CASE("witness margins can be recomputed from their indices") {
  TypeSpace space = one_player_space();
  Mechanism lot = half_lottery();
  std::vector<UtilityModel> battery = {UtilityModel::cara(1.0)};
  AuditReport r = audit_risk_averse(lot, space, battery, Exact{}, 1e-9);
  REQUIRE(r.witnesses.size() == 1);
  const AuditWitness& w = r.witnesses[0];

  Profile truthful;
  for (std::size_t i = 0; i < space.size(); ++i) {
    truthful.push_back(space[i][w.profile[i]]);
  }
  Profile deviating = truthful;
  deviating[w.player] = space[w.player][w.deviation];

  double e_t = expected_utility(lot, truthful, truthful[w.player], w.player,
                                battery[0], Exact{});
  double e_d = expected_utility(lot, deviating, truthful[w.player], w.player,
                                battery[0], Exact{});
  CHECK(w.margin == doctest::Approx(e_t - e_d).epsilon(1e-15));
}

TEST_CASE("the rewritten lottery passes the full battery") {
  TransformedMechanism t = transform(half_lottery(), Exact{});
  double floor = min_audit_payoff(t.mechanism, one_player_space());
  AuditReport r = audit_risk_averse(t.mechanism, one_player_space(),
                                    standard_battery(floor), Exact{}, 1e-9);
  CHECK(r.verdict == Verdict::kPass);
  CHECK(r.n_checks == 24);
  CHECK(r.worst_margin >= -1e-9);
}

TEST_CASE("risk-averse audit needs at least one utility") {
  std::vector<UtilityModel> empty;
  CHECK_THROWS_AS(audit_risk_averse(half_lottery(), one_player_space(), empty,
                                    Exact{}, 1e-9),
                  InputError);
}

TEST_CASE("identity-only risk-averse audit agrees with the payoff audit") {
  std::vector<UtilityModel> identity = {UtilityModel::identity()};
  for (const Mechanism& mech : {half_lottery(), free_lottery()}) {
    AuditReport tie = audit_tie(mech, one_player_space(), Exact{}, 1e-9);
    AuditReport ra = audit_risk_averse(mech, one_player_space(), identity,
                                       Exact{}, 1e-9);
    CHECK(tie.verdict == ra.verdict);
    CHECK(tie.worst_margin == doctest::Approx(ra.worst_margin).epsilon(1e-15));
  }
}

TEST_CASE("sampled audits mark noise-dominated margins inconclusive") {
  // The self-comparison margin is exactly zero, so two independent sample
  // means almost surely leave the interval straddling the tolerance.
  AuditReport r = audit_tie(half_lottery(), one_player_space(),
                            MonteCarlo{10000, 1}, 1e-9);
  CHECK(r.verdict == Verdict::kInconclusive);
  REQUIRE(!r.witnesses.empty());
  bool saw_inconclusive = false;
  for (const AuditWitness& w : r.witnesses) {
    if (w.inconclusive) {
      saw_inconclusive = true;
      CHECK(w.ci_halfwidth > 0.0);
      CHECK(w.margin - w.ci_halfwidth < -1e-9);
      CHECK(w.margin + w.ci_halfwidth >= -1e-9);
    }
  }
  CHECK(saw_inconclusive);
}

TEST_CASE("sampled audit of the rewritten lottery is decisively clean") {
  // Truthful payoffs are constant after the rewrite, so the truthful sample
  // variance vanishes and every margin clears its interval.
  TransformedMechanism t = transform(half_lottery(), Exact{});
  AuditReport r = audit_tie(t.mechanism, one_player_space(),
                            MonteCarlo{4000, 2}, 1e-9);
  CHECK(r.verdict == Verdict::kPass);
}

TEST_CASE("approximate audit validates its factor") {
  std::vector<UtilityModel> battery = {UtilityModel::identity()};
  CHECK_THROWS_AS(audit_apx(half_lottery(), one_player_space(), battery, -0.1,
                            Exact{}, 1e-9),
                  InputError);
  CHECK_THROWS_AS(audit_apx(half_lottery(), one_player_space(), battery, 1.0,
                            Exact{}, 1e-9),
                  InputError);
}

TEST_CASE("approximate audit at factor one matches the strict audit") {
  TransformedMechanism t = transform(half_lottery(), Exact{});
  std::vector<UtilityModel> battery =
      standard_battery(min_audit_payoff(t.mechanism, one_player_space()));
  AuditReport strict = audit_risk_averse(t.mechanism, one_player_space(),
                                         battery, Exact{}, 1e-9);
  AuditReport apx = audit_apx(t.mechanism, one_player_space(), battery, 0.0,
                              Exact{}, 1e-9);
  CHECK(apx.kind == "apx");
  CHECK(apx.epsilon == doctest::Approx(0.0));
  CHECK(apx.verdict == strict.verdict);
  CHECK(apx.worst_margin == doctest::Approx(strict.worst_margin).epsilon(1e-12));
}

TEST_CASE("negative payoffs demote multiplicative margins to additive ones") {
  std::vector<UtilityModel> battery = {UtilityModel::identity(),
                                       UtilityModel::cara(1.0)};
  AuditReport r = audit_apx(half_lottery(), one_player_space(), battery, 0.3,
                            Exact{}, 1e-9);
  CHECK(r.degraded);
  CHECK(r.verdict == Verdict::kFail);
  bool cara_witness = false;
  for (const AuditWitness& w : r.witnesses) {
    if (w.check == "cara(1)") {
      cara_witness = true;
      CHECK(w.additive_fallback);
      CHECK(w.margin == doctest::Approx(-0.35920261913156587).epsilon(1e-12));
    }
  }
  CHECK(cara_witness);
}

TEST_CASE("nonnegative payoffs keep the multiplicative reading") {
  // A lone second-price bidder always wins for free, so every payoff audited
  // here equals the (nonnegative) true value and no additive fallback fires.
  Mechanism solo = make_second_price(1);
  TypeSpace space = {{Valuation{SingleItemValuation(1.0)},
                      Valuation{SingleItemValuation(10.0)}}};
  std::vector<UtilityModel> battery = {UtilityModel::identity(),
                                       UtilityModel::cara(1.0)};
  AuditReport r = audit_apx(solo, space, battery, 0.5, Exact{}, 1e-9);
  CHECK(r.verdict == Verdict::kPass);
  CHECK_FALSE(r.degraded);
}

TEST_CASE("interim audit over a prior") {
  Mechanism sp = make_second_price(2);
  Prior prior({{{Valuation{SingleItemValuation(2.0)}, 1.0}},
               {{Valuation{SingleItemValuation(0.0)}, 0.5},
                {Valuation{SingleItemValuation(4.0)}, 0.5}}});
  TypeSpace space = {{Valuation{SingleItemValuation(0.0)},
                      Valuation{SingleItemValuation(2.0)},
                      Valuation{SingleItemValuation(4.0)}},
                     {Valuation{SingleItemValuation(0.0)},
                      Valuation{SingleItemValuation(4.0)}}};

  AuditReport neutral = audit_bic(sp, prior, space, {}, Exact{}, 1e-9, false);
  CHECK(neutral.kind == "bic");
  CHECK(neutral.verdict == Verdict::kPass);
  // Player 0 has one prior type and three deviations; player 1 two of each.
  CHECK(neutral.n_checks == 1 * 3 + 2 * 2);

  TransformedMechanism t = transform_bayesian(sp, prior, Exact{});
  std::vector<UtilityModel> battery = standard_battery(-4.0);
  AuditReport averse =
      audit_bic(t.mechanism, prior, space, battery, Exact{}, 1e-9, true);
  CHECK(averse.verdict == Verdict::kPass);
  CHECK(averse.n_checks == (1 * 3 + 2 * 2) * 6);
}

TEST_CASE("structural claims hold for the exact rewrite") {
  Mechanism base = half_lottery();
  TransformedMechanism t = transform(base, Exact{});
  std::vector<std::uint64_t> seeds = some_seeds();
  AuditReport r = verify_transform_claims(base, t.mechanism,
                                          one_player_space(), seeds, 1e-12);
  CHECK(r.kind == "claims");
  CHECK(r.verdict == Verdict::kPass);
  // Two profiles, each with per-player payment and constancy checks, one
  // revenue check, and one allocation check per seed.
  CHECK(r.n_checks == 2 * (2 + 1 + 16));
  CHECK(r.worst_margin >= -1e-12);
}

TEST_CASE("structural claims catch a mechanism with exposed payoffs") {
  // Comparing the base against itself: payments, revenue and allocations
  // trivially agree, but the truthful payoff is not constant across coins.
  Mechanism base = half_lottery();
  AuditReport r = verify_transform_claims(base, base, one_player_space(),
                                          some_seeds(), 1e-9);
  CHECK(r.verdict == Verdict::kFail);
  REQUIRE(!r.witnesses.empty());
  CHECK(r.witnesses[0].check == "payoff-constant");
  // The payoff gap between winning and losing at report 10 is the item
  // value, 10.
  CHECK(r.witnesses[0].margin == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK(r.witnesses[0].deviation == -1);
}

TEST_CASE("payoff floor scans every audit comparison") {
  // Lowest payoff on the grid: true value 1 reporting 10 and losing still
  // pays the band charge of 1.
  CHECK(min_audit_payoff(half_lottery(), one_player_space()) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(min_audit_payoff(free_lottery(), one_player_space()) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("profile enumeration is mixed-radix with player zero fastest") {
  std::vector<std::size_t> sizes = {2, 3};
  std::vector<std::vector<int>> all = enumerate_index_profiles(sizes);
  REQUIRE(all.size() == 6);
  CHECK(all[0] == std::vector<int>{0, 0});
  CHECK(all[1] == std::vector<int>{1, 0});
  CHECK(all[2] == std::vector<int>{0, 1});
  CHECK(all[5] == std::vector<int>{1, 2});

  std::vector<std::size_t> none;
  CHECK(enumerate_index_profiles(none).size() == 1);

  TypeSpace space = one_player_space();
  std::vector<Profile> profiles = enumerate_profiles(space);
  REQUIRE(profiles.size() == 2);
  CHECK(profile_key(profiles[0]) == "single_item:1");
  CHECK(profile_key(profiles[1]) == "single_item:10");
}
