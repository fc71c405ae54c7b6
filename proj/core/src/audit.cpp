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

#include "riskmech/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "riskmech/errors.hpp"
#include "riskmech/rng.hpp"

namespace riskmech {

namespace {

// Two-sided 99% normal quantile.
constexpr double kZ99 = 2.5758293035489004;

struct Stats {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean; 0 for exact
  double min_value = std::numeric_limits<double>::infinity();
};

Stats exact_utility_stats(const Mechanism& mech, const Profile& reports,
                          const Valuation& as_if_true, int player,
                          const UtilityModel& u) {
  Stats s;
  for (const PayoffAtom& atom : mech.payoff_distribution(reports, player)) {
    if (atom.probability <= 0.0) continue;
    const double val =
        u(valuation_value(as_if_true, atom.bundle) - atom.payment);
    s.mean += atom.probability * val;
    s.min_value = std::min(s.min_value, val);
  }
  return s;
}

Stats sampled_utility_stats(const Mechanism& mech, const Profile& reports,
                            const Valuation& as_if_true, int player,
                            const UtilityModel& u, long samples,
                            std::uint64_t seed) {
  Stats s;
  double m2 = 0.0;
  for (long k = 0; k < samples; ++k) {
    const Realization r = run(mech, reports, derive_seed(seed, k));
    const double val = u(valuation_value(as_if_true, r.allocation.bundle_of(player)) -
                         r.payments[player]);
    s.min_value = std::min(s.min_value, val);
    const double delta = val - s.mean;
    s.mean += delta / static_cast<double>(k + 1);
    m2 += delta * (val - s.mean);
  }
  if (samples > 1) {
    const double var = m2 / static_cast<double>(samples - 1);
    s.se = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
  }
  return s;
}

// Evaluates expectations for one audit. Monte-Carlo calls consume a
// deterministic sequence of derived seeds, so a fixed enumeration order
// makes the whole audit replayable from the method's seed.
class Evaluator {
 public:
  Evaluator(const Mechanism& mech, const Method& method)
      : mech_(mech), method_(method) {}

  Stats utility(const Profile& reports, const Valuation& as_if_true,
                int player, const UtilityModel& u) {
    if (std::holds_alternative<Exact>(method_)) {
      return exact_utility_stats(mech_, reports, as_if_true, player, u);
    }
    const auto& mc = std::get<MonteCarlo>(method_);
    return sampled_utility_stats(mech_, reports, as_if_true, player, u,
                                 mc.samples, derive_seed(mc.seed, counter_++));
  }

 private:
  const Mechanism& mech_;
  Method method_;
  std::uint64_t counter_ = 0;
};

struct CheckOutcome {
  double margin = 0.0;
  double hw = 0.0;
  bool fail = false;
  bool inconclusive = false;
};

CheckOutcome classify(double margin, double hw, double tol) {
  CheckOutcome c{margin, hw, false, false};
  if (margin + hw < -tol) {
    c.fail = true;
  } else if (margin - hw < -tol) {
    c.inconclusive = true;
  }
  return c;
}

void finalize(AuditReport& report) {
  bool any_fail = false;
  bool any_inconclusive = false;
  for (const AuditWitness& w : report.witnesses) {
    if (w.inconclusive) {
      any_inconclusive = true;
    } else {
      any_fail = true;
    }
  }
  report.verdict = any_fail ? Verdict::kFail
                   : any_inconclusive ? Verdict::kInconclusive
                                      : Verdict::kPass;
  std::sort(report.witnesses.begin(), report.witnesses.end(),
            [](const AuditWitness& a, const AuditWitness& b) {
              return std::tie(a.margin, a.player, a.profile, a.deviation,
                              a.check) < std::tie(b.margin, b.player,
                                                  b.profile, b.deviation,
                                                  b.check);
            });
}

void check_space(const Mechanism& mech, const TypeSpace& space) {
  if (static_cast<int>(space.size()) != mech.n_players()) {
    throw InputError("type space must list one grid per player");
  }
  for (const auto& grid : space) {
    if (grid.empty()) throw InputError("empty type grid for a player");
  }
}

// Shared engine for the per-profile deviation audits. `multiplicative`
// turns on the (1 - epsilon) factor with per-check additive fallback on
// negative utility values.
AuditReport grid_audit(const Mechanism& mech, const TypeSpace& space,
                       std::span<const UtilityModel> utilities,
                       const Method& method, double tol, std::string kind,
                       double epsilon, bool multiplicative,
                       bool record_utility_name) {
  check_space(mech, space);
  AuditReport report;
  report.kind = std::move(kind);
  report.tolerance = tol;
  report.epsilon = multiplicative ? epsilon : 0.0;
  report.method = method_name(method);

  Evaluator eval(mech, method);
  double worst = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> sizes;
  for (const auto& grid : space) sizes.push_back(grid.size());
  const auto profiles = enumerate_index_profiles(sizes);

  for (const std::vector<int>& P : profiles) {
    Profile v;
    for (std::size_t i = 0; i < P.size(); ++i) v.push_back(space[i][P[i]]);
    for (int i = 0; i < mech.n_players(); ++i) {
      for (const UtilityModel& u : utilities) {
        const Stats truthful = eval.utility(v, v[i], i, u);
        for (int d = 0; d < static_cast<int>(space[i].size()); ++d) {
          Profile v_dev = v;
          v_dev[i] = space[i][d];
          const Stats dev = eval.utility(v_dev, v[i], i, u);

          bool fallback = false;
          double margin;
          double hw;
          if (multiplicative &&
              (truthful.min_value < 0.0 || dev.min_value < 0.0)) {
            fallback = true;
            report.degraded = true;
            margin = truthful.mean - dev.mean;
            hw = kZ99 * std::hypot(truthful.se, dev.se);
          } else if (multiplicative) {
            margin = truthful.mean - (1.0 - epsilon) * dev.mean;
            hw = kZ99 * std::hypot(truthful.se, (1.0 - epsilon) * dev.se);
          } else {
            margin = truthful.mean - dev.mean;
            hw = kZ99 * std::hypot(truthful.se, dev.se);
          }
          ++report.n_checks;
          worst = std::min(worst, margin);

          const CheckOutcome out = classify(margin, hw, tol);
          if (out.fail || out.inconclusive) {
            AuditWitness w;
            w.player = i;
            w.profile = P;
            w.deviation = d;
            if (record_utility_name) w.check = u.name();
            w.margin = margin;
            w.ci_halfwidth = hw;
            w.inconclusive = out.inconclusive;
            w.additive_fallback = fallback;
            for (const Valuation& val : v) {
              w.profile_encoding.push_back(canonical_encoding(val));
            }
            w.deviation_encoding = canonical_encoding(space[i][d]);
            report.witnesses.push_back(std::move(w));
          }
        }
      }
    }
  }
  report.worst_margin = report.n_checks > 0 ? worst : 0.0;
  finalize(report);
  return report;
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    default:
      return "inconclusive";
  }
}

Money expected_utility(const Mechanism& mech, const Profile& reports,
                       const Valuation& as_if_true, int player,
                       const UtilityModel& u, const Method& method) {
  if (std::holds_alternative<Exact>(method)) {
    return exact_utility_stats(mech, reports, as_if_true, player, u).mean;
  }
  const auto& mc = std::get<MonteCarlo>(method);
  return sampled_utility_stats(mech, reports, as_if_true, player, u,
                               mc.samples, mc.seed)
      .mean;
}

AuditReport audit_tie(const Mechanism& mech, const TypeSpace& space,
                      const Method& method, double tol) {
  const UtilityModel identity[] = {UtilityModel::identity()};
  return grid_audit(mech, space, identity, method, tol, "tie", 0.0,
                    /*multiplicative=*/false, /*record_utility_name=*/false);
}

AuditReport audit_risk_averse(const Mechanism& mech, const TypeSpace& space,
                              std::span<const UtilityModel> utilities,
                              const Method& method, double tol) {
  if (utilities.empty()) throw InputError("empty utility battery");
  return grid_audit(mech, space, utilities, method, tol, "risk-averse", 0.0,
                    /*multiplicative=*/false, /*record_utility_name=*/true);
}

AuditReport audit_apx(const Mechanism& mech, const TypeSpace& space,
                      std::span<const UtilityModel> utilities, double epsilon,
                      const Method& method, double tol) {
  if (utilities.empty()) throw InputError("empty utility battery");
  if (epsilon < 0.0 || epsilon >= 1.0) {
    throw InputError("epsilon must lie in [0, 1)");
  }
  return grid_audit(mech, space, utilities, method, tol, "apx", epsilon,
                    /*multiplicative=*/true, /*record_utility_name=*/true);
}

AuditReport audit_bic(const Mechanism& mech, const Prior& prior,
                      const TypeSpace& space,
                      std::span<const UtilityModel> utilities,
                      const Method& method, double tol, bool risk_averse) {
  check_space(mech, space);
  if (prior.n_players() != mech.n_players()) {
    throw InputError("prior must cover every player");
  }
  const UtilityModel identity[] = {UtilityModel::identity()};
  std::span<const UtilityModel> battery =
      risk_averse ? utilities : std::span<const UtilityModel>(identity);
  if (battery.empty()) throw InputError("empty utility battery");

  AuditReport report;
  report.kind = "bic";
  report.tolerance = tol;
  report.method = method_name(method);
  Evaluator eval(mech, method);
  double worst = std::numeric_limits<double>::infinity();
  const int n = mech.n_players();

  // Interim expectation of one report for player i with true type `tru`:
  // average the conditional expectation over the others' product prior.
  auto interim = [&](int i, const Valuation& own_report, const Valuation& tru,
                     const UtilityModel& u) {
    Stats total;
    double var = 0.0;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      Profile reports;
      double prob = 1.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) {
          reports.push_back(own_report);
        } else {
          const PriorEntry& e = prior.player(k)[idx[k]];
          reports.push_back(e.valuation);
          prob *= e.probability;
        }
      }
      if (prob > 0.0) {
        const Stats s = eval.utility(reports, tru, i, u);
        total.mean += prob * s.mean;
        var += prob * prob * s.se * s.se;
        total.min_value = std::min(total.min_value, s.min_value);
      }
      int k = 0;
      for (; k < n; ++k) {
        if (k == i) continue;
        if (++idx[k] < prior.player(k).size()) break;
        idx[k] = 0;
      }
      if (k == n) break;
    }
    total.se = std::sqrt(var);
    return total;
  };

  for (int i = 0; i < n; ++i) {
    for (int ti = 0; ti < static_cast<int>(prior.player(i).size()); ++ti) {
      const Valuation& tru = prior.player(i)[ti].valuation;
      for (const UtilityModel& u : battery) {
        const Stats truthful = interim(i, tru, tru, u);
        for (int d = 0; d < static_cast<int>(space[i].size()); ++d) {
          const Stats dev = interim(i, space[i][d], tru, u);
          const double margin = truthful.mean - dev.mean;
          const double hw = kZ99 * std::hypot(truthful.se, dev.se);
          ++report.n_checks;
          worst = std::min(worst, margin);
          const CheckOutcome out = classify(margin, hw, tol);
          if (out.fail || out.inconclusive) {
            AuditWitness w;
            w.player = i;
            w.profile = {ti};
            w.deviation = d;
            if (risk_averse) w.check = u.name();
            w.margin = margin;
            w.ci_halfwidth = hw;
            w.inconclusive = out.inconclusive;
            w.profile_encoding = {canonical_encoding(tru)};
            w.deviation_encoding = canonical_encoding(space[i][d]);
            report.witnesses.push_back(std::move(w));
          }
        }
      }
    }
  }
  report.worst_margin = report.n_checks > 0 ? worst : 0.0;
  finalize(report);
  return report;
}

AuditReport verify_transform_claims(const Mechanism& base,
                                    const Mechanism& transformed,
                                    const TypeSpace& space,
                                    std::span<const std::uint64_t> seeds,
                                    double tol) {
  check_space(base, space);
  if (base.n_players() != transformed.n_players() ||
      base.n_items() != transformed.n_items()) {
    throw InputError("base and transformed mechanisms disagree on shape");
  }
  AuditReport report;
  report.kind = "claims";
  report.tolerance = tol;
  report.method = method_name(Exact{});
  double worst = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> sizes;
  for (const auto& grid : space) sizes.push_back(grid.size());
  const auto profiles = enumerate_index_profiles(sizes);

  auto record = [&](double margin, int player, const std::vector<int>& P,
                    const Profile& v, const char* check) {
    ++report.n_checks;
    worst = std::min(worst, margin);
    if (margin < -tol) {
      AuditWitness w;
      w.player = player;
      w.profile = P;
      w.check = check;
      w.margin = margin;
      for (const Valuation& val : v) {
        w.profile_encoding.push_back(canonical_encoding(val));
      }
      report.witnesses.push_back(std::move(w));
    }
  };

  for (const std::vector<int>& P : profiles) {
    Profile v;
    for (std::size_t i = 0; i < P.size(); ++i) v.push_back(space[i][P[i]]);

    Money base_revenue = 0.0;
    Money new_revenue = 0.0;
    for (int i = 0; i < base.n_players(); ++i) {
      Money base_expected = 0.0;
      for (const PayoffAtom& atom : base.payoff_distribution(v, i)) {
        base_expected += atom.probability * atom.payment;
      }
      Money new_expected = 0.0;
      Money payoff_min = std::numeric_limits<Money>::infinity();
      Money payoff_max = -std::numeric_limits<Money>::infinity();
      for (const PayoffAtom& atom : transformed.payoff_distribution(v, i)) {
        new_expected += atom.probability * atom.payment;
        if (atom.probability > 0.0) {
          const Money payoff =
              valuation_value(v[i], atom.bundle) - atom.payment;
          payoff_min = std::min(payoff_min, payoff);
          payoff_max = std::max(payoff_max, payoff);
        }
      }
      base_revenue += base_expected;
      new_revenue += new_expected;
      record(-std::abs(new_expected - base_expected), i, P, v,
             "expected-payment");
      record(-(payoff_max - payoff_min), i, P, v, "payoff-constant");
    }
    record(-std::abs(new_revenue - base_revenue), -1, P, v, "revenue");

    for (const std::uint64_t seed : seeds) {
      const Realization a = run(base, v, seed);
      const Realization b = run(transformed, v, seed);
      record(a.allocation == b.allocation ? 0.0 : -1.0, -1, P, v,
             "allocation");
    }
  }
  report.worst_margin = report.n_checks > 0 ? worst : 0.0;
  finalize(report);
  return report;
}

Money min_audit_payoff(const Mechanism& mech, const TypeSpace& space) {
  check_space(mech, space);
  Money lowest = 0.0;
  std::vector<std::size_t> sizes;
  for (const auto& grid : space) sizes.push_back(grid.size());
  std::uint64_t counter = 0;
  for (const std::vector<int>& P : enumerate_index_profiles(sizes)) {
    Profile v;
    for (std::size_t i = 0; i < P.size(); ++i) v.push_back(space[i][P[i]]);
    for (int i = 0; i < mech.n_players(); ++i) {
      for (const Valuation& dev : space[i]) {
        Profile v_dev = v;
        v_dev[i] = dev;
        if (mech.has_exact_oracle()) {
          for (const PayoffAtom& atom : mech.payoff_distribution(v_dev, i)) {
            if (atom.probability <= 0.0) continue;
            lowest = std::min(lowest, valuation_value(v[i], atom.bundle) -
                                          atom.payment);
          }
        } else {
          for (int k = 0; k < 64; ++k) {
            const Realization r =
                run(mech, v_dev, derive_seed(0x5eed5eedULL, counter++));
            lowest = std::min(lowest,
                              valuation_value(v[i], r.allocation.bundle_of(i)) -
                                  r.payments[i]);
          }
        }
      }
    }
  }
  return lowest;
}

std::vector<std::vector<int>> enumerate_index_profiles(
    std::span<const std::size_t> sizes) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(sizes.size(), 0);
  while (true) {
    out.push_back(idx);
    std::size_t k = 0;
    for (; k < sizes.size(); ++k) {
      if (++idx[k] < static_cast<int>(sizes[k])) break;
      idx[k] = 0;
    }
    if (k == sizes.size()) break;
  }
  return out;
}

std::vector<Profile> enumerate_profiles(const TypeSpace& space) {
  std::vector<std::size_t> sizes;
  for (const auto& grid : space) sizes.push_back(grid.size());
  std::vector<Profile> out;
  for (const std::vector<int>& P : enumerate_index_profiles(sizes)) {
    Profile v;
    for (std::size_t i = 0; i < P.size(); ++i) v.push_back(space[i][P[i]]);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace riskmech
