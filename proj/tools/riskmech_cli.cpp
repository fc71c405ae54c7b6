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
// Command-line front end. Subcommands: run, optimize, transform, audit,
// report. Machine-readable JSON goes to stdout (or --out); progress and
// human summaries go to stderr. Exit codes: 0 success/pass, 1 audit fail
// or inconclusive, 2 usage/input error, 3 optimizer did not converge.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "riskmech/audit.hpp"
#include "riskmech/errors.hpp"
#include "riskmech/instance_io.hpp"
#include "riskmech/mechanisms.hpp"
#include "riskmech/rng.hpp"
#include "riskmech/transform.hpp"
#include "riskmech/utility.hpp"
#include "riskmech/welfare.hpp"

namespace {

using nlohmann::json;
using namespace riskmech;

constexpr int kExitPass = 0;
constexpr int kExitAuditFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNoConvergence = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InputError("cannot write to " + out_path);
  out << text;
}

Method make_method(const std::string& name, long samples, std::uint64_t seed) {
  if (name == "exact") return Exact{};
  if (name == "mc") return MonteCarlo{samples, seed};
  throw InputError("method must be 'exact' or 'mc'");
}

double default_tolerance(const ParsedInstance& parsed) {
  // The coverage auction's guarantees are limited by the optimizer
  // residual; everything else is enumerable at machine precision.
  return is_coverage_spec(parsed.mechanism) ? 1e-3 : 1e-9;
}

std::vector<UtilityModel> pick_battery(const ParsedInstance& parsed,
                                       const std::vector<std::string>& flag,
                                       const Mechanism& audited) {
  const Money min_payoff = min_audit_payoff(audited, parsed.grids);
  const std::vector<std::string>& names =
      !flag.empty() ? flag : parsed.battery;
  if (names.empty()) return standard_battery(min_payoff);
  return battery_by_names(names, min_payoff);
}

void print_summary(const AuditReport& report) {
  std::cerr << report.kind << " audit: " << verdict_name(report.verdict)
            << " (worst margin " << format_double(report.worst_margin)
            << " over " << report.n_checks << " checks, tolerance "
            << format_double(report.tolerance) << ", method " << report.method
            << ")\n";
  if (report.degraded) {
    std::cerr << "  note: some checks fell back to additive margins after "
                 "seeing negative utility values\n";
  }
  const std::size_t shown = std::min<std::size_t>(report.witnesses.size(), 10);
  for (std::size_t k = 0; k < shown; ++k) {
    const AuditWitness& w = report.witnesses[k];
    std::cerr << "  witness: player " << w.player << " margin "
              << format_double(w.margin)
              << (w.inconclusive ? " (inconclusive)" : "")
              << (w.check.empty() ? "" : " [" + w.check + "]") << " deviate to "
              << w.deviation_encoding << "\n";
  }
  if (report.witnesses.size() > shown) {
    std::cerr << "  ... " << (report.witnesses.size() - shown)
              << " more witnesses in the report\n";
  }
}

int finish_audit(const AuditReport& report, const std::string& out_path) {
  emit(report_to_json(report), out_path);
  print_summary(report);
  return report.verdict == Verdict::kPass ? kExitPass : kExitAuditFail;
}

std::vector<std::uint64_t> claim_seeds(std::uint64_t base) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 16; ++k) seeds.push_back(derive_seed(base, k));
  return seeds;
}

AuditReport dispatch_audit(const std::string& mode, const Mechanism& mech,
                           const ParsedInstance& parsed,
                           const std::vector<std::string>& battery_flag,
                           const Method& method, double tol, double epsilon,
                           long samples, std::uint64_t seed,
                           const Mechanism* claims_base) {
  if (mode == "tie") {
    return audit_tie(mech, parsed.grids, method, tol);
  }
  if (mode == "risk-averse") {
    const auto battery = pick_battery(parsed, battery_flag, mech);
    return audit_risk_averse(mech, parsed.grids, battery, method, tol);
  }
  if (mode == "bic") {
    if (!parsed.instance.prior.has_value()) {
      throw InputError("bic audit needs an instance with a prior");
    }
    const auto battery = pick_battery(parsed, battery_flag, mech);
    return audit_bic(mech, *parsed.instance.prior, parsed.grids, battery,
                     method, tol, /*risk_averse=*/true);
  }
  if (mode == "apx") {
    if (claims_base != nullptr) {
      // Audit the mechanism we were handed (already transformed).
      const auto battery = pick_battery(parsed, battery_flag, mech);
      return audit_apx(mech, parsed.grids, battery, epsilon, method, tol);
    }
    // Full sampled pipeline: estimate the truthful payoff table by
    // Monte-Carlo, rewrite payments from the estimates, then audit the
    // rewritten mechanism at factor (1 - epsilon).
    const auto profiles = enumerate_profiles(parsed.grids);
    const PayoffTable table =
        estimated_payoff_table(mech, profiles, MonteCarlo{samples, seed});
    const TransformedMechanism t = transform_with_table(mech, table);
    const auto battery = pick_battery(parsed, battery_flag, t.mechanism);
    return audit_apx(t.mechanism, parsed.grids, battery, epsilon, method, tol);
  }
  if (mode == "claims") {
    const Mechanism base =
        claims_base != nullptr
            ? *claims_base
            : build_mechanism(parsed.mechanism, parsed.instance,
                              parsed.optimizer);
    const Mechanism* transformed = &mech;
    TransformedMechanism t{mech, Exact{}};
    if (claims_base == nullptr) {
      t = transform(base, Exact{});
      transformed = &t.mechanism;
    }
    return verify_transform_claims(base, *transformed, parsed.grids,
                                   claim_seeds(seed), tol);
  }
  throw InputError(
      "mode must be one of tie, risk-averse, bic, apx, claims");
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Simulation and audit toolkit for randomized auctions"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string out_path;
  std::string mode;
  std::string method_name_flag = "exact";
  std::vector<std::string> battery_flag;
  std::uint64_t seed = 0;
  long samples = 100000;
  double epsilon = 0.1;
  double tol = -1.0;  // <0 means "instance default"
  bool bayesian = false;
  std::string then_audit;

  auto add_common = [&](CLI::App* cmd, bool needs_instance) {
    if (needs_instance) {
      cmd->add_option("--instance,--in", instance_path, "instance JSON file")
          ->required();
    }
    cmd->add_option("--out", out_path, "write machine-readable JSON here");
    cmd->add_option("--seed", seed, "base seed for anything sampled");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one execution");
  add_common(run_cmd, true);

  CLI::App* opt_cmd =
      app.add_subcommand("optimize", "maximize expected surplus (coverage)");
  add_common(opt_cmd, true);

  CLI::App* transform_cmd = app.add_subcommand(
      "transform", "rewrite payments to neutralize coin risk");
  add_common(transform_cmd, true);
  transform_cmd->add_option("--method", method_name_flag, "exact | mc");
  transform_cmd->add_option("--samples", samples, "Monte-Carlo sample count");
  transform_cmd->add_flag("--bayesian", bayesian,
                          "interim variant using the instance prior");
  transform_cmd->add_option("--then-audit", then_audit,
                            "audit the transformed mechanism: tie | "
                            "risk-averse | bic | apx | claims");
  transform_cmd->add_option("--tol", tol, "audit tolerance");
  transform_cmd->add_option("--epsilon", epsilon, "apx audit factor");
  transform_cmd->add_option("--battery", battery_flag,
                            "utility model names for audits");

  CLI::App* audit_cmd = app.add_subcommand("audit", "incentive audits");
  add_common(audit_cmd, true);
  audit_cmd
      ->add_option("--mode", mode, "tie | risk-averse | bic | apx | claims")
      ->required();
  audit_cmd->add_option("--method", method_name_flag, "exact | mc");
  audit_cmd->add_option("--samples", samples, "Monte-Carlo sample count");
  audit_cmd->add_option("--tol", tol, "margin tolerance");
  audit_cmd->add_option("--epsilon", epsilon, "apx factor (1 - epsilon)");
  audit_cmd->add_option("--battery", battery_flag,
                        "utility model names (default: full battery)");

  CLI::App* report_cmd =
      app.add_subcommand("report", "render a report JSON for reading");
  report_cmd->add_option("--in", instance_path, "report JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  if (*report_cmd) {
    std::ifstream in(instance_path, std::ios::binary);
    if (!in) throw InputError("cannot open report file: " + instance_path);
    json r = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (r.is_discarded()) throw InputError("report file is not valid JSON");
    std::cout << r.value("kind", std::string("?")) << " audit: "
              << r.value("verdict", std::string("?")) << "\n"
              << "  method      " << r.value("method", std::string("?")) << "\n"
              << "  checks      " << r.value("n_checks", 0L) << "\n"
              << "  worst margin " << format_double(r.value("worst_margin", 0.0))
              << " (tolerance " << format_double(r.value("tolerance", 0.0))
              << ")\n";
    for (const auto& w : r.value("witnesses", json::array())) {
      std::cout << "  witness: player " << w.value("player", -1) << " margin "
                << format_double(w.value("margin", 0.0));
      const std::string check = w.value("check", std::string());
      if (!check.empty()) std::cout << " [" << check << "]";
      std::cout << " deviate to " << w.value("deviation_encoding", std::string())
                << (w.value("inconclusive", false) ? " (inconclusive)" : "")
                << "\n";
    }
    return kExitPass;
  }

  const ParsedInstance parsed = parse_instance(instance_path);
  if (tol < 0.0) tol = default_tolerance(parsed);
  const Method method = make_method(method_name_flag, samples, seed);

  if (*run_cmd) {
    const Mechanism mech =
        build_mechanism(parsed.mechanism, parsed.instance, parsed.optimizer);
    const Realization r = run(mech, parsed.instance.true_valuations, seed);
    json out;
    out["seed"] = seed;
    out["winners"] = r.allocation.winner;
    out["payments"] = r.payments;
    out["coin"] = {{"enumerable", r.coin_outcome.enumerable},
                   {"index_or_seed", r.coin_outcome.index_or_seed}};
    emit(out.dump(2) + "\n", out_path);
    return kExitPass;
  }

  if (*opt_cmd) {
    const auto cov = coverage_profile(parsed.instance.true_valuations);
    const WelfareSolution sol =
        maximize_expected_welfare(cov, parsed.optimizer);
    json out;
    out["objective"] = sol.objective;
    out["residual"] = sol.residual;
    out["iterations"] = sol.iterations;
    json rows = json::array();
    for (int i = 0; i < sol.x.n_players; ++i) {
      json row = json::array();
      for (int j = 0; j < sol.x.n_items; ++j) row.push_back(sol.x.at(i, j));
      rows.push_back(std::move(row));
    }
    out["x"] = std::move(rows);
    json marg = json::array();
    for (const auto& row : rounding_marginals(sol.x)) marg.push_back(row);
    out["marginals"] = std::move(marg);
    emit(out.dump(2) + "\n", out_path);
    return kExitPass;
  }

  if (*transform_cmd) {
    const Mechanism base =
        build_mechanism(parsed.mechanism, parsed.instance, parsed.optimizer);
    const TransformedMechanism t =
        bayesian ? transform_bayesian(base, parsed.instance, method)
                 : transform(base, method);
    if (!then_audit.empty()) {
      const AuditReport report =
          dispatch_audit(then_audit, t.mechanism, parsed, battery_flag,
                         Exact{}, tol, epsilon, samples, seed, &base);
      return finish_audit(report, out_path);
    }
    // No audit requested: emit the truthful expected payoffs the rewrite
    // subtracts, per grid profile.
    json out;
    out["method"] = method_name(t.method);
    out["bayesian"] = bayesian;
    json table = json::object();
    for (const Profile& profile : enumerate_profiles(parsed.grids)) {
      json row = json::array();
      for (int i = 0; i < base.n_players(); ++i) {
        Money pi;
        if (bayesian) {
          pi = interim_truthful_payoff(base, *parsed.instance.prior, i,
                                       profile[i], method);
        } else {
          pi = expected_payoff(base, profile, profile[i], i, method);
        }
        row.push_back(pi);
      }
      table[profile_key(profile)] = std::move(row);
    }
    out["pi"] = std::move(table);
    emit(out.dump(2) + "\n", out_path);
    return kExitPass;
  }

  // audit subcommand
  const Mechanism mech =
      build_mechanism(parsed.mechanism, parsed.instance, parsed.optimizer);
  const AuditReport report =
      dispatch_audit(mode, mech, parsed, battery_flag, method, tol, epsilon,
                     samples, seed, nullptr);
  return finish_audit(report, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return cli_main(argc, argv);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const ParseError& e) {
    std::cerr << "error [" << e.code() << "] at " << e.where() << ": "
              << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
