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

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "riskmech/audit.hpp"
#include "riskmech/instance_io.hpp"
#include "riskmech/mechanisms.hpp"
#include "riskmech/rng.hpp"
#include "riskmech/transform.hpp"
#include "riskmech/utility.hpp"
#include "riskmech/welfare.hpp"

using namespace riskmech;

namespace {

ParsedInstance load(const char* name) {
  return parse_instance(std::string(RISKMECH_FIXTURES) + "/" + name);
}

CoverageValuation wide_valuation(int n_elements, int n_items,
                                 std::uint64_t seed) {
  UniformStream rng(seed);
  std::vector<WeightedElement> universe;
  for (int e = 0; e < n_elements; ++e) {
    universe.push_back({"e" + std::to_string(e), rng.next() * 3.0});
  }
  std::vector<std::vector<int>> sets(n_items);
  for (int j = 0; j < n_items; ++j) {
    for (int e = 0; e < n_elements; ++e) {
      if (rng.next() < 0.4) sets[j].push_back(e);
    }
  }
  return CoverageValuation(universe, sets);
}

void BM_ExpectedValueProduct(benchmark::State& state) {
  int n_items = static_cast<int>(state.range(0));
  CoverageValuation v = wide_valuation(64, n_items, 17);
  UniformStream rng(3);
  std::vector<double> q;
  for (int j = 0; j < n_items; ++j) q.push_back(rng.next());
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_value_product(v, q));
  }
}
BENCHMARK(BM_ExpectedValueProduct)->Arg(4)->Arg(16)->Arg(64);

void BM_WelfareGradient(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::vector<CoverageValuation> reports;
  for (int i = 0; i < n; ++i) {
    reports.push_back(wide_valuation(32, 8, 100 + i));
  }
  FractionalAllocation x(n, 8);
  UniformStream rng(5);
  for (double& e : x.x) e = rng.next() / n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(welfare_gradient(x, reports));
  }
}
BENCHMARK(BM_WelfareGradient)->Arg(2)->Arg(8);

void BM_MaximizeWelfare(benchmark::State& state) {
  ParsedInstance parsed = state.range(0) == 0 ? load("coverage_2x2.json")
                                              : load("coverage_3x3.json");
  std::vector<CoverageValuation> reports =
      coverage_profile(parsed.instance.true_valuations);
  OptimizerParams params = parsed.optimizer;
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_expected_welfare(reports, params));
  }
}
BENCHMARK(BM_MaximizeWelfare)->Arg(0)->Arg(1);

void BM_RiskAverseAudit(benchmark::State& state) {
  ParsedInstance parsed = load("lottery_three_tier.json");
  Mechanism base =
      build_mechanism(parsed.mechanism, parsed.instance, parsed.optimizer);
  TransformedMechanism t = transform(base, Exact{});
  std::vector<UtilityModel> battery = standard_battery(-10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        audit_risk_averse(t.mechanism, parsed.grids, battery, Exact{}, 1e-9));
  }
}
BENCHMARK(BM_RiskAverseAudit);

void BM_CoverageRun(benchmark::State& state) {
  ParsedInstance parsed = load("coverage_2x2.json");
  Mechanism cov =
      build_mechanism(parsed.mechanism, parsed.instance, parsed.optimizer);
  const Profile& reports = parsed.instance.true_valuations;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(cov, reports, seed++));
  }
}
BENCHMARK(BM_CoverageRun);

}  // namespace

BENCHMARK_MAIN();
