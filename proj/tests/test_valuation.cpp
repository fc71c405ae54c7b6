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
#include <set>
#include <string>
#include <vector>

#include "riskmech/errors.hpp"
#include "riskmech/rng.hpp"
#include "riskmech/valuation.hpp"

using namespace riskmech;

namespace {

CoverageValuation make_cov(const std::vector<double>& weights,
                           std::vector<std::vector<int>> sets) {
  std::vector<WeightedElement> universe;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    universe.push_back({"e" + std::to_string(k), weights[k]});
  }
  return CoverageValuation(std::move(universe), std::move(sets));
}

double bundle_value(const Valuation& v, std::vector<int> bundle) {
  return valuation_value(v, bundle);
}

// Reference implementation of the expected union weight: enumerate all 2^n
// winner subsets of the n item sets and weigh each union by its probability.
double brute_force_expected_union(const CoverageValuation& v,
                                  const std::vector<double>& q) {
  const int n = static_cast<int>(q.size());
  double total = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    double prob = 1.0;
    std::set<int> covered;
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) {
        prob *= q[j];
        for (int e : v.item_sets()[j]) covered.insert(e);
      } else {
        prob *= 1.0 - q[j];
      }
    }
    double weight = 0.0;
    for (int e : covered) weight += v.universe()[e].weight;
    total += prob * weight;
  }
  return total;
}

CoverageValuation overlap_valuation() {
  // Elements a, b, c with unit weight; item 0 covers {a, b}, item 1 covers
  // {b, c}.
  return make_cov({1.0, 1.0, 1.0}, {{0, 1}, {1, 2}});
}

}  // namespace

TEST_CASE("coverage value of a bundle is the weight of the union") {
  Valuation v{overlap_valuation()};
  CHECK(bundle_value(v, {}) == doctest::Approx(0.0));
  CHECK(bundle_value(v, {0}) == doctest::Approx(2.0));
  CHECK(bundle_value(v, {1}) == doctest::Approx(2.0));
  CHECK(bundle_value(v, {0, 1}) == doctest::Approx(3.0));

  Valuation w{make_cov({1.0, 2.5}, {{0}, {0, 1}})};
  CHECK(bundle_value(w, {1}) == doctest::Approx(3.5));
  CHECK(bundle_value(w, {0, 1}) == doctest::Approx(3.5));
  CHECK(grand_bundle_value(w, 2) == doctest::Approx(3.5));
}

TEST_CASE("independent-win expectation matches the closed form") {
  CoverageValuation v = overlap_valuation();
  std::vector<double> q{0.5, 0.5};
  double expected = expected_value_product(v, q);
  CHECK(expected == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(expected ==
        doctest::Approx(brute_force_expected_union(v, q)).epsilon(1e-12));
}

TEST_CASE("closed-form expectation agrees with subset enumeration") {
  UniformStream rng(derive_seed(0x7e57u, 1));
  for (int trial = 0; trial < 50; ++trial) {
    int n_elements = 1 + static_cast<int>(rng.next() * 5.0);
    int n_sets = 1 + static_cast<int>(rng.next() * 3.0);
    std::vector<double> weights;
    for (int e = 0; e < n_elements; ++e) weights.push_back(rng.next() * 4.0);
    std::vector<std::vector<int>> sets(n_sets);
    for (int j = 0; j < n_sets; ++j) {
      for (int e = 0; e < n_elements; ++e) {
        if (rng.next() < 0.5) sets[j].push_back(e);
      }
    }
    std::vector<double> q;
    for (int j = 0; j < n_sets; ++j) q.push_back(rng.next());
    CoverageValuation v = make_cov(weights, std::move(sets));
    CHECK(expected_value_product(v, q) ==
          doctest::Approx(brute_force_expected_union(v, q)).epsilon(1e-9));
  }
}

TEST_CASE("expectation boundaries and monotonicity in win probabilities") {
  CoverageValuation v = overlap_valuation();
  std::vector<double> q;
  q = {0.0, 0.0};
  CHECK(expected_value_product(v, q) == doctest::Approx(0.0));
  q = {1.0, 1.0};
  CHECK(expected_value_product(v, q) == doctest::Approx(3.0));
  q = {1.0, 0.0};
  CHECK(expected_value_product(v, q) == doctest::Approx(2.0));

  double prev = -1.0;
  for (double step = 0.0; step <= 1.0000001; step += 0.125) {
    q = {step, 0.3};
    double cur = expected_value_product(v, q);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
}

TEST_CASE("input validation rejects malformed valuations") {
  CHECK_THROWS_AS(SingleItemValuation(-1.0), InputError);
  CHECK_THROWS_AS(make_cov({-1.0}, {{0}}), InputError);
  CHECK_THROWS_AS(make_cov({1.0}, {{0, 7}}), InputError);
  CHECK_THROWS_AS(
      CoverageValuation({{"a", 1.0}, {"a", 2.0}}, {{0}}), InputError);

  CoverageValuation v = overlap_valuation();
  std::vector<double> short_q{0.5};
  CHECK_THROWS_AS(expected_value_product(v, short_q), InputError);
  std::vector<double> wild_q{0.5, 1.5};
  CHECK_THROWS_AS(expected_value_product(v, wild_q), InputError);
}

TEST_CASE("canonical encodings are stable and order independent") {
  Valuation a{make_cov({1.0, 2.5}, {{0}, {0, 1}})};
  Valuation b{make_cov({1.0, 2.5}, {{0}, {1, 0}})};
  CHECK(canonical_encoding(a) == canonical_encoding(b));
  CHECK(canonical_encoding(Valuation{SingleItemValuation(3.0)}) ==
        canonical_encoding(Valuation{SingleItemValuation(3.0)}));
  CHECK(canonical_encoding(Valuation{SingleItemValuation(3.0)}) !=
        canonical_encoding(Valuation{SingleItemValuation(4.0)}));

  Profile p{a, Valuation{SingleItemValuation(3.0)}};
  Profile q{b, Valuation{SingleItemValuation(3.0)}};
  CHECK(profile_key(p) == profile_key(q));
}

TEST_CASE("scaling a valuation scales every bundle value") {
  Valuation v{overlap_valuation()};
  Valuation half = scale_valuation(v, 0.5);
  CHECK(bundle_value(half, {0, 1}) == doctest::Approx(1.5));
  CHECK(bundle_value(half, {0}) == doctest::Approx(1.0));
  Valuation zero = scale_valuation(Valuation{SingleItemValuation(4.0)}, 0.0);
  CHECK(grand_bundle_value(zero, 1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(scale_valuation(v, -1.0), InputError);
}
