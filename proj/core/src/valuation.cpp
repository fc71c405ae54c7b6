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

#include "riskmech/valuation.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace riskmech {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

CoverageValuation::CoverageValuation(std::vector<WeightedElement> universe,
                                     std::vector<std::vector<int>> item_sets)
    : universe_(std::move(universe)), item_sets_(std::move(item_sets)) {
  std::set<std::string> seen;
  for (const auto& e : universe_) {
    if (e.weight < 0.0) {
      throw InputError("coverage element '" + e.id + "' has negative weight");
    }
    if (!seen.insert(e.id).second) {
      throw InputError("duplicate coverage element id '" + e.id + "'");
    }
    total_weight_ += e.weight;
  }
  for (const auto& s : item_sets_) {
    for (int e : s) {
      if (e < 0 || e >= n_elements()) {
        throw InputError("item set references element index out of range");
      }
    }
  }
}

CoverageValuation::CoverageValuation(
    const std::vector<WeightedElement>& universe,
    const std::map<std::string, std::vector<std::string>>& item_sets,
    const std::vector<std::string>& items)
    : CoverageValuation(universe, [&] {
        std::map<std::string, int> element_index;
        for (int e = 0; e < static_cast<int>(universe.size()); ++e) {
          element_index[universe[e].id] = e;
        }
        std::map<std::string, int> item_index;
        for (int j = 0; j < static_cast<int>(items.size()); ++j) {
          item_index[items[j]] = j;
        }
        std::vector<std::vector<int>> sets(items.size());
        for (const auto& [item_id, element_ids] : item_sets) {
          auto it = item_index.find(item_id);
          if (it == item_index.end()) {
            throw InputError("item set for unknown item '" + item_id + "'");
          }
          for (const auto& eid : element_ids) {
            auto eit = element_index.find(eid);
            if (eit == element_index.end()) {
              throw InputError("item '" + item_id +
                               "' covers unknown element '" + eid + "'");
            }
            sets[it->second].push_back(eit->second);
          }
        }
        return sets;
      }()) {}

Money CoverageValuation::value(std::span<const int> bundle) const {
  std::vector<char> covered(universe_.size(), 0);
  for (int j : bundle) {
    if (j < 0 || j >= n_items()) {
      throw InputError("bundle references item index out of range");
    }
    for (int e : item_sets_[j]) covered[e] = 1;
  }
  Money total = 0.0;
  for (int e = 0; e < n_elements(); ++e) {
    if (covered[e]) total += universe_[e].weight;
  }
  return total;
}

CoverageValuation CoverageValuation::scaled(double factor) const {
  if (factor < 0.0) throw InputError("negative valuation scale factor");
  auto u = universe_;
  for (auto& e : u) e.weight *= factor;
  return CoverageValuation(std::move(u), item_sets_);
}

Money expected_value_product(const CoverageValuation& v,
                             std::span<const double> q) {
  if (static_cast<int>(q.size()) != v.n_items()) {
    throw InputError("marginal vector length does not match item count");
  }
  for (double p : q) {
    if (p < -kValueTolerance || p > 1.0 + kValueTolerance) {
      throw InputError("item marginal outside [0, 1]");
    }
  }
  Money total = 0.0;
  for (int e = 0; e < v.n_elements(); ++e) {
    double p_uncovered = 1.0;
    for (int j = 0; j < v.n_items(); ++j) {
      const auto& s = v.item_sets()[j];
      if (std::find(s.begin(), s.end(), e) != s.end()) {
        p_uncovered *= 1.0 - q[j];
      }
    }
    total += v.universe()[e].weight * (1.0 - p_uncovered);
  }
  return total;
}

SingleItemValuation::SingleItemValuation(Money v) : value(v) {
  if (v < 0.0) throw InputError("single-item value must be nonnegative");
}

Money valuation_value(const Valuation& v, std::span<const int> bundle) {
  if (const auto* c = std::get_if<CoverageValuation>(&v)) {
    return c->value(bundle);
  }
  return bundle.empty() ? 0.0 : std::get<SingleItemValuation>(v).value;
}

Money grand_bundle_value(const Valuation& v, int n_items) {
  if (const auto* c = std::get_if<CoverageValuation>(&v)) {
    return c->total_weight();
  }
  return n_items > 0 ? std::get<SingleItemValuation>(v).value : 0.0;
}

Valuation scale_valuation(const Valuation& v, double factor) {
  if (const auto* c = std::get_if<CoverageValuation>(&v)) {
    return c->scaled(factor);
  }
  return SingleItemValuation(std::get<SingleItemValuation>(v).value * factor);
}

std::string canonical_encoding(const Valuation& v) {
  std::ostringstream out;
  if (const auto* c = std::get_if<CoverageValuation>(&v)) {
    out << "coverage{";
    for (int e = 0; e < c->n_elements(); ++e) {
      if (e) out << ",";
      out << c->universe()[e].id << ":" << format_double(c->universe()[e].weight);
    }
    out << ";";
    for (int j = 0; j < c->n_items(); ++j) {
      if (j) out << ";";
      out << j << ":[";
      auto s = c->item_sets()[j];
      std::sort(s.begin(), s.end());
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out << ",";
        out << c->universe()[s[k]].id;
      }
      out << "]";
    }
    out << "}";
  } else {
    out << "single_item:" << format_double(std::get<SingleItemValuation>(v).value);
  }
  return out.str();
}

std::string profile_key(const Profile& reports) {
  std::string key;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i > 0) key += "|";
    key += canonical_encoding(reports[i]);
  }
  return key;
}

}  // namespace riskmech
