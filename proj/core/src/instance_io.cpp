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

#include "riskmech/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "riskmech/errors.hpp"
#include "riskmech/utility.hpp"

namespace riskmech {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const char* code, const std::string& where,
                       const std::string& what) {
  throw ParseError(code, where, what);
}

const json& require(const json& obj, const char* key,
                    const std::string& where) {
  if (!obj.is_object()) fail("bad-schema", where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail("bad-schema", where, std::string("missing field '") + key + "'");
  }
  return *it;
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) fail("bad-schema", where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      fail("unknown-field", where + "/" + it.key(),
           "field not part of schema_version 1");
    }
  }
}

double get_number(const json& v, const std::string& where) {
  double out = 0.0;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const char* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, out);
    if (s.empty() || ec != std::errc{} || p != end) {
      fail("bad-number", where, "'" + s + "' is not a decimal number");
    }
  } else {
    fail("bad-number", where, "expected a number or decimal string");
  }
  if (!std::isfinite(out)) fail("bad-number", where, "number must be finite");
  return out;
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail("bad-schema", where, "expected a string");
  return v.get<std::string>();
}

long get_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail("bad-schema", where, "expected an integer");
  return v.get<long>();
}

const json& get_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail("bad-schema", where, "expected an array");
  return v;
}

Valuation parse_valuation(const json& v,
                          const std::vector<std::string>& items,
                          const std::string& where) {
  const std::string kind = get_string(require(v, "kind", where), where + "/kind");
  if (kind == "single_item") {
    reject_unknown(v, {"kind", "value"}, where);
    const double value = get_number(require(v, "value", where), where + "/value");
    if (value < 0.0) fail("bad-schema", where + "/value", "value must be >= 0");
    return SingleItemValuation(value);
  }
  if (kind != "coverage") {
    fail("bad-schema", where + "/kind",
         "valuation kind must be 'coverage' or 'single_item'");
  }
  reject_unknown(v, {"kind", "universe", "item_sets"}, where);

  std::vector<WeightedElement> universe;
  std::set<std::string> element_ids;
  const json& uni = get_array(require(v, "universe", where), where + "/universe");
  for (std::size_t k = 0; k < uni.size(); ++k) {
    const std::string at = where + "/universe/" + std::to_string(k);
    reject_unknown(uni[k], {"id", "weight"}, at);
    WeightedElement e;
    e.id = get_string(require(uni[k], "id", at), at + "/id");
    e.weight = get_number(require(uni[k], "weight", at), at + "/weight");
    if (e.weight < 0.0) fail("bad-schema", at + "/weight", "weight must be >= 0");
    if (!element_ids.insert(e.id).second) {
      fail("bad-schema", at + "/id", "duplicate element id '" + e.id + "'");
    }
    universe.push_back(std::move(e));
  }

  std::map<std::string, std::vector<std::string>> item_sets;
  const json& sets = require(v, "item_sets", where);
  if (!sets.is_object()) {
    fail("bad-schema", where + "/item_sets", "expected an object");
  }
  for (auto it = sets.begin(); it != sets.end(); ++it) {
    const std::string at = where + "/item_sets/" + it.key();
    if (std::find(items.begin(), items.end(), it.key()) == items.end()) {
      fail("unknown-reference", at, "'" + it.key() + "' is not an item");
    }
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < get_array(*it, at).size(); ++k) {
      const std::string id =
          get_string((*it)[k], at + "/" + std::to_string(k));
      if (element_ids.find(id) == element_ids.end()) {
        fail("unknown-reference", at + "/" + std::to_string(k),
             "'" + id + "' is not a universe element");
      }
      ids.push_back(id);
    }
    item_sets[it.key()] = std::move(ids);
  }
  return CoverageValuation(universe, item_sets, items);
}

LotteryMenu parse_menu(const json& v, const std::string& where) {
  LotteryMenu menu;
  const json& arr = get_array(v, where);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string at = where + "/" + std::to_string(k);
    reject_unknown(arr[k], {"min_report", "alloc_prob", "charge"}, at);
    MenuEntry e;
    e.min_report =
        get_number(require(arr[k], "min_report", at), at + "/min_report");
    e.alloc_prob =
        get_number(require(arr[k], "alloc_prob", at), at + "/alloc_prob");
    e.charge = get_number(require(arr[k], "charge", at), at + "/charge");
    menu.entries.push_back(e);
  }
  return menu;
}

MechanismSpec parse_mechanism(const json& v, const std::string& where) {
  const std::string kind = get_string(require(v, "kind", where), where + "/kind");
  if (kind == "second_price") {
    reject_unknown(v, {"kind"}, where);
    return SecondPriceSpec{};
  }
  if (kind == "coverage_auction") {
    reject_unknown(v, {"kind"}, where);
    return CoverageAuctionSpec{};
  }
  if (kind != "lottery") {
    fail("bad-schema", where + "/kind",
         "mechanism kind must be 'second_price', 'lottery' or "
         "'coverage_auction'");
  }
  reject_unknown(v, {"kind", "menus"}, where);
  LotterySpec spec;
  const json& menus = get_array(require(v, "menus", where), where + "/menus");
  for (std::size_t k = 0; k < menus.size(); ++k) {
    spec.menus.push_back(
        parse_menu(menus[k], where + "/menus/" + std::to_string(k)));
  }
  return spec;
}

json number_out(double v) { return json(v); }

json valuation_out(const Valuation& v,
                   const std::vector<std::string>& items) {
  json out;
  if (const auto* s = std::get_if<SingleItemValuation>(&v)) {
    out["kind"] = "single_item";
    out["value"] = number_out(s->value);
    return out;
  }
  const auto& c = std::get<CoverageValuation>(v);
  out["kind"] = "coverage";
  json uni = json::array();
  for (const WeightedElement& e : c.universe()) {
    uni.push_back({{"id", e.id}, {"weight", number_out(e.weight)}});
  }
  out["universe"] = std::move(uni);
  json sets = json::object();
  for (int j = 0; j < c.n_items(); ++j) {
    if (c.item_sets()[j].empty()) continue;
    json ids = json::array();
    for (const int idx : c.item_sets()[j]) ids.push_back(c.universe()[idx].id);
    sets[items[j]] = std::move(ids);
  }
  out["item_sets"] = std::move(sets);
  return out;
}

json menu_out(const LotteryMenu& menu) {
  json out = json::array();
  for (const MenuEntry& e : menu.entries) {
    out.push_back({{"min_report", number_out(e.min_report)},
                   {"alloc_prob", number_out(e.alloc_prob)},
                   {"charge", number_out(e.charge)}});
  }
  return out;
}

json mechanism_out(const MechanismSpec& spec) {
  json out;
  if (std::holds_alternative<SecondPriceSpec>(spec)) {
    out["kind"] = "second_price";
  } else if (std::holds_alternative<CoverageAuctionSpec>(spec)) {
    out["kind"] = "coverage_auction";
  } else {
    out["kind"] = "lottery";
    json menus = json::array();
    for (const LotteryMenu& m : std::get<LotterySpec>(spec).menus) {
      menus.push_back(menu_out(m));
    }
    out["menus"] = std::move(menus);
  }
  return out;
}

}  // namespace

ParsedInstance parse_instance_text(const std::string& text,
                                   const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("bad-json", origin, e.what());
  }
  if (!root.is_object()) fail("bad-schema", "/", "top level must be an object");
  reject_unknown(root,
                 {"schema_version", "items", "mechanism", "players", "prior",
                  "battery", "optimizer"},
                 "/");

  const long version =
      get_integer(require(root, "schema_version", "/"), "/schema_version");
  if (version != 1) {
    fail("bad-version", "/schema_version",
         "this toolkit reads schema_version 1");
  }

  ParsedInstance parsed;

  const json& items = get_array(require(root, "items", "/"), "/items");
  std::set<std::string> seen_items;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const std::string at = "/items/" + std::to_string(k);
    const std::string id = get_string(items[k], at);
    if (id.empty()) fail("bad-schema", at, "item id must be nonempty");
    if (!seen_items.insert(id).second) {
      fail("bad-schema", at, "duplicate item id '" + id + "'");
    }
    parsed.instance.items.push_back(id);
  }

  const json& players = get_array(require(root, "players", "/"), "/players");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const std::string at = "/players/" + std::to_string(i);
    reject_unknown(players[i], {"valuation", "grid"}, at);
    Valuation v = parse_valuation(require(players[i], "valuation", at),
                                  parsed.instance.items, at + "/valuation");
    std::vector<Valuation> grid;
    if (players[i].contains("grid")) {
      const json& g = get_array(players[i]["grid"], at + "/grid");
      for (std::size_t k = 0; k < g.size(); ++k) {
        grid.push_back(parse_valuation(g[k], parsed.instance.items,
                                       at + "/grid/" + std::to_string(k)));
      }
      if (grid.empty()) fail("bad-schema", at + "/grid", "grid must be nonempty");
    } else {
      grid.push_back(v);
    }
    parsed.instance.true_valuations.push_back(std::move(v));
    parsed.grids.push_back(std::move(grid));
  }

  parsed.mechanism =
      parse_mechanism(require(root, "mechanism", "/"), "/mechanism");

  if (root.contains("prior")) {
    const json& prior = get_array(root["prior"], "/prior");
    if (prior.size() != players.size()) {
      fail("bad-schema", "/prior", "prior must list one distribution per player");
    }
    std::vector<std::vector<PriorEntry>> support;
    for (std::size_t i = 0; i < prior.size(); ++i) {
      const std::string at = "/prior/" + std::to_string(i);
      std::vector<PriorEntry> entries;
      double total = 0.0;
      const json& arr = get_array(prior[i], at);
      if (arr.empty()) fail("bad-schema", at, "empty prior support");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string ek = at + "/" + std::to_string(k);
        reject_unknown(arr[k], {"valuation", "probability"}, ek);
        Valuation pv = parse_valuation(require(arr[k], "valuation", ek),
                                       parsed.instance.items,
                                       ek + "/valuation");
        const double prob = get_number(require(arr[k], "probability", ek),
                                       ek + "/probability");
        if (prob < 0.0 || prob > 1.0) {
          fail("bad-schema", ek + "/probability",
               "probability must lie in [0, 1]");
        }
        total += prob;
        entries.push_back(PriorEntry{std::move(pv), prob});
      }
      if (std::abs(total - 1.0) > 1e-9) {
        fail("prior-not-normalized", at,
             "probabilities sum to " + format_double(total));
      }
      support.push_back(std::move(entries));
    }
    parsed.instance.prior.emplace(std::move(support));
  }

  if (root.contains("battery")) {
    const json& battery = get_array(root["battery"], "/battery");
    for (std::size_t k = 0; k < battery.size(); ++k) {
      parsed.battery.push_back(
          get_string(battery[k], "/battery/" + std::to_string(k)));
    }
    try {
      battery_by_names(parsed.battery, 0.0);
    } catch (const InputError& e) {
      fail("bad-schema", "/battery", e.what());
    }
  }

  if (root.contains("optimizer")) {
    const json& opt = root["optimizer"];
    reject_unknown(opt, {"tolerance", "max_iterations"}, "/optimizer");
    if (opt.contains("tolerance")) {
      parsed.optimizer.tolerance =
          get_number(opt["tolerance"], "/optimizer/tolerance");
      if (parsed.optimizer.tolerance <= 0.0) {
        fail("bad-schema", "/optimizer/tolerance", "tolerance must be > 0");
      }
    }
    if (opt.contains("max_iterations")) {
      const long cap = get_integer(opt["max_iterations"],
                                   "/optimizer/max_iterations");
      if (cap < 1) {
        fail("bad-schema", "/optimizer/max_iterations", "must be >= 1");
      }
      parsed.optimizer.max_iterations = static_cast<int>(cap);
    }
  }

  // Final shape checks: lottery menu count, menu validity, instance
  // invariants. Everything surfacing here is a schema problem.
  try {
    parsed.instance.validate();
    build_mechanism(parsed.mechanism, parsed.instance, parsed.optimizer);
  } catch (const InputError& e) {
    fail("bad-schema", "/", e.what());
  }
  return parsed;
}

ParsedInstance parse_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open instance file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_text(buf.str(), path);
}

std::string serialize_instance(const ParsedInstance& parsed) {
  json root;
  root["schema_version"] = 1;
  root["items"] = parsed.instance.items;
  root["mechanism"] = mechanism_out(parsed.mechanism);

  json players = json::array();
  for (int i = 0; i < parsed.instance.n_players(); ++i) {
    json p;
    p["valuation"] =
        valuation_out(parsed.instance.true_valuations[i], parsed.instance.items);
    const auto& grid = parsed.grids[i];
    const bool singleton_true =
        grid.size() == 1 &&
        canonical_encoding(grid[0]) ==
            canonical_encoding(parsed.instance.true_valuations[i]);
    if (!singleton_true) {
      json g = json::array();
      for (const Valuation& v : grid) {
        g.push_back(valuation_out(v, parsed.instance.items));
      }
      p["grid"] = std::move(g);
    }
    players.push_back(std::move(p));
  }
  root["players"] = std::move(players);

  if (parsed.instance.prior.has_value()) {
    json prior = json::array();
    for (const auto& entries : parsed.instance.prior->support()) {
      json arr = json::array();
      for (const PriorEntry& e : entries) {
        arr.push_back({{"valuation", valuation_out(e.valuation,
                                                   parsed.instance.items)},
                       {"probability", number_out(e.probability)}});
      }
      prior.push_back(std::move(arr));
    }
    root["prior"] = std::move(prior);
  }

  if (!parsed.battery.empty()) root["battery"] = parsed.battery;

  const OptimizerParams defaults;
  if (parsed.optimizer.tolerance != defaults.tolerance ||
      parsed.optimizer.max_iterations != defaults.max_iterations) {
    json opt;
    opt["tolerance"] = number_out(parsed.optimizer.tolerance);
    opt["max_iterations"] = parsed.optimizer.max_iterations;
    root["optimizer"] = std::move(opt);
  }
  return root.dump(2) + "\n";
}

std::string report_to_json(const AuditReport& report) {
  json out;
  out["kind"] = report.kind;
  out["verdict"] = verdict_name(report.verdict);
  out["worst_margin"] = report.worst_margin;
  out["tolerance"] = report.tolerance;
  out["epsilon"] = report.epsilon;
  out["method"] = report.method;
  out["n_checks"] = report.n_checks;
  out["degraded"] = report.degraded;
  json witnesses = json::array();
  for (const AuditWitness& w : report.witnesses) {
    json jw;
    jw["player"] = w.player;
    jw["profile"] = w.profile;
    jw["deviation"] = w.deviation;
    jw["check"] = w.check;
    jw["margin"] = w.margin;
    jw["ci_halfwidth"] = w.ci_halfwidth;
    jw["inconclusive"] = w.inconclusive;
    jw["additive_fallback"] = w.additive_fallback;
    jw["profile_encoding"] = w.profile_encoding;
    jw["deviation_encoding"] = w.deviation_encoding;
    witnesses.push_back(std::move(jw));
  }
  out["witnesses"] = std::move(witnesses);
  return out.dump(2) + "\n";
}

}  // namespace riskmech
