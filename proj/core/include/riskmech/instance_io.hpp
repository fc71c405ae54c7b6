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
// Strict JSON instance files (schema_version 1) and deterministic report
// serialization. Parsing is strict: unknown fields are rejected, every
// diagnostic carries a code and a JSON-path location. Weights, values and
// probabilities may be written as numbers or as decimal strings. The full
// schema is documented in docs/instance_schema.md.

#ifndef RISKMECH_INSTANCE_IO_HPP_
#define RISKMECH_INSTANCE_IO_HPP_

#include <string>

#include "riskmech/audit.hpp"
#include "riskmech/instance.hpp"
#include "riskmech/mechanisms.hpp"

namespace riskmech {

// Everything an instance file describes: the market, which mechanism to
// build on it, per-player audit grids, the utility battery selection, and
// optimizer parameters. Players with no explicit grid audit over the
// singleton {true valuation}.
struct ParsedInstance {
  Instance instance;
  MechanismSpec mechanism;
  TypeSpace grids;
  std::vector<std::string> battery;  // empty = full standard battery
  OptimizerParams optimizer;
};

// Reads and validates a file. Throws ParseError with one of the codes:
//   bad-json, bad-version, bad-schema, unknown-field, bad-number,
//   unknown-reference, prior-not-normalized.
ParsedInstance parse_instance(const std::string& path);

// Same, from an in-memory document; `origin` names it in diagnostics.
ParsedInstance parse_instance_text(const std::string& text,
                                   const std::string& origin);

// Canonical serialized form. parse(serialize(parse(f))) equals
// parse(f), and serialize is deterministic (sorted keys, shortest
// round-trip numbers).
std::string serialize_instance(const ParsedInstance& parsed);

// Deterministic JSON rendering of an audit report: sorted keys, shortest
// round-trip numbers, trailing newline. Identical reports serialize to
// identical bytes.
std::string report_to_json(const AuditReport& report);

}  // namespace riskmech

#endif  // RISKMECH_INSTANCE_IO_HPP_
