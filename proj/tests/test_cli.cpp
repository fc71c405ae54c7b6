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
// End-to-end checks of the command-line tool: exit codes, report bytes,
// determinism. Each invocation spawns the real binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "riskmech_cli_test";
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path dir = scratch_dir();
  fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;

  std::string cmd = std::string("\"") + RISKMECH_CLI + "\" " + args + " > \"" +
                    out.string() + "\" 2> \"" + err.string() + "\"";
  int status = std::system(cmd.c_str());

  CliResult r;
#ifdef _WIN32
  r.exit_code = status;
#else
  r.exit_code = WEXITSTATUS(status);
#endif
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string fixture(const std::string& name) {
  return std::string("\"") + RISKMECH_FIXTURES + "/" + name + "\"";
}

fs::path write_temp(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("audit --help").exit_code == 0);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("defragment").exit_code == 2);
  CHECK(run_cli("audit --in nowhere.json").exit_code == 2);  // missing --mode
}

TEST_CASE("missing and malformed inputs exit with code 2") {
  CliResult r = run_cli("audit --mode tie --in /nonexistent/x.json");
  CHECK(r.exit_code == 2);

  fs::path bad = write_temp("bad.json", "{ not json");
  r = run_cli("audit --mode tie --in \"" + bad.string() + "\"");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("bad-json") != std::string::npos);
}

TEST_CASE("truthful lottery passes the payoff audit") {
  CliResult r =
      run_cli("audit --mode tie --in " + fixture("lottery_halfsub.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"verdict\": \"pass\"") != std::string::npos);
}

TEST_CASE("risk-averse audit of the raw lottery fails with the known margin") {
  CliResult r = run_cli("audit --mode risk-averse --in " +
                        fixture("lottery_halfsub.json"));
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("\"verdict\": \"fail\"") != std::string::npos);
  CHECK(r.out.find("-14.64131591025766") != std::string::npos);
  CHECK(r.out.find("-0.35920261913156587") != std::string::npos);
}

TEST_CASE("transforming first makes the same audit pass") {
  CliResult r = run_cli("transform --then-audit risk-averse --in " +
                        fixture("lottery_halfsub.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"verdict\": \"pass\"") != std::string::npos);
}

TEST_CASE("claims audit on the rewrite passes at machine tolerance") {
  CliResult r = run_cli("audit --mode claims --in " +
                        fixture("lottery_myerson.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"kind\": \"claims\"") != std::string::npos);
}

TEST_CASE("bayesian audit over the prior fixture passes") {
  CliResult r = run_cli("audit --mode bic --in " +
                        fixture("second_price_prior.json"));
  CHECK(r.exit_code == 0);
}

TEST_CASE("reports are byte-identical across repeated runs") {
  for (const std::string& invocation :
       {std::string("audit --mode risk-averse --method mc --samples 2000 "
                    "--seed 11 --in ") +
            fixture("lottery_halfsub.json"),
        std::string("audit --mode tie --in ") + fixture("second_price.json"),
        std::string("transform --then-audit claims --in ") +
            fixture("lottery_three_tier.json"),
        std::string("optimize --in ") + fixture("coverage_2x2.json")}) {
    CAPTURE(invocation);
    CliResult first = run_cli(invocation);
    CliResult second = run_cli(invocation);
    CHECK(first.exit_code == second.exit_code);
    CHECK(first.out == second.out);
    CHECK(!first.out.empty());
  }
}

TEST_CASE("run simulates a single execution") {
  CliResult r = run_cli("run --seed 4 --in " + fixture("second_price.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"winners\"") != std::string::npos);
  CHECK(r.out.find("\"payments\"") != std::string::npos);

  CliResult again = run_cli("run --seed 4 --in " + fixture("second_price.json"));
  CHECK(again.out == r.out);
}

TEST_CASE("optimize reports the frozen surplus point") {
  CliResult r = run_cli("optimize --in " + fixture("coverage_2x2.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("1.2642411176571153") != std::string::npos);
}

TEST_CASE("optimizer starvation exits with code 3") {
  std::string text = R"({
    "schema_version": 1,
    "items": ["A"],
    "mechanism": {"kind": "coverage_auction"},
    "players": [
      {"valuation": {"kind": "coverage",
        "universe": [{"id": "a", "weight": 1}],
        "item_sets": {"A": ["a"]}}},
      {"valuation": {"kind": "coverage",
        "universe": [{"id": "b", "weight": 2}],
        "item_sets": {"A": ["b"]}}}
    ],
    "optimizer": {"tolerance": 1e-12, "max_iterations": 1}
  })";
  fs::path p = write_temp("starved.json", text);
  CliResult r = run_cli("optimize --in \"" + p.string() + "\"");
  CHECK(r.exit_code == 3);
}

TEST_CASE("transform emits the expected truthful payoffs") {
  CliResult r = run_cli("transform --in " + fixture("lottery_halfsub.json"));
  CHECK(r.exit_code == 0);
  // Pi at the truthful report 10 is 4.
  CHECK(r.out.find("4.0") != std::string::npos);

  CliResult bayes = run_cli("transform --bayesian --in " +
                            fixture("second_price_prior.json"));
  CHECK(bayes.exit_code == 0);
}

TEST_CASE("report renders an audit JSON for reading") {
  fs::path out = scratch_dir() / "halfsub_report.json";
  CliResult audit = run_cli("audit --mode tie --out \"" + out.string() +
                            "\" --in " + fixture("lottery_halfsub.json"));
  CHECK(audit.exit_code == 0);
  REQUIRE(fs::exists(out));

  CliResult render = run_cli("report --in \"" + out.string() + "\"");
  CHECK(render.exit_code == 0);
  CHECK(render.out.find("pass") != std::string::npos);
}

TEST_CASE("written reports equal the streamed ones") {
  fs::path out = scratch_dir() / "stream_check.json";
  CliResult streamed = run_cli("audit --mode tie --in " +
                               fixture("lottery_three_tier.json"));
  CliResult written = run_cli("audit --mode tie --out \"" + out.string() +
                              "\" --in " + fixture("lottery_three_tier.json"));
  CHECK(streamed.exit_code == 0);
  CHECK(written.exit_code == 0);
  CHECK(slurp(out) == streamed.out);
}
