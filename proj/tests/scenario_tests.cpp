#include <doctest.h>

#include <algorithm>
#include <set>

#include "certgate/errors.hpp"
#include "certgate/scenario.hpp"

using namespace certgate;

TEST_CASE("the registry lists every expected scenario exactly once") {
  const std::set<std::string> expected = {
      "query_budget",          "impermissible_strategy",
      "optimality_without_permissibility", "exposure_noncompositional",
      "wrong_derivation",      "escalation",
      "proof_carrying_trade",  "persistent_memory_drift",
      "self_approval",         "stale_approval",
      "tool_deviation",        "guardrail_baseline"};
  const auto& names = scenario_names();
  CHECK(names.size() == expected.size());
  CHECK(std::set<std::string>(names.begin(), names.end()) == expected);
}

TEST_CASE("every scenario passes all of its checks") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    ScenarioReport r = run_scenario(name);
    CHECK(r.name == name);
    CHECK(r.passed);
    for (const auto& line : r.checks) {
      CAPTURE(line);
      CHECK(line.rfind("ok: ", 0) == 0);
    }
    CHECK(!r.checks.empty());
  }
}

TEST_CASE("scenario reports are byte-identical across runs") {
  for (const auto& name : scenario_names()) {
    ScenarioReport a = run_scenario(name, 7);
    ScenarioReport b = run_scenario(name, 7);
    CHECK(format_report(a) == format_report(b));
  }
}

TEST_CASE("unknown names are rejected") {
  CHECK_THROWS_AS(run_scenario("no_such_scenario"), UnknownScenario);
}

TEST_CASE("the reference finance policy validates and has its four layers") {
  PolicySystem p = layered_finance_policy("fin-1");
  CHECK(p.version == "fin-1");
  REQUIRE(p.layers.size() == 4);
  std::set<std::string> ids;
  for (const auto& l : p.layers) ids.insert(l.layer_id);
  CHECK(ids == std::set<std::string>{"spoof_guard", "exposure_limit",
                                     "approval_before_transfer", "vetted_sources"});
}
