#include <doctest.h>

#include "certgate/certifier.hpp"
#include "certgate/errors.hpp"
#include "certgate/executor.hpp"
#include "certgate/ledger.hpp"
#include "certgate/memory.hpp"
#include "certgate/scenario.hpp"
#include "helpers.hpp"

using namespace certgate;
using certgate::testing::test_cfg;

namespace {

PolicySystem plain_policy(const std::string& version) {
  PolicySystem p;
  p.version = version;
  p.source = "test";
  return p;
}

// stage (reversible), apply (irreversible), probe (observation slot)
ProposedTrace pipeline_trace(const std::string& version) {
  ProposedTrace t;
  t.trace_id = "pipeline";
  t.proposer_id = "agent_a";
  t.declared_tier = Tier::C1;
  t.requested_policy_version = version;
  TraceEvent s;
  s.event_id = "stage";
  s.tick = 1;
  s.kind = EventKind::ToolCall;
  s.principal = "agent_a";
  s.component = "staging";
  s.params["tool"] = std::string("stage");
  t.events.push_back(s);
  TraceEvent a = s;
  a.event_id = "apply";
  a.tick = 2;
  a.component = "prod";
  a.params["tool"] = std::string("apply");
  a.irreversible = true;
  t.events.push_back(a);
  TraceEvent o;
  o.event_id = "probe";
  o.tick = 3;
  o.kind = EventKind::ExecutionCall;
  o.principal = "agent_a";
  o.component = "monitor";
  o.observation_slot = true;
  o.params["constraint"] = std::string("range:0:100");
  t.events.push_back(o);
  return t;
}

Certificate certified(const ProposedTrace& t, const PolicySystem& p) {
  Verdict v = certify(t, p, init_memory(p), test_cfg());
  REQUIRE(v.outcome == Verdict::Outcome::Certified);
  return *v.certificate;
}

}  // namespace

TEST_CASE("clean run completes and fills observation slots from the environment") {
  PolicySystem p = plain_policy("v1");
  ProposedTrace t = pipeline_trace("v1");
  Certificate cert = certified(t, p);
  Ledger ledger;
  Environment env;
  env.clock = 3;
  env.tool_behaviors["probe"] = 57;

  ExecutionResult res = execute(t, cert, p, env, ledger, "test-key");
  CHECK(res.realized.outcome == ExecutionOutcome::Completed);
  CHECK(res.realized.events.size() == 3);
  CHECK(std::get<std::int64_t>(res.realized.events[2].params.at("value")) == 57);
  CHECK(res.realized.deviation_log.empty());
  CHECK(conform(res.realized, t).conforms);
  CHECK(ledger.verify().ok);
  REQUIRE(ledger.size() == 1);
  CHECK(ledger.entries()[0].body.outcome == "Executed");
}

TEST_CASE("no certificate, no execution: refusal is recorded") {
  PolicySystem p = plain_policy("v1");
  ProposedTrace t = pipeline_trace("v1");
  Certificate cert = certified(t, p);
  cert.issued_tick += 1;  // break the MAC binding
  Ledger ledger;
  Environment env;
  CHECK_THROWS_AS(execute(t, cert, p, env, ledger, "test-key"), NoCertificate);
  REQUIRE(ledger.size() == 1);
  CHECK(ledger.entries()[0].body.outcome == "Refused");

  // wrong key refuses as well
  Certificate good = certified(t, p);
  CHECK_THROWS_AS(execute(t, good, p, env, ledger, "wrong-key"), NoCertificate);
}

TEST_CASE("stale certificates refuse execution") {
  PolicySystem p = plain_policy("v1");
  ProposedTrace t = pipeline_trace("v1");
  Certificate cert = certified(t, p);
  Ledger ledger;
  Environment env;
  env.clock = cert.issued_tick + kDefaultCertificateWindow + 1;
  CHECK_THROWS_AS(execute(t, cert, p, env, ledger, "test-key"), StaleCertificate);

  // an explicit execution condition overrides the default window
  ProposedTrace t2 = pipeline_trace("v1");
  t2.execution_conditions["valid_until"] = 200;
  Certificate cert2 = certified(t2, p);
  Environment env2;
  env2.clock = 150;
  CHECK_NOTHROW(execute(t2, cert2, p, env2, ledger, "test-key"));
}

TEST_CASE("deviation before the irreversible step halts, nothing realized after") {
  PolicySystem p = plain_policy("v1");
  ProposedTrace t = pipeline_trace("v1");
  Certificate cert = certified(t, p);
  Ledger ledger;
  Environment env;
  env.deviation_injections.push_back({"stage", "param:tool", "stage_elsewhere"});
  ExecutionResult res = execute(t, cert, p, env, ledger, "test-key");
  CHECK(res.realized.outcome == ExecutionOutcome::Halted);
  CHECK(res.halted_before == "stage");
  CHECK(res.realized.events.empty());
  CHECK(!res.realized.deviation_log.empty());
}

TEST_CASE("deviation after the irreversible step rolls back with compensation") {
  PolicySystem p = plain_policy("v1");
  ProposedTrace t = pipeline_trace("v1");
  Certificate cert = certified(t, p);
  Ledger ledger;
  Environment env;
  env.tool_behaviors["probe"] = 999;  // violates range:0:100
  ExecutionResult res = execute(t, cert, p, env, ledger, "test-key");
  CHECK(res.realized.outcome == ExecutionOutcome::RolledBack);
  CHECK(res.halted_before == "probe");
  CHECK(res.realized.events.size() == 2);  // stage and apply ran
  bool compensated = false;
  for (const auto& e : ledger.entries())
    if (e.body.outcome == "Compensation") compensated = true;
  CHECK(compensated);
  CHECK(ledger.verify().ok);
}

TEST_CASE("observation values inside the constraint are not deviations") {
  PolicySystem p = plain_policy("v1");
  ProposedTrace t = pipeline_trace("v1");
  Certificate cert = certified(t, p);
  for (std::int64_t v : {0, 50, 100}) {
    Ledger ledger;
    Environment env;
    env.tool_behaviors["probe"] = v;
    ExecutionResult res = execute(t, cert, p, env, ledger, "test-key");
    CHECK(res.realized.outcome == ExecutionOutcome::Completed);
  }
}

TEST_CASE("conform checks counts, fields, and slot constraints") {
  ProposedTrace t = pipeline_trace("v1");
  RealizedTrace r;
  r.trace_id = t.trace_id;
  r.events = t.events;
  r.events[2].params.erase("value");
  r.events[2].params["value"] = std::int64_t{7};

  CHECK(conform(r, t).conforms);

  SUBCASE("missing event") {
    r.events.pop_back();
    ConformanceResult c = conform(r, t);
    CHECK(!c.conforms);
  }
  SUBCASE("field drift") {
    r.events[0].principal = "agent_b";
    CHECK(!conform(r, t).conforms);
  }
  SUBCASE("slot constraint violation") {
    r.events[2].params["value"] = std::int64_t{101};
    CHECK(!conform(r, t).conforms);
  }
  SUBCASE("wrong trace id") {
    r.trace_id = "other";
    CHECK_THROWS_AS(conform(r, t), TraceMismatch);
  }
}

TEST_CASE("environment files round-trip") {
  Environment env;
  env.tool_behaviors["probe"] = 12;
  env.deviation_injections.push_back({"stage", "param:tool", "other"});
  env.clock = 9;
  Environment back = parse_environment(serialize_environment(env));
  CHECK(back.tool_behaviors == env.tool_behaviors);
  CHECK(back.clock == 9);
  REQUIRE(back.deviation_injections.size() == 1);
  CHECK(back.deviation_injections[0].field == "param:tool");
}
