#include <doctest.h>

#include "certgate/errors.hpp"
#include "certgate/memory.hpp"
#include "certgate/scenario.hpp"

using namespace certgate;

namespace {

TraceEvent ev(const std::string& id, std::int64_t tick, EventKind kind) {
  TraceEvent e;
  e.event_id = id;
  e.tick = tick;
  e.kind = kind;
  e.principal = "agent_a";
  e.component = "c";
  return e;
}

}  // namespace

TEST_CASE("update is functional: the old state is untouched") {
  PolicySystem p = layered_finance_policy("fin-1");
  MemoryState s0 = init_memory(p);
  TraceEvent spoof = ev("s1", 1, EventKind::ToolCall);
  spoof.params["tool"] = std::string("spoof_order");
  MemoryState s1 = update(s0, spoof, p);
  CHECK(s0.monitor_states.at("spoof_guard") == "clean");
  CHECK(s1.monitor_states.at("spoof_guard") == "flagged");
  CHECK(s0.last_updated_tick == 0);
  CHECK(s1.last_updated_tick == 1);
}

TEST_CASE("time never runs backwards") {
  PolicySystem p = layered_finance_policy("fin-1");
  MemoryState s = update(init_memory(p), ev("a", 5, EventKind::Query), p);
  CHECK_THROWS_AS(update(s, ev("b", 4, EventKind::Query), p), TimeRegression);
  CHECK_NOTHROW(update(s, ev("b", 5, EventKind::Query), p));  // same tick is fine
}

TEST_CASE("counters prune by window and record breaches") {
  PolicySystem p;
  p.version = "w-1";
  PolicyLayer l;
  l.layer_id = "rate";
  l.kind = LayerKind::Counter;
  l.counter.counters.push_back(CounterDef{"n", 10, 1});
  CounterUpdate up;
  up.when.kind = EventKind::Query;
  up.counter = "n";
  up.const_delta = 1;
  l.counter.updates.push_back(up);
  p.layers.push_back(l);

  MemoryState s = init_memory(p);
  s = update(s, ev("a", 0, EventKind::Query), p);
  s = update(s, ev("b", 10, EventKind::Query), p);  // tick 0 aged out exactly
  CHECK(s.counter_breaches.empty());
  s = update(s, ev("c", 12, EventKind::Query), p);  // b still in window
  REQUIRE(s.counter_breaches.size() == 1);
  CHECK(s.counter_breaches[0].counter == "n");
  CHECK(s.counter_breaches[0].event_id == "c");
  CHECK(s.counter_breaches[0].value == 2);

  std::int64_t now_count = std::get<std::int64_t>(
      query(s, CounterCountQuery{"n", "agent_a", "", 10, 12}, MemoryClass::M1_Counter));
  CHECK(now_count == 2);
}

TEST_CASE("counter keys separate principals and resources") {
  PolicySystem p;
  p.version = "k-1";
  PolicyLayer l;
  l.layer_id = "rate";
  l.kind = LayerKind::Counter;
  l.counter.counters.push_back(CounterDef{"n", std::nullopt, 100});
  CounterUpdate up;
  up.when.kind = EventKind::Query;
  up.counter = "n";
  up.const_delta = 1;
  l.counter.updates.push_back(up);
  p.layers.push_back(l);

  MemoryState s = init_memory(p);
  TraceEvent a = ev("a", 1, EventKind::Query);
  a.resource = "db1";
  TraceEvent b = ev("b", 2, EventKind::Query);
  b.resource = "db2";
  TraceEvent c = ev("c", 3, EventKind::Query);
  c.principal = "agent_b";
  c.resource = "db1";
  s = update(update(update(s, a, p), b, p), c, p);

  auto count = [&](const std::string& principal, const std::string& resource) {
    return std::get<std::int64_t>(query(
        s, CounterCountQuery{"n", principal, resource, std::nullopt, 3},
        MemoryClass::M1_Counter));
  };
  CHECK(count("agent_a", "db1") == 1);
  CHECK(count("agent_a", "db2") == 1);
  CHECK(count("agent_b", "db1") == 1);
  CHECK(count("agent_b", "db2") == 0);
}

TEST_CASE("provenance and approvals are registered from events") {
  PolicySystem p = layered_finance_policy("fin-1");
  MemoryState s = init_memory(p);

  TraceEvent r = ev("r1", 1, EventKind::Retrieval);
  r.component = "vetted_feed";
  r.data_class = "market_data";
  r.purpose = "trade";
  s = update(s, r, p);
  ProvenanceRecord rec = std::get<ProvenanceRecord>(
      query(s, ProvenanceQuery{"r1"}, MemoryClass::M2_Provenance));
  CHECK(rec.source == "vetted_feed");
  CHECK(rec.data_class == "market_data");

  TraceEvent ap = ev("ap1", 2, EventKind::Approval);
  ap.principal = "officer_k";
  ap.params["approves_trace_hash"] = std::string(64, 'b');
  s = update(s, ap, p);
  auto found = std::get<std::optional<ApprovalRecord>>(
      query(s, ApprovalQuery{std::string(64, 'b')}, MemoryClass::M2_Provenance));
  REQUIRE(found.has_value());
  CHECK(found->approver == "officer_k");
  CHECK(found->valid_from == 2);
  CHECK(found->valid_until == 2 + kDefaultApprovalWindow);

  auto missing = std::get<std::optional<ApprovalRecord>>(
      query(s, ApprovalQuery{std::string(64, 'c')}, MemoryClass::M2_Provenance));
  CHECK(!missing.has_value());
}

TEST_CASE("capability gating: each class answers exactly its families") {
  PolicySystem p = layered_finance_policy("fin-1");
  MemoryState s = init_memory(p);
  s = update(s, ev("q1", 1, EventKind::Query), p);

  // monitor facts are open to every class
  CHECK_NOTHROW(query(s, MonitorStateQuery{"spoof_guard"}, MemoryClass::M0_FiniteState));
  CHECK_THROWS_AS(query(s, MonitorStateQuery{"nope"}, MemoryClass::M0_FiniteState),
                  UnknownFact);

  CounterCountQuery cq{"exposure", "agent_a", "", std::nullopt, 1};
  CHECK_THROWS_AS(query(s, cq, MemoryClass::M0_FiniteState), CapabilityDenied);
  CHECK_NOTHROW(query(s, cq, MemoryClass::M1_Counter));

  ProvenanceQuery pq{"q1"};
  CHECK_THROWS_AS(query(s, pq, MemoryClass::M1_Counter), CapabilityDenied);
  ApprovalQuery aq{std::string(64, 'a')};
  CHECK_THROWS_AS(query(s, aq, MemoryClass::M1_Counter), CapabilityDenied);
  CHECK_NOTHROW(query(s, aq, MemoryClass::M2_Provenance));
}

TEST_CASE("capability classes are monotone: higher classes answer everything below") {
  PolicySystem p = layered_finance_policy("fin-1");
  MemoryState s = init_memory(p);
  s = update(s, ev("q1", 1, EventKind::Query), p);
  const MemoryClass classes[] = {MemoryClass::M0_FiniteState, MemoryClass::M1_Counter,
                                 MemoryClass::M2_Provenance, MemoryClass::M3_Persistent};
  std::vector<FactQuery> probes = {
      MonitorStateQuery{"spoof_guard"},
      CounterCountQuery{"exposure", "agent_a", "", std::nullopt, 1},
      ApprovalQuery{std::string(64, 'a')},
  };
  for (std::size_t lo = 0; lo + 1 < 4; ++lo) {
    for (const auto& probe : probes) {
      bool lower_answers = true;
      try {
        query(s, probe, classes[lo]);
      } catch (const CapabilityDenied&) {
        lower_answers = false;
      }
      if (lower_answers)
        for (std::size_t hi = lo + 1; hi < 4; ++hi)
          CHECK_NOTHROW(query(s, probe, classes[hi]));
    }
  }
}
