#include <doctest.h>

#include <random>

#include "certgate/errors.hpp"
#include "certgate/generator.hpp"
#include "certgate/policy.hpp"
#include "certgate/scenario.hpp"
#include "helpers.hpp"

using namespace certgate;

namespace {

TraceEvent simple_event(const std::string& id, std::int64_t tick, EventKind kind) {
  TraceEvent e;
  e.event_id = id;
  e.tick = tick;
  e.kind = kind;
  e.principal = "agent_a";
  e.component = "c";
  return e;
}

PolicyLayer response_layer(std::int64_t k) {
  PolicyLayer l;
  l.layer_id = "respond";
  l.kind = LayerKind::Temporal;
  l.temporal.pattern = TemporalPattern::ResponseWithin;
  l.temporal.a.kind = EventKind::Query;
  l.temporal.b.kind = EventKind::Claim;
  l.temporal.k = k;
  return l;
}

}  // namespace

TEST_CASE("conjunction: one violated layer fails the whole system") {
  PolicySystem p = layered_finance_policy("fin-1");
  REQUIRE(p.layers.size() == 4);

  // transfer without approval violates only the temporal layer
  ProposedTrace t;
  t.trace_id = "transfer_only";
  t.proposer_id = "agent_a";
  t.declared_tier = Tier::C1;
  t.requested_policy_version = p.version;
  TraceEvent e = simple_event("t1", 1, EventKind::ToolCall);
  e.params["tool"] = std::string("transfer");
  t.events.push_back(e);

  PermissibilityVerdict v = evaluate(p, t);
  CHECK(!v.permitted);
  int failing = 0;
  for (const auto& lv : v.per_layer)
    if (!lv.accepted) {
      ++failing;
      CHECK(lv.layer_id == "approval_before_transfer");
    }
  CHECK(failing == 1);
}

TEST_CASE("predicate matching and provable disjointness") {
  EventPredicate a;
  a.kind = EventKind::Query;
  a.principal = "alice";
  EventPredicate b;
  b.kind = EventKind::Query;
  b.principal = "bob";
  EventPredicate c;
  c.kind = EventKind::Query;  // wildcard principal

  CHECK(a.disjoint_with(b));
  CHECK(!a.disjoint_with(c));  // overlap cannot be ruled out

  TraceEvent e = simple_event("e1", 1, EventKind::Query);
  e.principal = "alice";
  CHECK(a.matches(e));
  CHECK(!b.matches(e));
  CHECK(c.matches(e));

  EventPredicate px;
  px.param_equals["tool"] = std::string("transfer");
  EventPredicate py;
  py.param_equals["tool"] = std::string("deploy");
  CHECK(px.disjoint_with(py));
}

TEST_CASE("monitor determinism is a load-time error") {
  PolicySystem p;
  p.version = "nd-1";
  PolicyLayer l;
  l.layer_id = "nd";
  l.kind = LayerKind::Monitor;
  l.monitor.states = {"s0", "s1", "s2"};
  l.monitor.initial = "s0";
  l.monitor.accepting = {"s0", "s1", "s2"};
  MonitorTransition t1;
  t1.from = "s0";
  t1.when.kind = EventKind::Query;
  t1.to = "s1";
  MonitorTransition t2;
  t2.from = "s0";
  t2.when.principal = "alice";  // overlaps t1 on a Query by alice
  t2.to = "s2";
  l.monitor.transitions = {t1, t2};
  l.monitor.defaults = {{"s0", StateDefault::SelfLoop},
                        {"s1", StateDefault::SelfLoop},
                        {"s2", StateDefault::SelfLoop}};
  p.layers.push_back(l);
  CHECK_THROWS_AS(validate_policy(p), NondeterministicMonitor);

  // pinning the same field to different constants restores determinism
  p.layers[0].monitor.transitions[1].when.principal.reset();
  p.layers[0].monitor.transitions[1].when.kind = EventKind::Claim;
  CHECK_NOTHROW(validate_policy(p));
}

TEST_CASE("every monitor state needs an explicit default") {
  PolicySystem p;
  p.version = "d-1";
  PolicyLayer l;
  l.layer_id = "m";
  l.kind = LayerKind::Monitor;
  l.monitor.states = {"s0"};
  l.monitor.initial = "s0";
  l.monitor.accepting = {"s0"};
  p.layers.push_back(l);
  CHECK_THROWS_AS(validate_policy(p), ValidationError);
  p.layers[0].monitor.defaults["s0"] = StateDefault::SelfLoop;
  CHECK_NOTHROW(validate_policy(p));
}

TEST_CASE("reject default kills the trace at the first unmatched event") {
  PolicySystem p;
  p.version = "rj-1";
  PolicyLayer l;
  l.layer_id = "strict";
  l.kind = LayerKind::Monitor;
  l.monitor.states = {"s0"};
  l.monitor.initial = "s0";
  l.monitor.accepting = {"s0"};
  MonitorTransition tr;
  tr.from = "s0";
  tr.when.kind = EventKind::Query;
  tr.to = "s0";
  l.monitor.transitions = {tr};
  l.monitor.defaults = {{"s0", StateDefault::Reject}};
  p.layers.push_back(l);

  std::vector<TraceEvent> ok = {simple_event("q1", 1, EventKind::Query)};
  CHECK(evaluate_layer(p.layers[0], ok).accepted);
  std::vector<TraceEvent> bad = {simple_event("q1", 1, EventKind::Query),
                                 simple_event("c1", 2, EventKind::Claim)};
  LayerVerdict lv = evaluate_layer(p.layers[0], bad);
  CHECK(!lv.accepted);
  CHECK(lv.violation->event_id == "c1");
}

TEST_CASE("counter window semantics: (now - event) < window keeps the event") {
  PolicySystem p;
  p.version = "w-1";
  PolicyLayer l;
  l.layer_id = "rate";
  l.kind = LayerKind::Counter;
  l.counter.counters.push_back(CounterDef{"n", 10, 2});
  CounterUpdate up;
  up.when.kind = EventKind::Query;
  up.counter = "n";
  up.const_delta = 1;
  l.counter.updates.push_back(up);
  p.layers.push_back(l);

  // ticks 0 and 9 are both inside the window at tick 9 (9 - 0 < 10)
  std::vector<TraceEvent> inside = {simple_event("a", 0, EventKind::Query),
                                    simple_event("b", 9, EventKind::Query),
                                    simple_event("c", 9, EventKind::Query)};
  CHECK(!evaluate_layer(p.layers[0], inside).accepted);

  // tick 0 ages out exactly at tick 10 (10 - 0 >= 10)
  std::vector<TraceEvent> aged = {simple_event("a", 0, EventKind::Query),
                                  simple_event("b", 10, EventKind::Query),
                                  simple_event("c", 10, EventKind::Query)};
  CHECK(evaluate_layer(p.layers[0], aged).accepted);
}

TEST_CASE("temporal patterns: precedence and absence-after") {
  PolicyLayer prec;
  prec.layer_id = "prec";
  prec.kind = LayerKind::Temporal;
  prec.temporal.pattern = TemporalPattern::Precedence;
  prec.temporal.a.kind = EventKind::Approval;
  prec.temporal.b.kind = EventKind::ToolCall;

  std::vector<TraceEvent> good = {simple_event("a", 1, EventKind::Approval),
                                  simple_event("t", 2, EventKind::ToolCall)};
  std::vector<TraceEvent> bad = {simple_event("t", 1, EventKind::ToolCall),
                                 simple_event("a", 2, EventKind::Approval)};
  CHECK(evaluate_layer(prec, good).accepted);
  CHECK(!evaluate_layer(prec, bad).accepted);

  PolicyLayer abs;
  abs.layer_id = "abs";
  abs.kind = LayerKind::Temporal;
  abs.temporal.pattern = TemporalPattern::AbsenceAfter;
  abs.temporal.a.kind = EventKind::Release;
  abs.temporal.b.kind = EventKind::MemoryWrite;
  std::vector<TraceEvent> violating = {simple_event("w", 1, EventKind::MemoryWrite),
                                       simple_event("r", 2, EventKind::Release)};
  CHECK(!evaluate_layer(abs, violating).accepted);
  std::vector<TraceEvent> fine = {simple_event("r", 1, EventKind::Release),
                                  simple_event("w", 2, EventKind::MemoryWrite)};
  CHECK(evaluate_layer(abs, fine).accepted);
}

TEST_CASE("response-within membership is not prefix-closed") {
  PolicyLayer l = response_layer(5);
  std::vector<TraceEvent> full = {simple_event("q", 1, EventKind::Query),
                                  simple_event("c", 3, EventKind::Claim)};
  CHECK(evaluate_layer(l, full).accepted);
  // the prefix leaves the obligation open, so it is outside the language
  std::vector<TraceEvent> pre = {full[0]};
  CHECK(!evaluate_layer(l, pre).accepted);
  // discharge too late fails as well
  std::vector<TraceEvent> late = {simple_event("q", 1, EventKind::Query),
                                  simple_event("c", 9, EventKind::Claim)};
  CHECK(!evaluate_layer(l, late).accepted);
}

TEST_CASE("info flow: allow list, purpose binding, release constraints") {
  PolicyLayer f;
  f.layer_id = "flow";
  f.kind = LayerKind::InfoFlow;
  f.infoflow.auth_table.push_back(AuthTuple{"*", "vetted_feed", "market_data", "*"});
  f.infoflow.purpose_binding = true;
  f.infoflow.release_constraints.insert("pii");

  TraceEvent r = simple_event("r1", 1, EventKind::Retrieval);
  r.component = "vetted_feed";
  r.data_class = "market_data";
  r.purpose = "trade";
  CHECK(evaluate_layer(f, {r}).accepted);

  TraceEvent shady = r;
  shady.component = "unvetted_feed";
  CHECK(!evaluate_layer(f, {shady}).accepted);

  TraceEvent claim = simple_event("c1", 2, EventKind::Claim);
  claim.purpose = "marketing";
  claim.evidence_refs = {"r1"};
  CHECK(!evaluate_layer(f, {r, claim}).accepted);  // purpose mismatch
  claim.purpose = "trade";
  CHECK(evaluate_layer(f, {r, claim}).accepted);

  TraceEvent rel = simple_event("x1", 3, EventKind::Release);
  rel.data_class = "pii";
  LayerVerdict lv = evaluate_layer(f, {rel});
  CHECK(!lv.accepted);
}

TEST_CASE("strengthen rejects duplicate layer ids and bumps the version") {
  PolicySystem p = layered_finance_policy("fin-1");
  PolicyLayer extra = response_layer(3);
  PolicySystem q = strengthen(p, extra, "fin-2");
  CHECK(q.version == "fin-2");
  CHECK(q.layers.size() == p.layers.size() + 1);
  CHECK_THROWS_AS(strengthen(q, extra, "fin-3"), DuplicateLayerId);
}

TEST_CASE("conjunctive strengthening never shrinks the impermissible set") {
  GeneratorSpec gen;
  gen.seed = 5;
  gen.templates = {{TemplateKind::QueryBurst, kPpm / 2},
                   {TemplateKind::ExposureOrders, kPpm / 4},
                   {TemplateKind::ApprovalFlow, kPpm - kPpm / 2 - kPpm / 4}};
  gen.knobs_ppm = {{"p_over_budget", 300000},
                   {"p_over_exposure", 300000},
                   {"p_missing_approval", 300000}};
  gen.mode = GeneratorSpec::Mode::Sample;
  gen.n = 1000;
  PolicySystem base = standard_oracle_policy("v1");
  TraceSampler sampler(gen, base.version);
  std::vector<ProposedTrace> sample;
  for (int i = 0; i < 1000; ++i) sample.push_back(sampler.next());

  std::mt19937_64 rng(17);
  for (int round = 0; round < 10; ++round) {
    PolicyLayer extra;
    extra.layer_id = "extra_" + std::to_string(round);
    extra.kind = LayerKind::Counter;
    extra.counter.counters.push_back(
        CounterDef{"x", std::nullopt, static_cast<std::int64_t>(rng() % 6)});
    CounterUpdate up;
    static const EventKind ks[] = {EventKind::Query, EventKind::ToolCall,
                                   EventKind::Approval, EventKind::Retrieval};
    up.when.kind = ks[rng() % 4];
    up.counter = "x";
    up.const_delta = 1;
    extra.counter.updates.push_back(up);
    PolicySystem stronger = strengthen(base, extra, "v1");  // keep versions aligned

    int gap_base = 0, gap_strong = 0;
    for (const auto& t : sample) {
      bool pb = evaluate(base, t).permitted;
      bool ps = evaluate(stronger, t).permitted;
      if (!pb) ++gap_base;
      if (!ps) ++gap_strong;
      CHECK(!(pb == false && ps == true));  // pointwise containment
    }
    CHECK(gap_strong >= gap_base);
  }
}

TEST_CASE("policy serialization round-trips every layer kind") {
  PolicySystem p = layered_finance_policy("fin-1");
  PolicySystem back = parse_policy(serialize_policy(p));
  CHECK(back.version == p.version);
  CHECK(back.layers.size() == p.layers.size());
  CHECK(serialize_policy(back) == serialize_policy(p));
  // behavioural equality on a probe trace
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    ProposedTrace t = certgate::testing::random_trace(rng, "fin-1");
    CHECK(evaluate(back, t).permitted == evaluate(p, t).permitted);
  }
}
