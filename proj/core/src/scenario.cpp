#include "certgate/scenario.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "certgate/boundary.hpp"
#include "certgate/certifier.hpp"
#include "certgate/errors.hpp"
#include "certgate/executor.hpp"
#include "certgate/generator.hpp"
#include "certgate/ledger.hpp"
#include "certgate/memory.hpp"

namespace certgate {

namespace {

struct Ctx {
  ScenarioReport r;

  void check(bool ok, const std::string& what) {
    if (ok) {
      r.checks.push_back("ok: " + what);
    } else {
      r.checks.push_back("FAIL: " + what);
      r.passed = false;
    }
  }
};

CertifierConfig default_cfg() {
  CertifierConfig cfg;
  cfg.certifier_id = "cert_1";
  cfg.authority_tier = Tier::C5;
  cfg.memory_class = MemoryClass::M2_Provenance;
  cfg.observation_mask = ObservationMask::FullTrace;
  cfg.mac_key = "scenario-key";
  cfg.sound = true;
  return cfg;
}

PolicySystem budget_policy(const std::string& version, std::int64_t bound) {
  PolicySystem p;
  p.version = version;
  p.source = "records-desk";
  p.effective_from = 0;
  PolicyLayer layer;
  layer.layer_id = "query_budget";
  layer.kind = LayerKind::Counter;
  layer.tier = Tier::C1;
  layer.description = "query budget per principal and resource per 100 ticks";
  layer.counter.counters.push_back(CounterDef{"q_count", 100, bound});
  CounterUpdate up;
  up.when.kind = EventKind::Query;
  up.counter = "q_count";
  up.const_delta = 1;
  layer.counter.updates.push_back(up);
  p.layers.push_back(layer);
  validate_policy(p);
  return p;
}

PolicySystem empty_policy(const std::string& version) {
  PolicySystem p;
  p.version = version;
  p.source = "desk";
  p.effective_from = 0;
  return p;
}

ProposedTrace base_trace(const std::string& id, const std::string& version) {
  ProposedTrace t;
  t.trace_id = id;
  t.proposer_id = "agent_a";
  t.task = "scenario fixture";
  t.declared_tier = Tier::C1;
  t.requested_policy_version = version;
  return t;
}

TraceEvent query_event(const std::string& id, std::int64_t tick) {
  TraceEvent e;
  e.event_id = id;
  e.tick = tick;
  e.kind = EventKind::Query;
  e.principal = "agent_a";
  e.component = "retriever";
  e.resource = "records_db";
  e.params["q"] = std::string("lookup");
  return e;
}

ProposedTrace query_trace(std::int64_t len, const std::string& version) {
  ProposedTrace t = base_trace("qb" + std::to_string(len), version);
  for (std::int64_t i = 1; i <= len; ++i)
    t.events.push_back(query_event("q" + std::to_string(i), i));
  return t;
}

TraceEvent order_event(const std::string& id, std::int64_t tick, std::int64_t bp) {
  TraceEvent e;
  e.event_id = id;
  e.tick = tick;
  e.kind = EventKind::ToolCall;
  e.principal = "trader_a";
  e.component = "exec";
  e.resource = "book";
  e.params["tool"] = std::string("place_order");
  e.quantity_deltas["exposure_bp"] = bp;
  return e;
}

TraceEvent approval_event(const std::string& id, std::int64_t tick) {
  TraceEvent e;
  e.event_id = id;
  e.tick = tick;
  e.kind = EventKind::Approval;
  e.principal = "officer_k";
  e.component = "approvals";
  return e;
}

bool reasons_contain(const std::vector<std::string>& reasons, const std::string& needle) {
  return std::any_of(reasons.begin(), reasons.end(), [&](const std::string& r) {
    return r.find(needle) != std::string::npos;
  });
}

bool has_component(const Certificate& cert, ComponentType type) {
  return std::any_of(cert.components.begin(), cert.components.end(),
                     [&](const CertificateComponent& c) { return c.component == type; });
}

// ---- scenarios -----------------------------------------------------------

void query_budget_scenario(Ctx& c) {
  PolicySystem p = budget_policy("budget-5", 5);
  CertifierConfig cfg = default_cfg();

  ProposedTrace five = query_trace(5, p.version);
  Verdict v5 = certify(five, p, init_memory(p), cfg);
  c.check(v5.outcome == Verdict::Outcome::Certified, "5-query trace is certified");

  ProposedTrace six = query_trace(6, p.version);
  for (std::size_t n = 1; n <= 5; ++n) {
    Verdict vp = certify(prefix(six, n), p, init_memory(p), cfg);
    c.check(vp.outcome == Verdict::Outcome::Certified,
            "prefix of length " + std::to_string(n) + " is locally certified");
  }
  Verdict v6 = certify(six, p, init_memory(p), cfg);
  c.check(v6.outcome == Verdict::Outcome::Rejected, "6-query trace is rejected");
  c.check(reasons_contain(v6.reasons, "6 > 5"), "rejection cites the 6 > 5 breach");
}

void impermissible_strategy_scenario(Ctx& c) {
  PolicySystem p = layered_finance_policy("fin-1");
  CertifierConfig cfg = default_cfg();

  ProposedTrace clean = base_trace("strat_clean", p.version);
  clean.events.push_back(order_event("o1", 1, 1000));
  Verdict vc = certify(clean, p, init_memory(p), cfg);
  c.check(vc.outcome == Verdict::Outcome::Certified, "ordinary order strategy is certified");

  ProposedTrace spoof = base_trace("strat_spoof", p.version);
  TraceEvent s = order_event("s1", 1, 0);
  s.params["tool"] = std::string("spoof_order");
  s.quantity_deltas.clear();
  spoof.events.push_back(s);
  Verdict vs = certify(spoof, p, init_memory(p), cfg);
  c.check(vs.outcome == Verdict::Outcome::Rejected, "spoofing strategy is rejected");
  c.check(reasons_contain(vs.reasons, "spoof_guard"), "rejection names the monitor layer");
}

void optimality_scenario(Ctx& c) {
  // A higher-scoring strategy that breaches the concentration bound loses
  // to a lower-scoring compliant one: reward and permissibility are
  // separate axes.
  PolicySystem p = empty_policy("conc-1");
  PolicyLayer conc;
  conc.layer_id = "concentration_limit";
  conc.kind = LayerKind::Counter;
  conc.tier = Tier::C2;
  conc.description = "total allocated position capped at 5000 bp";
  conc.counter.counters.push_back(CounterDef{"position", std::nullopt, 5000});
  CounterUpdate up;
  up.when.kind = EventKind::ToolCall;
  up.when.param_equals["tool"] = std::string("allocate");
  up.counter = "position";
  up.from_quantity = "position_bp";
  conc.counter.updates.push_back(up);
  p.layers.push_back(conc);
  validate_policy(p);

  auto alloc_trace = [&](const std::string& id, std::int64_t per_leg, std::int64_t legs,
                         std::int64_t claimed_return_bp) {
    ProposedTrace t = base_trace(id, p.version);
    for (std::int64_t i = 1; i <= legs; ++i) {
      TraceEvent e;
      e.event_id = "a" + std::to_string(i);
      e.tick = i;
      e.kind = EventKind::ToolCall;
      e.principal = "trader_a";
      e.component = "exec";
      e.resource = "book";
      e.params["tool"] = std::string("allocate");
      e.params["expected_return_bp"] = claimed_return_bp;
      e.quantity_deltas["position_bp"] = per_leg;
      t.events.push_back(e);
    }
    return t;
  };

  CertifierConfig cfg = default_cfg();
  ProposedTrace greedy = alloc_trace("greedy", 3000, 3, 1200);
  ProposedTrace modest = alloc_trace("modest", 2000, 2, 800);
  Verdict vg = certify(greedy, p, init_memory(p), cfg);
  Verdict vm = certify(modest, p, init_memory(p), cfg);
  c.check(vg.outcome == Verdict::Outcome::Rejected,
          "higher-return strategy breaching the limit is rejected");
  c.check(vm.outcome == Verdict::Outcome::Certified,
          "lower-return compliant strategy is certified");
}

void exposure_scenario(Ctx& c) {
  PolicySystem p = empty_policy("exp-1");
  PolicyLayer exposure;
  exposure.layer_id = "exposure_limit";
  exposure.kind = LayerKind::Counter;
  exposure.tier = Tier::C2;
  exposure.description = "cumulative order exposure capped at 2000 bp";
  exposure.counter.counters.push_back(CounterDef{"exposure", std::nullopt, 2000});
  CounterUpdate up;
  up.when.kind = EventKind::ToolCall;
  up.when.param_equals["tool"] = std::string("place_order");
  up.counter = "exposure";
  up.from_quantity = "exposure_bp";
  exposure.counter.updates.push_back(up);
  p.layers.push_back(exposure);
  validate_policy(p);

  ProposedTrace three = base_trace("orders3", p.version);
  for (std::int64_t i = 1; i <= 3; ++i)
    three.events.push_back(order_event("o" + std::to_string(i), i, 1000));

  // action-level view: every order is within the limit in isolation
  for (const auto& e : three.events) {
    LayerVerdict lv = evaluate_layer(p.layers[0], {e});
    c.check(lv.accepted, "order " + e.event_id + " passes the action-level check alone");
  }

  CertifierConfig cfg = default_cfg();
  Verdict v = certify(three, p, init_memory(p), cfg);
  c.check(v.outcome == Verdict::Outcome::Rejected, "cumulative 3000 bp trace is rejected");
  c.check(reasons_contain(v.reasons, "3000 > 2000"), "rejection cites 3000 > 2000");
  PermissibilityVerdict pv = evaluate(p, three);
  c.check(!pv.permitted && pv.per_layer[0].violation &&
              pv.per_layer[0].violation->event_id == "o3",
          "oracle pins the violation on the third order");
}

ProposedTrace compute_trace(const std::string& id, const std::string& version,
                            std::int64_t claimed) {
  ProposedTrace t = base_trace(id, version);
  TraceEvent comp;
  comp.event_id = "c1";
  comp.tick = 1;
  comp.kind = EventKind::Computation;
  comp.principal = "agent_a";
  comp.component = "calc";
  comp.params["expr"] = std::string("6*7");
  comp.params["value"] = claimed;
  t.events.push_back(comp);
  TraceEvent cl;
  cl.event_id = "cl1";
  cl.tick = 2;
  cl.kind = EventKind::Claim;
  cl.principal = "agent_a";
  cl.component = "reporter";
  cl.evidence_refs = {"c1"};
  cl.params["text"] = std::string("result reported");
  t.events.push_back(cl);
  return t;
}

void wrong_derivation_scenario(Ctx& c) {
  PolicySystem p = empty_policy("calc-1");
  CertifierConfig cfg = default_cfg();

  Verdict good = certify(compute_trace("calc_good", p.version, 42), p, init_memory(p), cfg);
  c.check(good.outcome == Verdict::Outcome::Certified, "correct derivation is certified");
  c.check(good.certificate && has_component(*good.certificate, ComponentType::Compute),
          "certificate carries a compute component");

  Verdict bad = certify(compute_trace("calc_bad", p.version, 41), p, init_memory(p), cfg);
  c.check(bad.outcome == Verdict::Outcome::Rejected, "claimed 41 against replayed 42 is rejected");
  c.check(reasons_contain(bad.reasons, "replay mismatch"), "rejection cites the replay mismatch");
}

ProposedTrace tier4_trace(const std::string& version) {
  ProposedTrace t = base_trace("wire_transfer", version);
  t.declared_tier = Tier::C4;
  TraceEvent e;
  e.event_id = "t1";
  e.tick = 5;
  e.kind = EventKind::ToolCall;
  e.principal = "agent_a";
  e.component = "exec";
  e.resource = "accounts";
  e.params["tool"] = std::string("transfer");
  e.irreversible = true;
  t.events.push_back(e);
  return t;
}

TraceEvent approval_for(const std::string& hash_hex, std::int64_t tick,
                        std::int64_t valid_from, std::int64_t valid_until) {
  TraceEvent a = approval_event("ap_ext", tick);
  a.params["approves_trace_hash"] = hash_hex;
  a.params["valid_from"] = valid_from;
  a.params["valid_until"] = valid_until;
  return a;
}

void escalation_scenario(Ctx& c) {
  PolicySystem p = empty_policy("esc-1");
  ProposedTrace t = tier4_trace(p.version);

  CertifierConfig low = default_cfg();
  low.authority_tier = Tier::C3;
  Verdict under = certify(t, p, init_memory(p), low);
  c.check(under.outcome == Verdict::Outcome::Escalate,
          "C4 work under a C3 certifier escalates");
  c.check(under.required_tier == Tier::C4, "escalation names the required tier");

  CertifierConfig high = default_cfg();
  Verdict unapproved = certify(t, p, init_memory(p), high);
  c.check(unapproved.outcome == Verdict::Outcome::Escalate,
          "C4 work without a human approval escalates");

  MemoryState mem = init_memory(p);
  mem = update(mem, approval_for(to_hex(canonical_hash(t)), 1, 0, 100), p);
  Verdict approved = certify(t, p, mem, high);
  c.check(approved.outcome == Verdict::Outcome::Certified,
          "C4 work with a fresh bound approval is certified");
  c.check(approved.certificate && has_component(*approved.certificate, ComponentType::Human),
          "certificate carries a human witness");
}

void proof_carrying_trade_scenario(Ctx& c) {
  PolicySystem p = layered_finance_policy("fin-1");
  CertifierConfig cfg = default_cfg();

  ProposedTrace t = base_trace("trade_1", p.version);
  t.events.push_back(approval_event("ap1", 1));
  TraceEvent r;
  r.event_id = "r1";
  r.tick = 2;
  r.kind = EventKind::Retrieval;
  r.principal = "agent_a";
  r.component = "vetted_feed";
  r.resource = "feed";
  r.data_class = "market_data";
  r.purpose = "trade";
  r.params["payload"] = std::string("px=101");
  r.params["px_bp"] = std::int64_t{1010000};
  t.events.push_back(r);
  TraceEvent comp;
  comp.event_id = "c1";
  comp.tick = 3;
  comp.kind = EventKind::Computation;
  comp.principal = "agent_a";
  comp.component = "sizer";
  comp.params["expr"] = std::string("2*500");
  comp.params["value"] = std::int64_t{1000};
  t.events.push_back(comp);
  TraceEvent cl;
  cl.event_id = "cl1";
  cl.tick = 4;
  cl.kind = EventKind::Claim;
  cl.principal = "agent_a";
  cl.component = "reporter";
  cl.purpose = "trade";
  cl.evidence_refs = {"r1", "c1"};
  cl.params["text"] = std::string("sized within limits");
  t.events.push_back(cl);
  TraceEvent o = order_event("o1", 5, 1000);
  o.irreversible = true;
  t.events.push_back(o);

  Verdict v = certify(t, p, init_memory(p), cfg);
  c.check(v.outcome == Verdict::Outcome::Certified, "trade proposal is certified");
  if (!v.certificate) return;
  const Certificate& cert = *v.certificate;
  c.check(has_component(cert, ComponentType::Source), "certificate has source lineage");
  c.check(has_component(cert, ComponentType::Compute), "certificate has replayed compute");
  c.check(has_component(cert, ComponentType::Privacy),
          "certificate holds evidence as commitments");
  bool commitment_ok = false;
  for (const auto& comp2 : cert.components)
    for (const auto& ev : comp2.evidence)
      if (ev.rfind("commit:", 0) == 0)
        commitment_ok = verify_commitment("px=101", from_hex(ev.substr(7)));
  c.check(commitment_ok, "payload commitment opens against the raw payload");
  c.check(check_certificate(cert, t, p, cfg.mac_key), "independent certificate check passes");

  Ledger ledger;
  Environment env;
  env.clock = 5;
  ExecutionResult res = execute(t, cert, p, env, ledger, cfg.mac_key);
  c.check(res.realized.outcome == ExecutionOutcome::Completed, "execution completes");
  c.check(conform(res.realized, t).conforms, "realized trace conforms to the proposal");
  c.check(evaluate(p, res.realized).permitted, "realized trace is permitted by the oracle");
  c.check(ledger.verify().ok, "ledger chain verifies after execution");
}

void drift_scenario(Ctx& c) {
  PolicySystem old_p = budget_policy("budget-5", 5);
  PolicySystem new_p = budget_policy("budget-3", 3);
  CertifierConfig cfg = default_cfg();

  GeneratorSpec gen;
  gen.seed = 7;
  gen.templates = {{TemplateKind::QueryBurst, kPpm}};
  gen.knobs_ppm["p_over_budget"] = kPpm / 4;
  gen.horizon = 7;
  gen.mode = GeneratorSpec::Mode::Enumerate;
  gen.n = 100;

  Ledger ledger;
  std::map<std::string, ProposedTrace> stored;
  for (const auto& wt : enumerate_universe(gen, old_p.version)) {
    Verdict v = certify(wt.trace, old_p, init_memory(old_p), cfg);
    if (v.outcome != Verdict::Outcome::Certified) continue;
    stored[to_hex(canonical_hash(wt.trace))] = wt.trace;
    ledger.append(LedgerBody{canonical_hash(wt.trace), serialize_certificate(*v.certificate),
                             "Certified", old_p.version, old_p.source, old_p.effective_from,
                             wt.trace.events.back().tick});
  }
  c.check(ledger.size() == 5, "lengths 1 through 5 were certified under budget 5");

  TraceStore store = [&](const Digest& h) -> std::optional<ProposedTrace> {
    auto it = stored.find(to_hex(h));
    if (it == stored.end()) return std::nullopt;
    return it->second;
  };
  std::vector<std::string> flagged;
  for (const auto& e : ledger.entries()) {
    RecertifyResult rr = recertify(e, new_p, store);
    if (rr.drift) flagged.push_back(stored.at(to_hex(e.body.trace_hash)).trace_id);
  }
  std::sort(flagged.begin(), flagged.end());
  c.check(flagged == std::vector<std::string>({"qb4", "qb5"}),
          "re-certification flags exactly the 4- and 5-query entries");

  // the flagged entries' generated mass: two lengths at (1 - 1/4) / 5 each
  Rational expected = Rational(3, 4) * Rational(2, 5);
  Rational d = drift_eval(gen, cfg, old_p, new_p);
  c.check(d == expected, "drift mass equals the enumerated mass of the flagged lengths");
  c.check(drift_eval(gen, cfg, old_p, old_p) == 0, "drift against the same policy is zero");
}

void self_approval_scenario(Ctx& c) {
  PolicySystem p = empty_policy("sep-1");
  ProposedTrace t = compute_trace("self_cert", p.version, 42);

  CertifierConfig cfg = default_cfg();
  cfg.certifier_id = t.proposer_id;
  Verdict v = certify(t, p, init_memory(p), cfg);
  c.check(v.outcome == Verdict::Outcome::Rejected, "proposer certifying itself is rejected");
  c.check(reasons_contain(v.reasons, "self-approval"), "rejection names the role violation");

  // a forged certificate naming the proposer as certifier fails the
  // independent check even with a valid authenticator
  CertifierConfig honest = default_cfg();
  Verdict hv = certify(t, p, init_memory(p), honest);
  c.check(hv.outcome == Verdict::Outcome::Certified, "separate certifier certifies the trace");
  if (hv.certificate) {
    Certificate forged = *hv.certificate;
    forged.certifier_id = t.proposer_id;
    forged.mac = certificate_mac(forged, honest.mac_key);
    CheckDetail d = check_certificate_detailed(forged, t, p, honest.mac_key);
    c.check(!d.ok, "forged self-certified certificate fails the check");
  }
}

void stale_approval_scenario(Ctx& c) {
  PolicySystem p = empty_policy("stale-1");
  ProposedTrace t = tier4_trace(p.version);
  CertifierConfig cfg = default_cfg();
  std::string hash_hex = to_hex(canonical_hash(t));

  MemoryState expired = init_memory(p);
  expired = update(expired, approval_for(hash_hex, 1, 0, 3), p);
  Verdict ve = certify(t, p, expired, cfg);  // issue tick 5, window ended at 3
  c.check(ve.outcome == Verdict::Outcome::Escalate, "expired approval escalates");
  c.check(reasons_contain(ve.reasons, "outside its validity window"),
          "escalation cites the stale window");

  MemoryState wrong = init_memory(p);
  wrong = update(wrong, approval_for(std::string(64, 'a'), 1, 0, 100), p);
  Verdict vw = certify(t, p, wrong, cfg);
  c.check(vw.outcome == Verdict::Outcome::Escalate,
          "approval bound to a different trace escalates");
  c.check(reasons_contain(vw.reasons, "no approval bound"),
          "escalation reports the missing binding");
}

void tool_deviation_scenario(Ctx& c) {
  PolicySystem p = empty_policy("exe-1");
  CertifierConfig cfg = default_cfg();

  ProposedTrace t = base_trace("deploy", p.version);
  TraceEvent s1;
  s1.event_id = "s1";
  s1.tick = 1;
  s1.kind = EventKind::ToolCall;
  s1.principal = "agent_a";
  s1.component = "staging";
  s1.params["tool"] = std::string("stage");
  t.events.push_back(s1);
  TraceEvent x1 = s1;
  x1.event_id = "x1";
  x1.tick = 2;
  x1.component = "prod";
  x1.params["tool"] = std::string("apply");
  x1.irreversible = true;
  t.events.push_back(x1);
  TraceEvent s2 = s1;
  s2.event_id = "s2";
  s2.tick = 3;
  s2.component = "audit";
  s2.params["tool"] = std::string("report");
  t.events.push_back(s2);

  Verdict v = certify(t, p, init_memory(p), cfg);
  c.check(v.outcome == Verdict::Outcome::Certified, "deployment proposal is certified");
  if (!v.certificate) return;

  // deviation before anything irreversible: halt, nothing runs after
  {
    Ledger ledger;
    Environment env;
    env.clock = 1;
    env.deviation_injections.push_back({"s1", "param:tool", "stage_other"});
    ExecutionResult res = execute(t, *v.certificate, p, env, ledger, cfg.mac_key);
    c.check(res.realized.outcome == ExecutionOutcome::Halted,
            "pre-irreversible deviation halts execution");
    c.check(res.halted_before == "s1", "halt happens before the deviant event");
    c.check(res.realized.events.empty(), "no event was realized");
    c.check(!conform(res.realized, t).conforms, "realized trace fails conformance");
  }
  // deviation after the irreversible step: rollback with compensation
  {
    Ledger ledger;
    Environment env;
    env.clock = 1;
    env.deviation_injections.push_back({"s2", "param:tool", "report_tampered"});
    ExecutionResult res = execute(t, *v.certificate, p, env, ledger, cfg.mac_key);
    c.check(res.realized.outcome == ExecutionOutcome::RolledBack,
            "post-irreversible deviation rolls back");
    bool compensated = std::any_of(
        ledger.entries().begin(), ledger.entries().end(),
        [](const LedgerEntry& e) { return e.body.outcome == "Compensation"; });
    c.check(compensated, "compensating record was appended for the irreversible step");
    c.check(!res.realized.deviation_log.empty(), "deviation log captures the mismatch");
  }
}

void guardrail_baseline_scenario(Ctx& c) {
  PolicySystem p = budget_policy("budget-5", 5);
  GeneratorSpec gen;
  gen.seed = 11;
  gen.templates = {{TemplateKind::QueryBurst, kPpm}};
  gen.knobs_ppm["p_over_budget"] = kPpm / 2;
  gen.horizon = 7;
  gen.mode = GeneratorSpec::Mode::Enumerate;
  gen.n = 100;

  CertifierConfig guardrail = default_cfg();
  guardrail.observation_mask = ObservationMask::FinalEventOnly;
  guardrail.sound = false;
  BoundaryReport gr = exact_measures(gen, guardrail, p);
  c.check(gr.u.value == Rational(1, 2),
          "final-event guardrail certifies all over-budget mass (u = 1/2)");

  CertifierConfig masked_sound = default_cfg();
  masked_sound.observation_mask = ObservationMask::FinalEventOnly;
  BoundaryReport ms = exact_measures(gen, masked_sound, p);
  c.check(ms.u.value == 0, "masked but sound certifier never certifies impermissible mass");
  c.check(ms.m.value == Rational(2, 5),
          "masked soundness pays with missed certifications (m = 2/5)");

  CertifierConfig full = default_cfg();
  BoundaryReport fr = exact_measures(gen, full, p);
  c.check(fr.u.value == 0 && fr.m.value == 0,
          "full-trace sound certifier tracks the oracle exactly");
  c.check(fr.identity_residual == 0 && ms.identity_residual == 0 &&
              gr.identity_residual == 0,
          "mass decomposition identity holds in all three configurations");
}

using ScenarioFn = void (*)(Ctx&);

const std::vector<std::pair<std::string, ScenarioFn>>& registry() {
  static const std::vector<std::pair<std::string, ScenarioFn>> reg = {
      {"query_budget", query_budget_scenario},
      {"impermissible_strategy", impermissible_strategy_scenario},
      {"optimality_without_permissibility", optimality_scenario},
      {"exposure_noncompositional", exposure_scenario},
      {"wrong_derivation", wrong_derivation_scenario},
      {"escalation", escalation_scenario},
      {"proof_carrying_trade", proof_carrying_trade_scenario},
      {"persistent_memory_drift", drift_scenario},
      {"self_approval", self_approval_scenario},
      {"stale_approval", stale_approval_scenario},
      {"tool_deviation", tool_deviation_scenario},
      {"guardrail_baseline", guardrail_baseline_scenario},
  };
  return reg;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

ScenarioReport run_scenario(const std::string& name, std::uint64_t seed) {
  (void)seed;  // scenarios are fixture-driven; the seed is reserved for future fuzzing
  for (const auto& [n, fn] : registry()) {
    if (n != name) continue;
    Ctx c;
    c.r.name = name;
    fn(c);
    return c.r;
  }
  throw UnknownScenario("no scenario named '" + name + "'");
}

std::string format_report(const ScenarioReport& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " " << r.name << "\n";
  for (const auto& line : r.checks) os << "  " << line << "\n";
  return os.str();
}

PolicySystem layered_finance_policy(const std::string& version) {
  PolicySystem p;
  p.version = version;
  p.source = "risk-desk";
  p.effective_from = 0;

  PolicyLayer guard;
  guard.layer_id = "spoof_guard";
  guard.kind = LayerKind::Monitor;
  guard.tier = Tier::C2;
  guard.description = "any spoofing order permanently flags the trace";
  guard.monitor.states = {"clean", "flagged"};
  guard.monitor.initial = "clean";
  guard.monitor.accepting = {"clean"};
  MonitorTransition tr;
  tr.from = "clean";
  tr.when.kind = EventKind::ToolCall;
  tr.when.param_equals["tool"] = std::string("spoof_order");
  tr.to = "flagged";
  guard.monitor.transitions.push_back(tr);
  guard.monitor.defaults = {{"clean", StateDefault::SelfLoop},
                            {"flagged", StateDefault::SelfLoop}};
  p.layers.push_back(guard);

  PolicyLayer exposure;
  exposure.layer_id = "exposure_limit";
  exposure.kind = LayerKind::Counter;
  exposure.tier = Tier::C2;
  exposure.description = "cumulative order exposure capped at 2000 bp";
  exposure.counter.counters.push_back(CounterDef{"exposure", std::nullopt, 2000});
  CounterUpdate eu;
  eu.when.kind = EventKind::ToolCall;
  eu.when.param_equals["tool"] = std::string("place_order");
  eu.counter = "exposure";
  eu.from_quantity = "exposure_bp";
  exposure.counter.updates.push_back(eu);
  p.layers.push_back(exposure);

  PolicyLayer precedence;
  precedence.layer_id = "approval_before_transfer";
  precedence.kind = LayerKind::Temporal;
  precedence.tier = Tier::C2;
  precedence.description = "transfers require a prior approval event";
  precedence.temporal.pattern = TemporalPattern::Precedence;
  precedence.temporal.a.kind = EventKind::Approval;
  precedence.temporal.b.kind = EventKind::ToolCall;
  precedence.temporal.b.param_equals["tool"] = std::string("transfer");
  p.layers.push_back(precedence);

  PolicyLayer flow;
  flow.layer_id = "vetted_sources";
  flow.kind = LayerKind::InfoFlow;
  flow.tier = Tier::C1;
  flow.description = "market data only from the vetted feed; claims need evidence";
  flow.infoflow.auth_table.push_back(AuthTuple{"*", "vetted_feed", "market_data", "*"});
  flow.infoflow.purpose_binding = true;
  p.layers.push_back(flow);

  validate_policy(p);
  return p;
}

}  // namespace certgate
