#pragma once

#include <random>
#include <string>

#include "certgate/certifier.hpp"
#include "certgate/policy.hpp"
#include "certgate/trace.hpp"

namespace certgate::testing {

inline CertifierConfig test_cfg() {
  CertifierConfig cfg;
  cfg.certifier_id = "cert_t";
  cfg.authority_tier = Tier::C5;
  cfg.memory_class = MemoryClass::M2_Provenance;
  cfg.observation_mask = ObservationMask::FullTrace;
  cfg.mac_key = "test-key";
  cfg.sound = true;
  return cfg;
}

inline std::string random_name(std::mt19937_64& rng, const char* prefix) {
  return std::string(prefix) + std::to_string(rng() % 1000);
}

// Structurally valid trace with randomized content. Events stay free of
// observation slots so the trace is always executable as proposed.
inline ProposedTrace random_trace(std::mt19937_64& rng, const std::string& version) {
  static const EventKind kinds[] = {EventKind::Query,       EventKind::Retrieval,
                                    EventKind::ToolCall,    EventKind::Claim,
                                    EventKind::Approval,    EventKind::MemoryWrite,
                                    EventKind::Computation, EventKind::Release};
  ProposedTrace t;
  t.trace_id = random_name(rng, "tr");
  t.proposer_id = random_name(rng, "agent_");
  t.task = "random fixture";
  t.declared_tier = static_cast<Tier>(rng() % 4);  // C0..C3, no human witness needed
  t.requested_policy_version = version;
  std::size_t n = 1 + rng() % 6;
  std::int64_t tick = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tick += static_cast<std::int64_t>(rng() % 3);
    TraceEvent e;
    e.event_id = "e" + std::to_string(i);
    e.tick = tick;
    e.kind = kinds[rng() % (sizeof kinds / sizeof kinds[0])];
    e.principal = random_name(rng, "p");
    e.component = random_name(rng, "c");
    if (rng() % 2) e.resource = random_name(rng, "r");
    if (rng() % 4 == 0) e.data_class = "class_" + std::to_string(rng() % 3);
    if (rng() % 3 == 0) e.purpose = "purpose_" + std::to_string(rng() % 3);
    if (e.kind == EventKind::Computation) {
      std::int64_t a = static_cast<std::int64_t>(rng() % 50);
      std::int64_t b = static_cast<std::int64_t>(rng() % 50);
      e.params["expr"] = std::to_string(a) + "+" + std::to_string(b);
      e.params["value"] = a + b;
    } else {
      e.params["k" + std::to_string(rng() % 3)] =
          static_cast<std::int64_t>(rng() % 100);
    }
    if (rng() % 4 == 0)
      e.quantity_deltas["q"] = static_cast<std::int64_t>(rng() % 2000);
    if (i > 0 && rng() % 4 == 0 && e.kind == EventKind::Claim)
      e.evidence_refs.push_back("e" + std::to_string(rng() % i));
    e.irreversible = rng() % 8 == 0;
    t.events.push_back(std::move(e));
  }
  return t;
}

// Random single-counter policy so random (trace, policy) pairs exercise
// both verdicts.
inline PolicySystem random_policy(std::mt19937_64& rng, const std::string& version) {
  PolicySystem p;
  p.version = version;
  p.source = "test";
  p.effective_from = 0;
  PolicyLayer layer;
  layer.layer_id = "budget";
  layer.kind = LayerKind::Counter;
  layer.tier = Tier::C1;
  std::int64_t bound = 1 + static_cast<std::int64_t>(rng() % 4);
  layer.counter.counters.push_back(CounterDef{"n", 100, bound});
  CounterUpdate up;
  static const EventKind watched[] = {EventKind::Query, EventKind::ToolCall,
                                      EventKind::Retrieval, EventKind::Claim};
  up.when.kind = watched[rng() % 4];
  up.counter = "n";
  up.const_delta = 1;
  layer.counter.updates.push_back(up);
  p.layers.push_back(layer);
  if (rng() % 2) {
    PolicyLayer quota;
    quota.layer_id = "mass";
    quota.kind = LayerKind::Counter;
    quota.tier = Tier::C1;
    quota.counter.counters.push_back(
        CounterDef{"mass", std::nullopt, static_cast<std::int64_t>(500 + rng() % 3000)});
    CounterUpdate mu;
    mu.counter = "mass";
    mu.from_quantity = "q";
    quota.counter.updates.push_back(mu);
    p.layers.push_back(quota);
  }
  return p;
}

}  // namespace certgate::testing
