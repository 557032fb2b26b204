#include "certgate/memory.hpp"

#include <algorithm>

#include "certgate/errors.hpp"

namespace certgate {

const char* to_string(MemoryClass m) {
  switch (m) {
    case MemoryClass::M0_FiniteState: return "M0";
    case MemoryClass::M1_Counter: return "M1";
    case MemoryClass::M2_Provenance: return "M2";
    case MemoryClass::M3_Persistent: return "M3";
  }
  return "?";
}

MemoryClass memory_class_from_string(const std::string& s) {
  if (s == "M0") return MemoryClass::M0_FiniteState;
  if (s == "M1") return MemoryClass::M1_Counter;
  if (s == "M2") return MemoryClass::M2_Provenance;
  if (s == "M3") return MemoryClass::M3_Persistent;
  throw ParseError("unknown memory class: " + s);
}

MemoryState init_memory(const PolicySystem& policy) {
  MemoryState s;
  for (const auto& layer : policy.layers)
    if (layer.kind == LayerKind::Monitor)
      s.monitor_states[layer.layer_id] = layer.monitor.initial;
  return s;
}

MemoryState update(const MemoryState& state, const TraceEvent& event,
                   const PolicySystem& policy) {
  if (event.tick < state.last_updated_tick)
    throw TimeRegression("event tick " + std::to_string(event.tick) +
                         " precedes memory tick " +
                         std::to_string(state.last_updated_tick));
  MemoryState next = state;
  next.last_updated_tick = event.tick;

  for (const auto& layer : policy.layers) {
    if (layer.kind == LayerKind::Monitor) {
      auto it = next.monitor_states.find(layer.layer_id);
      if (it == next.monitor_states.end()) continue;
      bool dead = std::any_of(next.monitor_rejections.begin(), next.monitor_rejections.end(),
                              [&](const MonitorRejection& r) {
                                return r.layer_id == layer.layer_id;
                              });
      if (dead) continue;
      const MonitorTransition* hit = nullptr;
      for (const auto& tr : layer.monitor.transitions) {
        if (tr.from != it->second) continue;
        if (tr.when.matches(event)) {
          hit = &tr;
          break;
        }
      }
      if (hit) {
        it->second = hit->to;
      } else {
        auto d = layer.monitor.defaults.find(it->second);
        StateDefault def =
            d == layer.monitor.defaults.end() ? StateDefault::SelfLoop : d->second;
        if (def == StateDefault::Reject)
          next.monitor_rejections.push_back({layer.layer_id, event.event_id});
      }
    } else if (layer.kind == LayerKind::Counter) {
      for (const auto& up : layer.counter.updates) {
        if (!up.when.matches(event)) continue;
        auto def = std::find_if(layer.counter.counters.begin(), layer.counter.counters.end(),
                                [&](const CounterDef& c) { return c.name == up.counter; });
        if (def == layer.counter.counters.end()) continue;
        std::int64_t delta = 0;
        if (up.const_delta) {
          delta = *up.const_delta;
        } else if (up.from_quantity) {
          auto q = event.quantity_deltas.find(*up.from_quantity);
          if (q != event.quantity_deltas.end()) delta = q->second;
        }
        CounterKey key{def->name, event.principal, event.resource.value_or("")};
        auto& v = next.counters[key];
        if (def->window_ticks)
          std::erase_if(v, [&](const auto& p) {
            return event.tick - p.first >= *def->window_ticks;
          });
        v.emplace_back(event.tick, delta);
        std::int64_t sum = 0;
        for (const auto& p : v) sum += p.second;
        if (sum > def->bound)
          next.counter_breaches.push_back(
              {layer.layer_id, def->name, event.event_id, sum, def->bound});
      }
    }
  }

  if (event.kind == EventKind::Retrieval) {
    next.provenance[event.event_id] =
        ProvenanceRecord{event.component, event.data_class, event.purpose};
  }
  if (event.kind == EventKind::Approval) {
    auto it = event.params.find("approves_trace_hash");
    if (it != event.params.end() && std::holds_alternative<std::string>(it->second)) {
      ApprovalRecord rec;
      rec.approver = event.principal;
      rec.valid_from = event.tick;
      if (auto f = event.params.find("valid_from");
          f != event.params.end() && std::holds_alternative<std::int64_t>(f->second))
        rec.valid_from = std::get<std::int64_t>(f->second);
      rec.valid_until = rec.valid_from + kDefaultApprovalWindow;
      if (auto u = event.params.find("valid_until");
          u != event.params.end() && std::holds_alternative<std::int64_t>(u->second))
        rec.valid_until = std::get<std::int64_t>(u->second);
      next.approvals[std::get<std::string>(it->second)] = rec;
    }
  }
  return next;
}

FactAnswer query(const MemoryState& state, const FactQuery& fact, MemoryClass cls) {
  const int level = static_cast<int>(cls);
  if (std::holds_alternative<MonitorStateQuery>(fact)) {
    const auto& q = std::get<MonitorStateQuery>(fact);
    auto it = state.monitor_states.find(q.layer_id);
    if (it == state.monitor_states.end())
      throw UnknownFact("no monitor state for layer " + q.layer_id);
    return it->second;
  }
  if (std::holds_alternative<CounterCountQuery>(fact)) {
    if (level < 1) throw CapabilityDenied("counter facts need M1");
    const auto& q = std::get<CounterCountQuery>(fact);
    auto it = state.counters.find(CounterKey{q.counter, q.principal, q.resource});
    std::int64_t sum = 0;
    if (it != state.counters.end())
      for (const auto& [tick, delta] : it->second) {
        if (q.window_ticks && q.now_tick - tick >= *q.window_ticks) continue;
        sum += delta;
      }
    return sum;
  }
  if (std::holds_alternative<ProvenanceQuery>(fact)) {
    if (level < 2) throw CapabilityDenied("provenance facts need M2");
    const auto& q = std::get<ProvenanceQuery>(fact);
    auto it = state.provenance.find(q.event_id);
    if (it == state.provenance.end())
      throw UnknownFact("no provenance for event " + q.event_id);
    return it->second;
  }
  if (level < 2) throw CapabilityDenied("approval facts need M2");
  const auto& q = std::get<ApprovalQuery>(fact);
  auto it = state.approvals.find(q.trace_hash_hex);
  if (it == state.approvals.end()) return std::optional<ApprovalRecord>{};
  return std::optional<ApprovalRecord>{it->second};
}

}  // namespace certgate
