#include "certgate/policy.hpp"

#include <json.hpp>

#include <algorithm>

#include "certgate/errors.hpp"

namespace certgate {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::Monitor: return "Monitor";
    case LayerKind::Counter: return "Counter";
    case LayerKind::Temporal: return "Temporal";
    case LayerKind::InfoFlow: return "InfoFlow";
  }
  return "?";
}

static LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "Monitor") return LayerKind::Monitor;
  if (s == "Counter") return LayerKind::Counter;
  if (s == "Temporal") return LayerKind::Temporal;
  if (s == "InfoFlow") return LayerKind::InfoFlow;
  throw ParseError("unknown layer kind: " + s);
}

const char* to_string(TemporalPattern p) {
  switch (p) {
    case TemporalPattern::Precedence: return "Precedence";
    case TemporalPattern::AbsenceAfter: return "AbsenceAfter";
    case TemporalPattern::ResponseWithin: return "ResponseWithin";
  }
  return "?";
}

static TemporalPattern temporal_pattern_from_string(const std::string& s) {
  if (s == "Precedence") return TemporalPattern::Precedence;
  if (s == "AbsenceAfter") return TemporalPattern::AbsenceAfter;
  if (s == "ResponseWithin") return TemporalPattern::ResponseWithin;
  throw ParseError("unknown temporal pattern: " + s);
}

bool EventPredicate::matches(const TraceEvent& e) const {
  if (kind && *kind != e.kind) return false;
  if (principal && *principal != e.principal) return false;
  if (component && *component != e.component) return false;
  if (resource && e.resource != *resource) return false;
  if (data_class && e.data_class != *data_class) return false;
  if (purpose && e.purpose != *purpose) return false;
  for (const auto& [k, v] : param_equals) {
    auto it = e.params.find(k);
    if (it == e.params.end() || !(it->second == v)) return false;
  }
  return true;
}

bool EventPredicate::disjoint_with(const EventPredicate& o) const {
  auto differs = [](const auto& a, const auto& b) {
    return a && b && *a != *b;
  };
  if (differs(kind, o.kind)) return true;
  if (differs(principal, o.principal)) return true;
  if (differs(component, o.component)) return true;
  if (differs(resource, o.resource)) return true;
  if (differs(data_class, o.data_class)) return true;
  if (differs(purpose, o.purpose)) return true;
  for (const auto& [k, v] : param_equals) {
    auto it = o.param_equals.find(k);
    if (it != o.param_equals.end() && !(it->second == v)) return true;
  }
  return false;
}

bool EventPredicate::kind_only() const {
  return !principal && !component && !resource && !data_class && !purpose &&
         param_equals.empty();
}

namespace {

bool auth_field_ok(const std::string& row, const std::string& actual) {
  return row == "*" || row == actual;
}

LayerVerdict reject_at(const std::string& layer_id, const std::string& event_id,
                       std::string reason) {
  LayerVerdict v;
  v.layer_id = layer_id;
  v.accepted = false;
  v.violation = LayerViolation{event_id, std::move(reason)};
  return v;
}

LayerVerdict run_monitor(const PolicyLayer& layer, const std::vector<TraceEvent>& events) {
  const MonitorSpec& spec = layer.monitor;
  std::string cur = spec.initial;
  for (const auto& e : events) {
    const MonitorTransition* hit = nullptr;
    for (const auto& tr : spec.transitions) {
      if (tr.from != cur) continue;
      if (!tr.when.matches(e)) continue;
      if (hit) throw SpecError("nondeterministic monitor at runtime: " + layer.layer_id);
      hit = &tr;
    }
    if (hit) {
      cur = hit->to;
      continue;
    }
    auto d = spec.defaults.find(cur);
    StateDefault def = d == spec.defaults.end() ? StateDefault::SelfLoop : d->second;
    if (def == StateDefault::Reject)
      return reject_at(layer.layer_id, e.event_id,
                       "no transition from state '" + cur + "' (reject default)");
  }
  if (!spec.accepting.count(cur))
    return reject_at(layer.layer_id, "", "ended in non-accepting state '" + cur + "'");
  return LayerVerdict{layer.layer_id, true, std::nullopt};
}

LayerVerdict run_counter(const PolicyLayer& layer, const std::vector<TraceEvent>& events) {
  const CounterSpec& spec = layer.counter;
  // key: counter name + principal + resource
  std::map<std::tuple<std::string, std::string, std::string>,
           std::vector<std::pair<std::int64_t, std::int64_t>>>
      entries;
  for (const auto& e : events) {
    for (const auto& up : spec.updates) {
      if (!up.when.matches(e)) continue;
      auto def = std::find_if(spec.counters.begin(), spec.counters.end(),
                              [&](const CounterDef& c) { return c.name == up.counter; });
      if (def == spec.counters.end())
        throw SpecError("counter update references unknown counter: " + up.counter);
      std::int64_t delta = 0;
      if (up.const_delta) {
        delta = *up.const_delta;
      } else if (up.from_quantity) {
        auto q = e.quantity_deltas.find(*up.from_quantity);
        if (q != e.quantity_deltas.end()) delta = q->second;
      }
      auto key = std::make_tuple(def->name, e.principal, e.resource.value_or(""));
      auto& v = entries[key];
      // window is inclusive of the current tick: keep (now - tick) < window
      if (def->window_ticks)
        std::erase_if(v, [&](const auto& p) {
          return e.tick - p.first >= *def->window_ticks;
        });
      v.emplace_back(e.tick, delta);
      std::int64_t sum = 0;
      for (const auto& p : v) sum += p.second;
      if (sum > def->bound)
        return reject_at(layer.layer_id, e.event_id,
                         "counter '" + def->name + "' breached: " + std::to_string(sum) +
                             " > " + std::to_string(def->bound));
    }
  }
  return LayerVerdict{layer.layer_id, true, std::nullopt};
}

LayerVerdict run_temporal(const PolicyLayer& layer, const std::vector<TraceEvent>& events) {
  const TemporalSpec& spec = layer.temporal;
  switch (spec.pattern) {
    case TemporalPattern::Precedence: {
      bool a_seen = false;
      for (const auto& e : events) {
        if (spec.b.matches(e) && !a_seen)
          return reject_at(layer.layer_id, e.event_id, "required precedent event missing");
        if (spec.a.matches(e)) a_seen = true;
      }
      return LayerVerdict{layer.layer_id, true, std::nullopt};
    }
    case TemporalPattern::AbsenceAfter: {
      bool b_seen = false;
      for (const auto& e : events) {
        if (b_seen && spec.a.matches(e))
          return reject_at(layer.layer_id, e.event_id, "forbidden event after trigger");
        if (spec.b.matches(e)) b_seen = true;
      }
      return LayerVerdict{layer.layer_id, true, std::nullopt};
    }
    case TemporalPattern::ResponseWithin: {
      for (std::size_t i = 0; i < events.size(); ++i) {
        if (!spec.a.matches(events[i])) continue;
        bool discharged = false;
        for (std::size_t j = i + 1; j < events.size(); ++j) {
          if (events[j].tick - events[i].tick > spec.k) break;
          if (spec.b.matches(events[j])) {
            discharged = true;
            break;
          }
        }
        if (!discharged)
          return reject_at(layer.layer_id, events[i].event_id,
                           "obligation not discharged within " + std::to_string(spec.k) +
                               " ticks");
      }
      return LayerVerdict{layer.layer_id, true, std::nullopt};
    }
  }
  return LayerVerdict{layer.layer_id, true, std::nullopt};
}

LayerVerdict run_infoflow(const PolicyLayer& layer, const std::vector<TraceEvent>& events) {
  const InfoFlowSpec& spec = layer.infoflow;
  std::map<std::string, const TraceEvent*> by_id;
  for (const auto& e : events) {
    if (e.data_class) {
      bool allowed = false;
      for (const auto& row : spec.auth_table) {
        if (auth_field_ok(row.principal, e.principal) &&
            auth_field_ok(row.component, e.component) &&
            auth_field_ok(row.data_class, *e.data_class) &&
            auth_field_ok(row.purpose, e.purpose.value_or("*"))) {
          allowed = true;
          break;
        }
      }
      if (!allowed)
        return reject_at(layer.layer_id, e.event_id,
                         "access denied for (" + e.principal + "," + e.component + "," +
                             *e.data_class + "," + e.purpose.value_or("") + ")");
    }
    if (spec.purpose_binding && e.purpose) {
      for (const auto& r : e.evidence_refs) {
        auto it = by_id.find(r);
        if (it == by_id.end()) continue;
        const TraceEvent& src = *it->second;
        if (src.purpose && *src.purpose != *e.purpose)
          return reject_at(layer.layer_id, e.event_id,
                           "purpose binding violated: evidence '" + r +
                               "' retrieved under purpose '" + *src.purpose + "'");
      }
    }
    if (e.kind == EventKind::Release && e.data_class &&
        spec.release_constraints.count(*e.data_class))
      return reject_at(layer.layer_id, e.event_id,
                       "release of data class '" + *e.data_class + "' forbidden");
    by_id[e.event_id] = &e;
  }
  return LayerVerdict{layer.layer_id, true, std::nullopt};
}

}  // namespace

LayerVerdict evaluate_layer(const PolicyLayer& layer, const std::vector<TraceEvent>& events) {
  switch (layer.kind) {
    case LayerKind::Monitor: return run_monitor(layer, events);
    case LayerKind::Counter: return run_counter(layer, events);
    case LayerKind::Temporal: return run_temporal(layer, events);
    case LayerKind::InfoFlow: return run_infoflow(layer, events);
  }
  throw SpecError("unknown layer kind");
}

static PermissibilityVerdict evaluate_events(const PolicySystem& policy,
                                             const std::vector<TraceEvent>& events) {
  PermissibilityVerdict v;
  for (const auto& layer : policy.layers) {
    LayerVerdict lv = evaluate_layer(layer, events);
    v.permitted = v.permitted && lv.accepted;
    v.per_layer.push_back(std::move(lv));
  }
  return v;
}

PermissibilityVerdict evaluate(const PolicySystem& policy, const ProposedTrace& trace) {
  return evaluate_events(policy, trace.events);
}

PermissibilityVerdict evaluate(const PolicySystem& policy, const RealizedTrace& trace) {
  return evaluate_events(policy, trace.events);
}

PolicySystem strengthen(const PolicySystem& policy, const PolicyLayer& layer,
                        const std::string& new_version) {
  for (const auto& l : policy.layers)
    if (l.layer_id == layer.layer_id)
      throw DuplicateLayerId("layer_id already present: " + layer.layer_id);
  PolicySystem p = policy;
  p.layers.push_back(layer);
  p.version = new_version;
  return p;
}

void validate_policy(const PolicySystem& policy) {
  std::set<std::string> ids;
  for (const auto& layer : policy.layers) {
    if (layer.layer_id.empty()) throw ValidationError("layer_id nonempty");
    if (!ids.insert(layer.layer_id).second)
      throw ValidationError("layer_id unique: " + layer.layer_id);
    if (layer.kind == LayerKind::Monitor) {
      const MonitorSpec& m = layer.monitor;
      std::set<std::string> states(m.states.begin(), m.states.end());
      if (!states.count(m.initial))
        throw ValidationError(layer.layer_id + ": initial state not in Q");
      for (const auto& f : m.accepting)
        if (!states.count(f))
          throw ValidationError(layer.layer_id + ": accepting state not in Q: " + f);
      for (const auto& tr : m.transitions)
        if (!states.count(tr.from) || !states.count(tr.to))
          throw ValidationError(layer.layer_id + ": transition endpoint not in Q");
      for (const auto& s : m.states)
        if (!m.defaults.count(s))
          throw ValidationError(layer.layer_id + ": missing default for state '" + s + "'");
      // determinism: transitions leaving the same state must be pairwise disjoint
      for (std::size_t i = 0; i < m.transitions.size(); ++i)
        for (std::size_t j = i + 1; j < m.transitions.size(); ++j) {
          if (m.transitions[i].from != m.transitions[j].from) continue;
          if (!m.transitions[i].when.disjoint_with(m.transitions[j].when))
            throw NondeterministicMonitor(layer.layer_id +
                                          ": overlapping predicates from state '" +
                                          m.transitions[i].from + "'");
        }
    }
    if (layer.kind == LayerKind::Counter) {
      for (const auto& c : layer.counter.counters) {
        if (c.bound < 0)
          throw ValidationError(layer.layer_id + ": counter bound must be non-negative");
        if (c.window_ticks && *c.window_ticks <= 0)
          throw ValidationError(layer.layer_id + ": window_ticks must be positive");
      }
      for (const auto& up : layer.counter.updates) {
        if (!up.const_delta && !up.from_quantity)
          throw ValidationError(layer.layer_id + ": update needs const or from_quantity delta");
        bool found = std::any_of(layer.counter.counters.begin(), layer.counter.counters.end(),
                                 [&](const CounterDef& c) { return c.name == up.counter; });
        if (!found)
          throw ValidationError(layer.layer_id + ": update references unknown counter '" +
                                up.counter + "'");
      }
    }
    if (layer.kind == LayerKind::Temporal && layer.temporal.k < 0)
      throw ValidationError(layer.layer_id + ": k must be non-negative");
  }
}

// ---- serialization -------------------------------------------------------

namespace {

ordered_json scalar_json(const Scalar& s) {
  if (std::holds_alternative<std::string>(s)) return std::get<std::string>(s);
  if (std::holds_alternative<std::int64_t>(s)) return std::get<std::int64_t>(s);
  return ordered_json{{"bp", std::get<ScaledDecimal>(s).bp}};
}

Scalar scalar_from(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_object() && j.contains("bp")) return ScaledDecimal{j["bp"].get<std::int64_t>()};
  throw ParseError("unsupported scalar in predicate");
}

ordered_json predicate_to_json(const EventPredicate& p) {
  ordered_json j = ordered_json::object();
  if (p.kind) j["kind"] = to_string(*p.kind);
  if (p.principal) j["principal"] = *p.principal;
  if (p.component) j["component"] = *p.component;
  if (p.resource) j["resource"] = *p.resource;
  if (p.data_class) j["data_class"] = *p.data_class;
  if (p.purpose) j["purpose"] = *p.purpose;
  if (!p.param_equals.empty()) {
    ordered_json pe = ordered_json::object();
    for (const auto& [k, v] : p.param_equals) pe[k] = scalar_json(v);
    j["params"] = pe;
  }
  return j;
}

EventPredicate predicate_from_json(const json& j) {
  EventPredicate p;
  if (j.contains("kind")) p.kind = event_kind_from_string(j["kind"].get<std::string>());
  if (j.contains("principal")) p.principal = j["principal"].get<std::string>();
  if (j.contains("component")) p.component = j["component"].get<std::string>();
  if (j.contains("resource")) p.resource = j["resource"].get<std::string>();
  if (j.contains("data_class")) p.data_class = j["data_class"].get<std::string>();
  if (j.contains("purpose")) p.purpose = j["purpose"].get<std::string>();
  if (j.contains("params"))
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
      p.param_equals[it.key()] = scalar_from(it.value());
  return p;
}

ordered_json layer_to_json(const PolicyLayer& layer) {
  ordered_json j;
  j["layer_id"] = layer.layer_id;
  j["kind"] = to_string(layer.kind);
  j["tier"] = to_string(layer.tier);
  j["description"] = layer.description;
  ordered_json spec = ordered_json::object();
  switch (layer.kind) {
    case LayerKind::Monitor: {
      const auto& m = layer.monitor;
      spec["states"] = m.states;
      spec["initial"] = m.initial;
      spec["accepting"] = std::vector<std::string>(m.accepting.begin(), m.accepting.end());
      ordered_json trs = ordered_json::array();
      for (const auto& tr : m.transitions)
        trs.push_back(ordered_json{
            {"from", tr.from}, {"when", predicate_to_json(tr.when)}, {"to", tr.to}});
      spec["transitions"] = trs;
      ordered_json defs = ordered_json::object();
      for (const auto& [s, d] : m.defaults)
        defs[s] = d == StateDefault::SelfLoop ? "SelfLoop" : "Reject";
      spec["defaults"] = defs;
      break;
    }
    case LayerKind::Counter: {
      ordered_json cs = ordered_json::array();
      for (const auto& c : layer.counter.counters) {
        ordered_json cj{{"name", c.name}, {"bound", c.bound}};
        cj["window_ticks"] =
            c.window_ticks ? ordered_json(*c.window_ticks) : ordered_json(nullptr);
        cs.push_back(cj);
      }
      spec["counters"] = cs;
      ordered_json us = ordered_json::array();
      for (const auto& u : layer.counter.updates) {
        ordered_json uj{{"when", predicate_to_json(u.when)}, {"counter", u.counter}};
        if (u.const_delta) uj["delta"] = ordered_json{{"const", *u.const_delta}};
        else uj["delta"] = ordered_json{{"from_quantity", *u.from_quantity}};
        us.push_back(uj);
      }
      spec["updates"] = us;
      break;
    }
    case LayerKind::Temporal: {
      spec["pattern"] = to_string(layer.temporal.pattern);
      spec["a"] = predicate_to_json(layer.temporal.a);
      spec["b"] = predicate_to_json(layer.temporal.b);
      if (layer.temporal.pattern == TemporalPattern::ResponseWithin)
        spec["k"] = layer.temporal.k;
      break;
    }
    case LayerKind::InfoFlow: {
      ordered_json rows = ordered_json::array();
      for (const auto& r : layer.infoflow.auth_table)
        rows.push_back(ordered_json{{"principal", r.principal},
                                    {"component", r.component},
                                    {"data_class", r.data_class},
                                    {"purpose", r.purpose}});
      spec["auth_table"] = rows;
      spec["purpose_binding"] = layer.infoflow.purpose_binding;
      spec["release_constraints"] = std::vector<std::string>(
          layer.infoflow.release_constraints.begin(),
          layer.infoflow.release_constraints.end());
      break;
    }
  }
  j["spec"] = spec;
  return j;
}

PolicyLayer layer_from_json(const json& j) {
  PolicyLayer layer;
  layer.layer_id = j.at("layer_id").get<std::string>();
  layer.kind = layer_kind_from_string(j.at("kind").get<std::string>());
  layer.tier = tier_from_string(j.value("tier", "C0"));
  layer.description = j.value("description", std::string{});
  const json& spec = j.at("spec");
  switch (layer.kind) {
    case LayerKind::Monitor: {
      MonitorSpec m;
      m.states = spec.at("states").get<std::vector<std::string>>();
      m.initial = spec.at("initial").get<std::string>();
      for (const auto& f : spec.at("accepting")) m.accepting.insert(f.get<std::string>());
      for (const auto& tr : spec.at("transitions"))
        m.transitions.push_back(MonitorTransition{tr.at("from").get<std::string>(),
                                                  predicate_from_json(tr.at("when")),
                                                  tr.at("to").get<std::string>()});
      for (auto it = spec.at("defaults").begin(); it != spec.at("defaults").end(); ++it) {
        std::string d = it.value().get<std::string>();
        if (d != "SelfLoop" && d != "Reject")
          throw ParseError("unknown state default: " + d);
        m.defaults[it.key()] = d == "SelfLoop" ? StateDefault::SelfLoop : StateDefault::Reject;
      }
      layer.monitor = std::move(m);
      break;
    }
    case LayerKind::Counter: {
      CounterSpec c;
      for (const auto& cj : spec.at("counters")) {
        CounterDef d;
        d.name = cj.at("name").get<std::string>();
        d.bound = cj.at("bound").get<std::int64_t>();
        if (cj.contains("window_ticks") && !cj["window_ticks"].is_null())
          d.window_ticks = cj["window_ticks"].get<std::int64_t>();
        c.counters.push_back(d);
      }
      for (const auto& uj : spec.at("updates")) {
        CounterUpdate u;
        u.when = predicate_from_json(uj.at("when"));
        u.counter = uj.at("counter").get<std::string>();
        const json& dj = uj.at("delta");
        if (dj.contains("const")) u.const_delta = dj["const"].get<std::int64_t>();
        if (dj.contains("from_quantity"))
          u.from_quantity = dj["from_quantity"].get<std::string>();
        c.updates.push_back(u);
      }
      layer.counter = std::move(c);
      break;
    }
    case LayerKind::Temporal: {
      TemporalSpec t;
      t.pattern = temporal_pattern_from_string(spec.at("pattern").get<std::string>());
      t.a = predicate_from_json(spec.at("a"));
      t.b = predicate_from_json(spec.at("b"));
      t.k = spec.value("k", std::int64_t{0});
      layer.temporal = std::move(t);
      break;
    }
    case LayerKind::InfoFlow: {
      InfoFlowSpec f;
      for (const auto& rj : spec.at("auth_table"))
        f.auth_table.push_back(AuthTuple{rj.value("principal", "*"), rj.value("component", "*"),
                                         rj.value("data_class", "*"), rj.value("purpose", "*")});
      f.purpose_binding = spec.value("purpose_binding", false);
      if (spec.contains("release_constraints"))
        for (const auto& d : spec["release_constraints"])
          f.release_constraints.insert(d.get<std::string>());
      layer.infoflow = std::move(f);
      break;
    }
  }
  return layer;
}

}  // namespace

PolicySystem parse_policy(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed policy file: ") + ex.what());
  }
  PolicySystem p;
  try {
    p.version = j.at("version").get<std::string>();
    p.source = j.value("source", std::string{});
    p.effective_from = j.value("effective_from", std::int64_t{0});
    for (const auto& lj : j.at("layers")) p.layers.push_back(layer_from_json(lj));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("policy field error: ") + ex.what());
  }
  validate_policy(p);
  return p;
}

std::string serialize_policy(const PolicySystem& p) {
  ordered_json j;
  j["version"] = p.version;
  j["source"] = p.source;
  j["effective_from"] = p.effective_from;
  ordered_json layers = ordered_json::array();
  for (const auto& l : p.layers) layers.push_back(layer_to_json(l));
  j["layers"] = layers;
  return j.dump();
}

std::string serialize_verdict(const PermissibilityVerdict& v) {
  ordered_json j;
  j["permitted"] = v.permitted;
  ordered_json per = ordered_json::array();
  for (const auto& lv : v.per_layer) {
    ordered_json lj{{"layer_id", lv.layer_id}, {"accepted", lv.accepted}};
    if (lv.violation)
      lj["violation"] = ordered_json{{"event_id", lv.violation->event_id},
                                     {"reason", lv.violation->reason}};
    else
      lj["violation"] = nullptr;
    per.push_back(lj);
  }
  j["per_layer"] = per;
  return j.dump();
}

}  // namespace certgate
