#include "certgate/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "certgate/errors.hpp"

namespace certgate {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Query: return "Query";
    case EventKind::Retrieval: return "Retrieval";
    case EventKind::ToolCall: return "ToolCall";
    case EventKind::Computation: return "Computation";
    case EventKind::Claim: return "Claim";
    case EventKind::Approval: return "Approval";
    case EventKind::MemoryWrite: return "MemoryWrite";
    case EventKind::Release: return "Release";
    case EventKind::ExecutionCall: return "ExecutionCall";
  }
  return "?";
}

EventKind event_kind_from_string(const std::string& s) {
  static const std::map<std::string, EventKind> m = {
      {"Query", EventKind::Query},
      {"Retrieval", EventKind::Retrieval},
      {"ToolCall", EventKind::ToolCall},
      {"Computation", EventKind::Computation},
      {"Claim", EventKind::Claim},
      {"Approval", EventKind::Approval},
      {"MemoryWrite", EventKind::MemoryWrite},
      {"Release", EventKind::Release},
      {"ExecutionCall", EventKind::ExecutionCall},
  };
  auto it = m.find(s);
  if (it == m.end()) throw ParseError("unknown event kind: " + s);
  return it->second;
}

const char* to_string(Tier t) {
  switch (t) {
    case Tier::C0: return "C0";
    case Tier::C1: return "C1";
    case Tier::C2: return "C2";
    case Tier::C3: return "C3";
    case Tier::C4: return "C4";
    case Tier::C5: return "C5";
  }
  return "?";
}

Tier tier_from_string(const std::string& s) {
  if (s.size() == 2 && s[0] == 'C' && s[1] >= '0' && s[1] <= '5')
    return static_cast<Tier>(s[1] - '0');
  throw ParseError("unknown tier: " + s);
}

const char* to_string(ExecutionOutcome o) {
  switch (o) {
    case ExecutionOutcome::Completed: return "Completed";
    case ExecutionOutcome::Halted: return "Halted";
    case ExecutionOutcome::RolledBack: return "RolledBack";
    case ExecutionOutcome::Escalated: return "Escalated";
  }
  return "?";
}

std::string scalar_to_string(const Scalar& s) {
  if (std::holds_alternative<std::string>(s)) return std::get<std::string>(s);
  if (std::holds_alternative<std::int64_t>(s))
    return std::to_string(std::get<std::int64_t>(s));
  return std::to_string(std::get<ScaledDecimal>(s).bp) + "bp";
}

SlotConstraint SlotConstraint::parse(const std::string& text) {
  SlotConstraint c;
  if (text == "any") {
    c.kind = Kind::Any;
    return c;
  }
  if (text.rfind("eq:", 0) == 0) {
    c.kind = Kind::Eq;
    c.lo = c.hi = std::stoll(text.substr(3));
    return c;
  }
  if (text.rfind("range:", 0) == 0) {
    auto rest = text.substr(6);
    auto sep = rest.find(':');
    if (sep == std::string::npos) throw ParseError("bad range constraint: " + text);
    c.kind = Kind::Range;
    c.lo = std::stoll(rest.substr(0, sep));
    c.hi = std::stoll(rest.substr(sep + 1));
    if (c.lo > c.hi) throw ParseError("empty range constraint: " + text);
    return c;
  }
  throw ParseError("unknown slot constraint: " + text);
}

bool SlotConstraint::satisfied_by(std::int64_t value) const {
  switch (kind) {
    case Kind::Any: return true;
    case Kind::Eq: return value == lo;
    case Kind::Range: return value >= lo && value <= hi;
  }
  return false;
}

namespace {

ordered_json scalar_to_json(const Scalar& s) {
  if (std::holds_alternative<std::string>(s)) return std::get<std::string>(s);
  if (std::holds_alternative<std::int64_t>(s)) return std::get<std::int64_t>(s);
  return ordered_json{{"bp", std::get<ScaledDecimal>(s).bp}};
}

Scalar scalar_from_json(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_object() && j.contains("bp") && j["bp"].is_number_integer())
    return ScaledDecimal{j["bp"].get<std::int64_t>()};
  throw ParseError("unsupported scalar at " + where);
}

ordered_json event_to_json(const TraceEvent& e) {
  ordered_json j;
  j["event_id"] = e.event_id;
  j["tick"] = e.tick;
  j["kind"] = to_string(e.kind);
  j["principal"] = e.principal;
  j["component"] = e.component;
  j["resource"] = e.resource ? ordered_json(*e.resource) : ordered_json(nullptr);
  j["data_class"] = e.data_class ? ordered_json(*e.data_class) : ordered_json(nullptr);
  j["purpose"] = e.purpose ? ordered_json(*e.purpose) : ordered_json(nullptr);
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : e.params) params[k] = scalar_to_json(v);
  j["params"] = params;
  ordered_json qd = ordered_json::object();
  for (const auto& [k, v] : e.quantity_deltas) qd[k] = v;
  j["quantity_deltas"] = qd;
  j["evidence_refs"] = e.evidence_refs;
  j["observation_slot"] = e.observation_slot;
  j["irreversible"] = e.irreversible;
  return j;
}

TraceEvent event_from_json(const json& j) {
  TraceEvent e;
  e.event_id = j.at("event_id").get<std::string>();
  e.tick = j.at("tick").get<std::int64_t>();
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.principal = j.value("principal", std::string{});
  e.component = j.value("component", std::string{});
  if (j.contains("resource") && !j["resource"].is_null())
    e.resource = j["resource"].get<std::string>();
  if (j.contains("data_class") && !j["data_class"].is_null())
    e.data_class = j["data_class"].get<std::string>();
  if (j.contains("purpose") && !j["purpose"].is_null())
    e.purpose = j["purpose"].get<std::string>();
  if (j.contains("params"))
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
      e.params[it.key()] = scalar_from_json(it.value(), e.event_id + ".params." + it.key());
  if (j.contains("quantity_deltas"))
    for (auto it = j["quantity_deltas"].begin(); it != j["quantity_deltas"].end(); ++it)
      e.quantity_deltas[it.key()] = it.value().get<std::int64_t>();
  if (j.contains("evidence_refs"))
    e.evidence_refs = j["evidence_refs"].get<std::vector<std::string>>();
  e.observation_slot = j.value("observation_slot", false);
  e.irreversible = j.value("irreversible", false);
  return e;
}

}  // namespace

void validate_trace(const ProposedTrace& t) {
  if (t.trace_id.empty()) throw ValidationError("trace_id nonempty");
  if (t.events.empty()) throw ValidationError("events nonempty");
  std::set<std::string> ids;
  std::int64_t prev_tick = t.events.front().tick;
  std::set<std::string> seen;
  for (const auto& e : t.events) {
    if (e.event_id.empty()) throw ValidationError("event_id nonempty");
    if (!ids.insert(e.event_id).second)
      throw ValidationError("event_id unique: " + e.event_id);
    if (e.tick < prev_tick) throw ValidationError("ticks non-decreasing");
    prev_tick = e.tick;
    if (e.tick < 0) throw ValidationError("tick non-negative");
    for (const auto& r : e.evidence_refs)
      if (!seen.count(r))
        throw ValidationError("evidence_refs reference earlier events: " + r);
    if (e.observation_slot) {
      auto it = e.params.find("constraint");
      if (it == e.params.end() || !std::holds_alternative<std::string>(it->second))
        throw ValidationError("observation_slot requires params.constraint");
      SlotConstraint::parse(std::get<std::string>(it->second));
      if (e.params.count("value"))
        throw ValidationError("observation_slot carries a constraint, not a fixed value");
    }
    seen.insert(e.event_id);
  }
}

ProposedTrace parse_trace(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed trace file: ") + ex.what());
  }
  ProposedTrace t;
  try {
    t.trace_id = j.at("trace_id").get<std::string>();
    t.proposer_id = j.at("proposer_id").get<std::string>();
    t.task = j.value("task", std::string{});
    t.declared_tier = tier_from_string(j.at("declared_tier").get<std::string>());
    t.requested_policy_version = j.at("requested_policy_version").get<std::string>();
    if (j.contains("execution_conditions"))
      for (auto it = j["execution_conditions"].begin();
           it != j["execution_conditions"].end(); ++it)
        t.execution_conditions[it.key()] = it.value().get<std::int64_t>();
    for (const auto& je : j.at("events")) t.events.push_back(event_from_json(je));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("trace field error: ") + ex.what());
  }
  validate_trace(t);
  return t;
}

std::string canonical_serialize(const ProposedTrace& t) {
  ordered_json j;
  j["trace_id"] = t.trace_id;
  j["proposer_id"] = t.proposer_id;
  j["task"] = t.task;
  j["declared_tier"] = to_string(t.declared_tier);
  j["requested_policy_version"] = t.requested_policy_version;
  ordered_json ec = ordered_json::object();
  for (const auto& [k, v] : t.execution_conditions) ec[k] = v;
  j["execution_conditions"] = ec;
  ordered_json evs = ordered_json::array();
  for (const auto& e : t.events) evs.push_back(event_to_json(e));
  j["events"] = evs;
  return j.dump();
}

std::string serialize_trace(const ProposedTrace& t) { return canonical_serialize(t); }

Digest canonical_hash(const ProposedTrace& t) {
  return sha256(canonical_serialize(t));
}

ProposedTrace prefix(const ProposedTrace& t, std::size_t n) {
  if (n > t.events.size()) throw OutOfRange("prefix length exceeds event count");
  ProposedTrace p = t;
  p.events.assign(t.events.begin(), t.events.begin() + static_cast<std::ptrdiff_t>(n));
  return p;
}

}  // namespace certgate
