#include "certgate/executor.hpp"

#include <json.hpp>

#include <algorithm>

#include "certgate/errors.hpp"

namespace certgate {

using nlohmann::json;
using nlohmann::ordered_json;

Environment parse_environment(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed environment file: ") + ex.what());
  }
  Environment env;
  if (j.contains("tool_behaviors"))
    for (auto it = j["tool_behaviors"].begin(); it != j["tool_behaviors"].end(); ++it)
      env.tool_behaviors[it.key()] = it.value().get<std::int64_t>();
  if (j.contains("deviation_injections"))
    for (const auto& dj : j["deviation_injections"])
      env.deviation_injections.push_back(DeviationInjection{
          dj.at("event_id").get<std::string>(), dj.at("field").get<std::string>(),
          dj.at("substituted").get<std::string>()});
  env.clock = j.value("clock", std::int64_t{0});
  return env;
}

std::string serialize_environment(const Environment& env) {
  ordered_json j;
  ordered_json tb = ordered_json::object();
  for (const auto& [k, v] : env.tool_behaviors) tb[k] = v;
  j["tool_behaviors"] = tb;
  ordered_json inj = ordered_json::array();
  for (const auto& d : env.deviation_injections)
    inj.push_back(ordered_json{
        {"event_id", d.event_id}, {"field", d.field}, {"substituted", d.substituted}});
  j["deviation_injections"] = inj;
  j["clock"] = env.clock;
  return j.dump();
}

namespace {

void apply_injection(TraceEvent& e, const DeviationInjection& inj) {
  if (inj.field == "principal") {
    e.principal = inj.substituted;
  } else if (inj.field == "component") {
    e.component = inj.substituted;
  } else if (inj.field == "resource") {
    e.resource = inj.substituted;
  } else if (inj.field == "data_class") {
    e.data_class = inj.substituted;
  } else if (inj.field == "purpose") {
    e.purpose = inj.substituted;
  } else if (inj.field.rfind("param:", 0) == 0) {
    std::string name = inj.field.substr(6);
    auto it = e.params.find(name);
    if (it != e.params.end() && std::holds_alternative<std::int64_t>(it->second))
      e.params[name] = static_cast<std::int64_t>(std::stoll(inj.substituted));
    else if (it != e.params.end() && std::holds_alternative<ScaledDecimal>(it->second))
      e.params[name] = ScaledDecimal{std::stoll(inj.substituted)};
    else
      e.params[name] = inj.substituted;
  } else if (inj.field.rfind("quantity:", 0) == 0) {
    e.quantity_deltas[inj.field.substr(9)] = std::stoll(inj.substituted);
  }
}

// Deviations of one realized event against its proposed counterpart.
// Observation slots are checked against their declared constraint; every
// other field must match exactly.
std::vector<Deviation> event_deviations(const TraceEvent& proposed, const TraceEvent& realized) {
  std::vector<Deviation> devs;
  auto add = [&](const std::string& field, std::string expected, std::string observed) {
    devs.push_back(Deviation{proposed.event_id, field, std::move(expected), std::move(observed)});
  };
  if (proposed.kind != realized.kind)
    add("kind", to_string(proposed.kind), to_string(realized.kind));
  if (proposed.tick != realized.tick)
    add("tick", std::to_string(proposed.tick), std::to_string(realized.tick));
  if (proposed.principal != realized.principal)
    add("principal", proposed.principal, realized.principal);
  if (proposed.component != realized.component)
    add("component", proposed.component, realized.component);
  if (proposed.resource != realized.resource)
    add("resource", proposed.resource.value_or("<null>"), realized.resource.value_or("<null>"));
  if (proposed.data_class != realized.data_class)
    add("data_class", proposed.data_class.value_or("<null>"),
        realized.data_class.value_or("<null>"));
  if (proposed.purpose != realized.purpose)
    add("purpose", proposed.purpose.value_or("<null>"), realized.purpose.value_or("<null>"));
  if (proposed.quantity_deltas != realized.quantity_deltas)
    add("quantity_deltas", "<proposed map>", "<observed map>");
  if (proposed.evidence_refs != realized.evidence_refs)
    add("evidence_refs", "<proposed refs>", "<observed refs>");
  if (proposed.irreversible != realized.irreversible)
    add("irreversible", proposed.irreversible ? "true" : "false",
        realized.irreversible ? "true" : "false");

  if (proposed.observation_slot) {
    SlotConstraint c = SlotConstraint::parse(
        std::get<std::string>(proposed.params.at("constraint")));
    auto v = realized.params.find("value");
    std::optional<std::int64_t> value;
    if (v != realized.params.end()) {
      if (std::holds_alternative<std::int64_t>(v->second))
        value = std::get<std::int64_t>(v->second);
      else if (std::holds_alternative<ScaledDecimal>(v->second))
        value = std::get<ScaledDecimal>(v->second).bp;
    }
    if (!value) {
      add("param:value", "value satisfying declared constraint", "<missing>");
    } else if (!c.satisfied_by(*value)) {
      add("param:value",
          "value satisfying '" + std::get<std::string>(proposed.params.at("constraint")) + "'",
          std::to_string(*value));
    }
    // remaining params must match the proposal exactly
    for (const auto& [k, pv] : proposed.params) {
      auto it = realized.params.find(k);
      if (it == realized.params.end() || !(it->second == pv))
        add("param:" + k, scalar_to_string(pv),
            it == realized.params.end() ? "<missing>" : scalar_to_string(it->second));
    }
  } else if (proposed.params != realized.params) {
    for (const auto& [k, pv] : proposed.params) {
      auto it = realized.params.find(k);
      if (it == realized.params.end() || !(it->second == pv))
        add("param:" + k, scalar_to_string(pv),
            it == realized.params.end() ? "<missing>" : scalar_to_string(it->second));
    }
    for (const auto& [k, rv] : realized.params)
      if (!proposed.params.count(k)) add("param:" + k, "<absent>", scalar_to_string(rv));
  }
  return devs;
}

std::string deviations_json(const std::vector<Deviation>& devs) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : devs)
    arr.push_back(ordered_json{{"event_id", d.event_id},
                               {"field", d.field},
                               {"expected", d.expected},
                               {"observed", d.observed}});
  return arr.dump();
}

}  // namespace

ExecutionResult execute(const ProposedTrace& trace, const Certificate& cert,
                        const PolicySystem& policy, Environment& env, Ledger& ledger,
                        std::string_view mac_key) {
  CheckDetail check = check_certificate_detailed(cert, trace, policy, mac_key);
  if (!check.ok) {
    ordered_json rec;
    rec["reason"] = "no valid certificate";
    rec["failures"] = check.failures;
    ledger.append(LedgerBody{canonical_hash(trace), rec.dump(), "Refused", policy.version,
                             policy.source, policy.effective_from, env.clock});
    throw NoCertificate("execution refused: certificate check failed");
  }

  std::int64_t valid_until = cert.issued_tick + kDefaultCertificateWindow;
  if (auto it = trace.execution_conditions.find("valid_until");
      it != trace.execution_conditions.end())
    valid_until = it->second;
  if (env.clock > valid_until) {
    ordered_json rec;
    rec["reason"] = "certificate validity window expired";
    rec["valid_until"] = valid_until;
    rec["clock"] = env.clock;
    ledger.append(LedgerBody{canonical_hash(trace), rec.dump(), "Refused", policy.version,
                             policy.source, policy.effective_from, env.clock});
    throw StaleCertificate("certificate window expired at tick " +
                           std::to_string(valid_until));
  }

  RealizedTrace realized;
  realized.trace_id = trace.trace_id;
  ExecutionResult result;
  bool irreversible_realized = false;
  ExecutionOutcome outcome = ExecutionOutcome::Completed;

  for (const auto& proposed_event : trace.events) {
    TraceEvent actual = proposed_event;
    if (actual.observation_slot) {
      std::int64_t v = 0;
      if (auto it = env.tool_behaviors.find(actual.event_id); it != env.tool_behaviors.end())
        v = it->second;
      actual.params["value"] = v;
    }
    for (const auto& inj : env.deviation_injections)
      if (inj.event_id == actual.event_id) apply_injection(actual, inj);

    std::vector<Deviation> devs = event_deviations(proposed_event, actual);
    if (!devs.empty()) {
      for (auto& d : devs) realized.deviation_log.push_back(std::move(d));
      if (!irreversible_realized) {
        outcome = ExecutionOutcome::Halted;
        result.halted_before = proposed_event.event_id;
      } else {
        outcome = ExecutionOutcome::RolledBack;
        result.halted_before = proposed_event.event_id;
        // Rollback is simulated: compensating records go to the ledger,
        // one per realized irreversible event.
        for (const auto& done : realized.events)
          if (done.irreversible) {
            ordered_json rec;
            rec["compensates"] = done.event_id;
            rec["trace_id"] = trace.trace_id;
            ledger.append(LedgerBody{canonical_hash(trace), rec.dump(), "Compensation",
                                     policy.version, policy.source, policy.effective_from,
                                     env.clock});
          }
      }
      break;  // the deviant event is never realized
    }
    realized.events.push_back(actual);
    if (actual.irreversible) irreversible_realized = true;
    env.clock = std::max(env.clock, actual.tick);
  }

  realized.outcome = outcome;
  result.realized = realized;

  ordered_json rec;
  rec["execution_outcome"] = to_string(outcome);
  rec["realized_events"] = realized.events.size();
  rec["deviations"] = ordered_json::parse(deviations_json(realized.deviation_log));
  if (result.halted_before) rec["halted_before"] = *result.halted_before;
  const LedgerEntry& entry =
      ledger.append(LedgerBody{canonical_hash(trace), rec.dump(), "Executed", policy.version,
                               policy.source, policy.effective_from, env.clock});
  result.ledger_seq = entry.seq;
  return result;
}

ConformanceResult conform(const RealizedTrace& realized, const ProposedTrace& proposed) {
  if (realized.trace_id != proposed.trace_id)
    throw TraceMismatch("realized trace '" + realized.trace_id +
                        "' does not reference proposal '" + proposed.trace_id + "'");
  ConformanceResult r;
  std::size_t n = std::min(realized.events.size(), proposed.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto devs = event_deviations(proposed.events[i], realized.events[i]);
    for (auto& d : devs) r.deviations.push_back(std::move(d));
  }
  for (std::size_t i = n; i < proposed.events.size(); ++i)
    r.deviations.push_back(
        Deviation{proposed.events[i].event_id, "event", "present", "missing event"});
  for (std::size_t i = n; i < realized.events.size(); ++i)
    r.deviations.push_back(
        Deviation{realized.events[i].event_id, "event", "absent", "extra event"});
  r.conforms = r.deviations.empty();
  return r;
}

}  // namespace certgate
