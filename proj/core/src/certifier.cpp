#include "certgate/certifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

#include "certgate/errors.hpp"
#include "certgate/ledger.hpp"

namespace certgate {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(ComponentType c) {
  switch (c) {
    case ComponentType::Id: return "Id";
    case ComponentType::Auth: return "Auth";
    case ComponentType::Source: return "Source";
    case ComponentType::Policy: return "Policy";
    case ComponentType::Risk: return "Risk";
    case ComponentType::Compute: return "Compute";
    case ComponentType::Privacy: return "Privacy";
    case ComponentType::Human: return "Human";
    case ComponentType::Lineage: return "Lineage";
  }
  return "?";
}

ComponentType component_type_from_string(const std::string& s) {
  static const std::map<std::string, ComponentType> m = {
      {"Id", ComponentType::Id},           {"Auth", ComponentType::Auth},
      {"Source", ComponentType::Source},   {"Policy", ComponentType::Policy},
      {"Risk", ComponentType::Risk},       {"Compute", ComponentType::Compute},
      {"Privacy", ComponentType::Privacy}, {"Human", ComponentType::Human},
      {"Lineage", ComponentType::Lineage},
  };
  auto it = m.find(s);
  if (it == m.end()) throw ParseError("unknown component type: " + s);
  return it->second;
}

const char* to_string(ObservationMask m) {
  switch (m) {
    case ObservationMask::FullTrace: return "FullTrace";
    case ObservationMask::FinalEventOnly: return "FinalEventOnly";
    case ObservationMask::EventKindsOnly: return "EventKindsOnly";
  }
  return "?";
}

ObservationMask observation_mask_from_string(const std::string& s) {
  if (s == "FullTrace") return ObservationMask::FullTrace;
  if (s == "FinalEventOnly") return ObservationMask::FinalEventOnly;
  if (s == "EventKindsOnly") return ObservationMask::EventKindsOnly;
  throw ParseError("unknown observation mask: " + s);
}

const char* to_string(Verdict::Outcome o) {
  switch (o) {
    case Verdict::Outcome::Certified: return "Certified";
    case Verdict::Outcome::Rejected: return "Rejected";
    case Verdict::Outcome::Escalate: return "Escalate";
  }
  return "?";
}

// ---- exact expression replay ---------------------------------------------

namespace {

struct ExprParser {
  const std::string& s;
  std::size_t pos = 0;
  const ProposedTrace& trace;
  std::size_t upto;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& why) {
    throw ParseError("expression error at offset " + std::to_string(pos) + ": " + why);
  }

  std::int64_t parse_expr() {
    std::int64_t v = parse_term();
    for (;;) {
      skip();
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        char op = s[pos++];
        std::int64_t r = parse_term();
        v = op == '+' ? v + r : v - r;
      } else {
        return v;
      }
    }
  }

  std::int64_t parse_term() {
    std::int64_t v = parse_factor();
    for (;;) {
      skip();
      if (pos < s.size() && (s[pos] == '*' || s[pos] == '/')) {
        char op = s[pos++];
        std::int64_t r = parse_factor();
        if (op == '*') {
          v = v * r;
        } else {
          if (r == 0) fail("division by zero");
          if (v % r != 0) fail("non-integral quotient");
          v = v / r;
        }
      } else {
        return v;
      }
    }
  }

  std::int64_t parse_factor() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    if (s[pos] == '(') {
      ++pos;
      std::int64_t v = parse_expr();
      skip();
      if (pos >= s.size() || s[pos] != ')') fail("missing ')'");
      ++pos;
      return v;
    }
    if (s[pos] == '-') {
      ++pos;
      return -parse_factor();
    }
    if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      return std::stoll(s.substr(start, pos - start));
    }
    // reference: ev.<event_id>.<param>
    if (s.compare(pos, 3, "ev.") == 0) {
      pos += 3;
      std::size_t start = pos;
      while (pos < s.size() && s[pos] != '.') ++pos;
      if (pos >= s.size()) fail("reference missing param");
      std::string event_id = s.substr(start, pos - start);
      ++pos;
      start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string param = s.substr(start, pos - start);
      for (std::size_t i = 0; i < upto; ++i) {
        const TraceEvent& e = trace.events[i];
        if (e.event_id != event_id) continue;
        auto it = e.params.find(param);
        if (it == e.params.end()) fail("param not found: " + event_id + "." + param);
        if (std::holds_alternative<std::int64_t>(it->second))
          return std::get<std::int64_t>(it->second);
        if (std::holds_alternative<ScaledDecimal>(it->second))
          return std::get<ScaledDecimal>(it->second).bp;
        fail("non-numeric param: " + event_id + "." + param);
      }
      fail("reference to unknown earlier event: " + event_id);
    }
    fail("unexpected character");
  }
};

}  // namespace

std::int64_t replay_expression(const std::string& expr, const ProposedTrace& trace,
                               std::size_t upto_index) {
  ExprParser p{expr, 0, trace, upto_index};
  std::int64_t v = p.parse_expr();
  p.skip();
  if (p.pos != expr.size()) p.fail("trailing input");
  return v;
}

// ---- certificate serialization and MAC -----------------------------------

namespace {

ordered_json component_to_json(const CertificateComponent& c) {
  ordered_json j;
  j["component"] = to_string(c.component);
  j["claim"] = c.claim;
  j["evidence"] = c.evidence;
  j["layer_id"] = c.layer_id ? ordered_json(*c.layer_id) : ordered_json(nullptr);
  return j;
}

std::string canonical_certificate_body(const Certificate& cert) {
  ordered_json j;
  j["trace_hash"] = to_hex(cert.trace_hash);
  j["policy_version"] = cert.policy_version;
  j["certifier_id"] = cert.certifier_id;
  j["certifier_tier"] = to_string(cert.certifier_tier);
  j["issued_tick"] = cert.issued_tick;
  ordered_json comps = ordered_json::array();
  for (const auto& c : cert.components) comps.push_back(component_to_json(c));
  j["components"] = comps;
  return j.dump();
}

}  // namespace

Digest certificate_mac(const Certificate& cert, std::string_view key) {
  return hmac_sha256(key, canonical_certificate_body(cert));
}

std::string serialize_certificate(const Certificate& cert) {
  ordered_json j = ordered_json::parse(canonical_certificate_body(cert));
  j["mac"] = to_hex(cert.mac);
  return j.dump();
}

Certificate parse_certificate(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed certificate: ") + ex.what());
  }
  Certificate c;
  c.trace_hash = from_hex(j.at("trace_hash").get<std::string>());
  c.policy_version = j.at("policy_version").get<std::string>();
  c.certifier_id = j.at("certifier_id").get<std::string>();
  c.certifier_tier = tier_from_string(j.at("certifier_tier").get<std::string>());
  c.issued_tick = j.at("issued_tick").get<std::int64_t>();
  for (const auto& cj : j.at("components")) {
    CertificateComponent comp;
    comp.component = component_type_from_string(cj.at("component").get<std::string>());
    comp.claim = cj.value("claim", std::string{});
    if (cj.contains("evidence"))
      comp.evidence = cj["evidence"].get<std::vector<std::string>>();
    if (cj.contains("layer_id") && !cj["layer_id"].is_null())
      comp.layer_id = cj["layer_id"].get<std::string>();
    c.components.push_back(std::move(comp));
  }
  c.mac = from_hex(j.at("mac").get<std::string>());
  return c;
}

// ---- certification -------------------------------------------------------

namespace {

TraceEvent strip_to_kind(const TraceEvent& e) {
  TraceEvent s;
  s.event_id = e.event_id;
  s.tick = e.tick;
  s.kind = e.kind;
  return s;
}

MemoryClass required_class(LayerKind k) {
  switch (k) {
    case LayerKind::Monitor: return MemoryClass::M0_FiniteState;
    case LayerKind::Counter: return MemoryClass::M1_Counter;
    case LayerKind::Temporal: return MemoryClass::M0_FiniteState;
    case LayerKind::InfoFlow: return MemoryClass::M2_Provenance;
  }
  return MemoryClass::M3_Persistent;
}

bool counter_layer_kind_only(const PolicyLayer& layer) {
  return std::all_of(layer.counter.updates.begin(), layer.counter.updates.end(),
                     [](const CounterUpdate& u) {
                       return u.when.kind_only() && u.const_delta.has_value();
                     });
}

bool monitor_layer_kind_only(const PolicyLayer& layer) {
  return std::all_of(layer.monitor.transitions.begin(), layer.monitor.transitions.end(),
                     [](const MonitorTransition& t) { return t.when.kind_only(); });
}

bool temporal_layer_kind_only(const PolicyLayer& layer) {
  return layer.temporal.a.kind_only() && layer.temporal.b.kind_only();
}

// Can the layer's obligations be decided from what the mask reveals?
bool witnessable_under_mask(const PolicyLayer& layer, ObservationMask mask) {
  switch (mask) {
    case ObservationMask::FullTrace:
      return true;
    case ObservationMask::FinalEventOnly:
      return false;
    case ObservationMask::EventKindsOnly:
      switch (layer.kind) {
        case LayerKind::Monitor: return monitor_layer_kind_only(layer);
        case LayerKind::Counter: return counter_layer_kind_only(layer);
        case LayerKind::Temporal: return temporal_layer_kind_only(layer);
        case LayerKind::InfoFlow: return false;
      }
  }
  return false;
}

Verdict rejected(std::vector<std::string> reasons) {
  Verdict v;
  v.outcome = Verdict::Outcome::Rejected;
  v.reasons = std::move(reasons);
  return v;
}

Verdict escalate(std::vector<std::string> reasons, std::optional<Tier> required = {}) {
  Verdict v;
  v.outcome = Verdict::Outcome::Escalate;
  v.reasons = std::move(reasons);
  v.required_tier = required;
  return v;
}

}  // namespace

Verdict certify(const ProposedTrace& trace, const PolicySystem& policy,
                const MemoryState& memory, const CertifierConfig& cfg,
                const Ledger* ledger) {
  if (cfg.memory_class == MemoryClass::M3_Persistent && ledger == nullptr)
    throw MemoryUnavailable("M3 certifier requires a ledger handle");

  if (trace.requested_policy_version != policy.version)
    return rejected({"policy version mismatch: trace requests '" +
                     trace.requested_policy_version + "', policy is '" + policy.version +
                     "'"});
  if (trace.proposer_id == cfg.certifier_id)
    return rejected({"self-approval: proposer and certifier are the same role"});
  if (trace.declared_tier > cfg.authority_tier)
    return escalate({"declared tier " + std::string(to_string(trace.declared_tier)) +
                     " exceeds certifier authority " +
                     std::string(to_string(cfg.authority_tier))},
                    trace.declared_tier);

  const Digest trace_hash = canonical_hash(trace);
  const std::int64_t issued_tick =
      std::max(trace.events.back().tick, memory.last_updated_tick);

  // Effective mask: a single-event trace is fully visible even under
  // FinalEventOnly.
  ObservationMask mask = cfg.observation_mask;
  if (mask == ObservationMask::FinalEventOnly && trace.events.size() == 1)
    mask = ObservationMask::FullTrace;

  // Visible sub-trace under the mask.
  std::vector<TraceEvent> visible;
  if (mask == ObservationMask::FullTrace) {
    visible = trace.events;
  } else if (mask == ObservationMask::FinalEventOnly) {
    visible = {trace.events.back()};
  } else {
    visible.reserve(trace.events.size());
    for (const auto& e : trace.events) visible.push_back(strip_to_kind(e));
  }

  if (!cfg.sound) {
    // Baseline output guardrail: judge only the visible sub-trace. This
    // deliberately admits traces whose violations the mask hides.
    std::vector<std::string> reasons;
    for (const auto& layer : policy.layers) {
      LayerVerdict lv = evaluate_layer(layer, visible);
      if (!lv.accepted) reasons.push_back(layer.layer_id + ": " + lv.violation->reason);
    }
    if (!reasons.empty()) return rejected(std::move(reasons));
    Certificate cert;
    cert.trace_hash = trace_hash;
    cert.policy_version = policy.version;
    cert.issued_tick = issued_tick;
    cert.certifier_id = cfg.certifier_id;
    cert.certifier_tier = cfg.authority_tier;
    cert.components.push_back({ComponentType::Id, "proposer=" + trace.proposer_id, {}, {}});
    cert.components.push_back(
        {ComponentType::Policy, "policy=" + policy.version + " (masked baseline)", {}, {}});
    cert.components.push_back({ComponentType::Lineage,
                               "source=" + policy.source + " effective_from=" +
                                   std::to_string(policy.effective_from),
                               {},
                               {}});
    cert.mac = certificate_mac(cert, cfg.mac_key);
    Verdict v;
    v.outcome = Verdict::Outcome::Certified;
    v.certificate = std::move(cert);
    return v;
  }

  // Sound path. Every obligation must be witnessed from visible
  // information plus memory; anything that cannot be witnessed escalates.
  std::vector<std::string> reject_reasons;
  std::vector<std::string> escalate_reasons;
  std::vector<CertificateComponent> layer_components;

  // Fold the visible events through proof memory. Layers whose
  // obligations exceed the mask escalate before this state is consulted.
  MemoryState mem = memory;
  for (const auto& [layer_id, st] : init_memory(policy).monitor_states)
    if (!mem.monitor_states.count(layer_id)) mem.monitor_states[layer_id] = st;
  for (const auto& e : visible) mem = update(mem, e, policy);

  const int memory_level = static_cast<int>(cfg.memory_class);

  for (const auto& layer : policy.layers) {
    if (memory_level < static_cast<int>(required_class(layer.kind))) {
      escalate_reasons.push_back(layer.layer_id + ": memory class " +
                                 to_string(cfg.memory_class) + " cannot witness a " +
                                 to_string(layer.kind) + " layer");
      continue;
    }
    if (!witnessable_under_mask(layer, mask)) {
      escalate_reasons.push_back(layer.layer_id +
                                 ": obligation depends on information outside the "
                                 "observation mask");
      continue;
    }
    switch (layer.kind) {
      case LayerKind::Monitor: {
        auto dead = std::find_if(mem.monitor_rejections.begin(), mem.monitor_rejections.end(),
                                 [&](const MonitorRejection& r) {
                                   return r.layer_id == layer.layer_id;
                                 });
        if (dead != mem.monitor_rejections.end()) {
          reject_reasons.push_back(layer.layer_id + ": monitor rejected at event " +
                                   dead->event_id);
          break;
        }
        const std::string state =
            std::get<std::string>(query(mem, MonitorStateQuery{layer.layer_id},
                                        cfg.memory_class));
        if (!layer.monitor.accepting.count(state)) {
          reject_reasons.push_back(layer.layer_id + ": monitor ended in non-accepting state '" +
                                   state + "'");
          break;
        }
        layer_components.push_back(
            {ComponentType::Risk, "monitor accepted in state '" + state + "'", {},
             layer.layer_id});
        break;
      }
      case LayerKind::Counter: {
        auto breach = std::find_if(mem.counter_breaches.begin(), mem.counter_breaches.end(),
                                   [&](const CounterBreach& b) {
                                     return b.layer_id == layer.layer_id;
                                   });
        if (breach != mem.counter_breaches.end()) {
          reject_reasons.push_back(layer.layer_id + ": counter '" + breach->counter +
                                   "' breached at event " + breach->event_id + " (" +
                                   std::to_string(breach->value) + " > " +
                                   std::to_string(breach->bound) + ")");
          break;
        }
        layer_components.push_back(
            {ComponentType::Risk, "all counter bounds respected", {}, layer.layer_id});
        break;
      }
      case LayerKind::Temporal: {
        LayerVerdict lv = evaluate_layer(layer, visible);
        if (!lv.accepted) {
          reject_reasons.push_back(layer.layer_id + ": " + lv.violation->reason);
          break;
        }
        layer_components.push_back(
            {ComponentType::Risk,
             std::string("temporal pattern ") + to_string(layer.temporal.pattern) +
                 " satisfied",
             {},
             layer.layer_id});
        break;
      }
      case LayerKind::InfoFlow: {
        LayerVerdict lv = evaluate_layer(layer, visible);
        if (!lv.accepted) {
          reject_reasons.push_back(layer.layer_id + ": " + lv.violation->reason);
          break;
        }
        // Evidence binding: every Claim must carry evidence resolvable to
        // registered provenance or an earlier in-trace derivation step.
        bool unresolved = false;
        if (layer.infoflow.purpose_binding) {
          for (std::size_t i = 0; i < visible.size() && !unresolved; ++i) {
            const TraceEvent& e = visible[i];
            if (e.kind != EventKind::Claim) continue;
            if (e.evidence_refs.empty()) {
              escalate_reasons.push_back(layer.layer_id + ": claim '" + e.event_id +
                                         "' carries no evidence");
              unresolved = true;
              break;
            }
            for (const auto& r : e.evidence_refs) {
              bool in_provenance = mem.provenance.count(r) > 0;
              bool in_trace_derivation = false;
              for (std::size_t j = 0; j < i; ++j)
                if (visible[j].event_id == r &&
                    (visible[j].kind == EventKind::Computation ||
                     visible[j].kind == EventKind::Retrieval))
                  in_trace_derivation = true;
              if (!in_provenance && !in_trace_derivation) {
                escalate_reasons.push_back(layer.layer_id + ": evidence '" + r +
                                           "' for claim '" + e.event_id +
                                           "' has no registered provenance");
                unresolved = true;
                break;
              }
            }
          }
        }
        if (unresolved) break;
        std::vector<std::string> ev;
        for (const auto& [id, rec] : mem.provenance) ev.push_back(id);
        layer_components.push_back(
            {ComponentType::Auth, "all accesses authorized", std::move(ev), layer.layer_id});
        break;
      }
    }
  }

  // Compute replay: re-execute every visible Computation event with exact
  // scaled-integer arithmetic and compare to the claimed value.
  bool has_computation = false;
  std::vector<std::string> compute_evidence;
  for (std::size_t i = 0; i < visible.size(); ++i) {
    const TraceEvent& e = visible[i];
    if (e.kind != EventKind::Computation) continue;
    has_computation = true;
    if (mask != ObservationMask::FullTrace) {
      escalate_reasons.push_back("computation '" + e.event_id +
                                 "' cannot be replayed under the observation mask");
      continue;
    }
    auto expr_it = e.params.find("expr");
    auto val_it = e.params.find("value");
    if (expr_it == e.params.end() || val_it == e.params.end() ||
        !std::holds_alternative<std::string>(expr_it->second)) {
      reject_reasons.push_back("computation '" + e.event_id +
                               "' is unreplayable: missing expr/value");
      continue;
    }
    std::int64_t claimed = 0;
    if (std::holds_alternative<std::int64_t>(val_it->second))
      claimed = std::get<std::int64_t>(val_it->second);
    else if (std::holds_alternative<ScaledDecimal>(val_it->second))
      claimed = std::get<ScaledDecimal>(val_it->second).bp;
    else {
      reject_reasons.push_back("computation '" + e.event_id + "' claims a non-numeric value");
      continue;
    }
    try {
      std::int64_t actual =
          replay_expression(std::get<std::string>(expr_it->second), trace, i);
      if (actual != claimed) {
        reject_reasons.push_back("computation replay mismatch at '" + e.event_id +
                                 "': expression yields " + std::to_string(actual) +
                                 ", claimed " + std::to_string(claimed));
        continue;
      }
    } catch (const ParseError& ex) {
      reject_reasons.push_back("computation '" + e.event_id +
                               "' is unreplayable: " + ex.what());
      continue;
    }
    compute_evidence.push_back(e.event_id);
  }

  // Human witness: tiers C4+ require a fresh approval bound to this trace
  // hash whose validity window covers the issue tick.
  bool needs_human = trace.declared_tier >= Tier::C4;
  std::optional<ApprovalRecord> approval;
  if (needs_human) {
    if (mask != ObservationMask::FullTrace) {
      escalate_reasons.push_back("approval evidence is outside the observation mask");
    } else if (memory_level < static_cast<int>(MemoryClass::M2_Provenance)) {
      escalate_reasons.push_back("memory class " + std::string(to_string(cfg.memory_class)) +
                                 " cannot witness approvals");
    } else {
      approval = std::get<std::optional<ApprovalRecord>>(
          query(mem, ApprovalQuery{to_hex(trace_hash)}, cfg.memory_class));
      if (!approval) {
        escalate_reasons.push_back("no approval bound to this trace hash");
      } else if (approval->valid_from > issued_tick || approval->valid_until < issued_tick) {
        escalate_reasons.push_back("approval by '" + approval->approver +
                                   "' is outside its validity window at tick " +
                                   std::to_string(issued_tick));
        approval.reset();
      }
    }
  }

  if (!reject_reasons.empty()) return rejected(std::move(reject_reasons));
  if (!escalate_reasons.empty()) return escalate(std::move(escalate_reasons));

  Certificate cert;
  cert.trace_hash = trace_hash;
  cert.policy_version = policy.version;
  cert.issued_tick = issued_tick;
  cert.certifier_id = cfg.certifier_id;
  cert.certifier_tier = cfg.authority_tier;
  cert.components.push_back({ComponentType::Id, "proposer=" + trace.proposer_id, {}, {}});
  cert.components.push_back({ComponentType::Policy, "policy=" + policy.version, {}, {}});
  for (auto& c : layer_components) cert.components.push_back(std::move(c));
  if (has_computation)
    cert.components.push_back(
        {ComponentType::Compute, "all computations replayed exactly", compute_evidence, {}});
  // Source component lists retrieval evidence; payloads are replaced by
  // commitments so the certificate can travel without the raw evidence.
  std::vector<std::string> source_ev;
  std::vector<std::string> commitments;
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::Retrieval) continue;
    source_ev.push_back(e.event_id);
    auto p = e.params.find("payload");
    if (p != e.params.end() && std::holds_alternative<std::string>(p->second))
      commitments.push_back("commit:" +
                            to_hex(commit_payload(std::get<std::string>(p->second))));
  }
  if (!source_ev.empty())
    cert.components.push_back(
        {ComponentType::Source, "retrieval lineage recorded", source_ev, {}});
  if (!commitments.empty())
    cert.components.push_back(
        {ComponentType::Privacy, "evidence payloads held as commitments", commitments, {}});
  if (needs_human && approval)
    cert.components.push_back({ComponentType::Human,
                               "approved by '" + approval->approver + "' until tick " +
                                   std::to_string(approval->valid_until),
                               {},
                               {}});
  std::string lineage = "source=" + policy.source +
                        " effective_from=" + std::to_string(policy.effective_from);
  if (ledger && ledger->size() > 0)
    lineage += " ledger_head=" + to_hex(ledger->entries().back().entry_hash);
  cert.components.push_back({ComponentType::Lineage, lineage, {}, {}});
  cert.mac = certificate_mac(cert, cfg.mac_key);

  Verdict v;
  v.outcome = Verdict::Outcome::Certified;
  v.certificate = std::move(cert);
  return v;
}

CheckDetail check_certificate_detailed(const Certificate& cert, const ProposedTrace& trace,
                                       const PolicySystem& policy, std::string_view key) {
  CheckDetail d;
  auto fail = [&](std::string why) {
    d.ok = false;
    d.failures.push_back(std::move(why));
  };
  if (certificate_mac(cert, key) != cert.mac) fail("mac verification failed");
  if (cert.trace_hash != canonical_hash(trace)) fail("trace hash mismatch");
  if (cert.policy_version != policy.version) fail("policy version mismatch");
  if (cert.certifier_id == trace.proposer_id) fail("certifier equals proposer");
  if (cert.certifier_tier < trace.declared_tier) fail("certifier tier below declared tier");
  for (const auto& comp : cert.components)
    for (const auto& ev : comp.evidence) {
      if (ev.rfind("commit:", 0) == 0) continue;  // opaque commitment
      bool found = std::any_of(trace.events.begin(), trace.events.end(),
                               [&](const TraceEvent& e) { return e.event_id == ev; });
      if (!found)
        fail(std::string(to_string(comp.component)) + " evidence '" + ev +
             "' does not resolve in the trace");
    }
  return d;
}

bool check_certificate(const Certificate& cert, const ProposedTrace& trace,
                       const PolicySystem& policy, std::string_view key) {
  return check_certificate_detailed(cert, trace, policy, key).ok;
}

}  // namespace certgate
