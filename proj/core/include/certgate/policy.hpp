#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "certgate/trace.hpp"

namespace certgate {

// A conjunctive field matcher over trace events. Missing fields are
// wildcards. Two predicates are provably disjoint when they pin the same
// field to different constants.
struct EventPredicate {
  std::optional<EventKind> kind;
  std::optional<std::string> principal;
  std::optional<std::string> component;
  std::optional<std::string> resource;
  std::optional<std::string> data_class;
  std::optional<std::string> purpose;
  std::map<std::string, Scalar> param_equals;

  bool matches(const TraceEvent& e) const;
  bool disjoint_with(const EventPredicate& other) const;
  // True when the predicate constrains nothing beyond the event kind;
  // such predicates remain decidable under the EventKindsOnly mask.
  bool kind_only() const;
};

enum class LayerKind { Monitor, Counter, Temporal, InfoFlow };
const char* to_string(LayerKind k);

enum class StateDefault { SelfLoop, Reject };

struct MonitorTransition {
  std::string from;
  EventPredicate when;
  std::string to;
};

struct MonitorSpec {
  std::vector<std::string> states;
  std::string initial;
  std::set<std::string> accepting;
  std::vector<MonitorTransition> transitions;
  std::map<std::string, StateDefault> defaults;  // per state, explicit
};

struct CounterDef {
  std::string name;
  std::optional<std::int64_t> window_ticks;  // nullopt = unbounded window
  std::int64_t bound = 0;
};

struct CounterUpdate {
  EventPredicate when;
  std::string counter;
  // Delta is either a constant or read from the matched event's
  // quantity_deltas under `from_quantity`.
  std::optional<std::int64_t> const_delta;
  std::optional<std::string> from_quantity;
};

struct CounterSpec {
  std::vector<CounterDef> counters;
  std::vector<CounterUpdate> updates;
};

enum class TemporalPattern { Precedence, AbsenceAfter, ResponseWithin };
const char* to_string(TemporalPattern p);

struct TemporalSpec {
  TemporalPattern pattern = TemporalPattern::Precedence;
  EventPredicate a;
  EventPredicate b;
  std::int64_t k = 0;  // ResponseWithin only
};

struct AuthTuple {
  // "*" is a wildcard; the table is allow-list only, absence = deny.
  std::string principal = "*";
  std::string component = "*";
  std::string data_class = "*";
  std::string purpose = "*";
};

struct InfoFlowSpec {
  std::vector<AuthTuple> auth_table;
  bool purpose_binding = false;
  std::set<std::string> release_constraints;
};

struct PolicyLayer {
  std::string layer_id;
  LayerKind kind = LayerKind::Monitor;
  Tier tier = Tier::C0;
  std::string description;
  MonitorSpec monitor;
  CounterSpec counter;
  TemporalSpec temporal;
  InfoFlowSpec infoflow;
};

struct PolicySystem {
  std::string version;
  std::string source;
  std::int64_t effective_from = 0;
  std::vector<PolicyLayer> layers;
};

struct LayerViolation {
  std::string event_id;  // first violating event, empty for end-of-trace
  std::string reason;
};

struct LayerVerdict {
  std::string layer_id;
  bool accepted = true;
  std::optional<LayerViolation> violation;
};

struct PermissibilityVerdict {
  bool permitted = true;
  std::vector<LayerVerdict> per_layer;
};

// Semantic membership: permitted iff every layer accepts. This is the
// ground-truth oracle for all boundary measurements.
PermissibilityVerdict evaluate(const PolicySystem& policy, const ProposedTrace& trace);
PermissibilityVerdict evaluate(const PolicySystem& policy, const RealizedTrace& trace);

LayerVerdict evaluate_layer(const PolicyLayer& layer, const std::vector<TraceEvent>& events);

PolicySystem strengthen(const PolicySystem& policy, const PolicyLayer& layer,
                        const std::string& new_version);

PolicySystem parse_policy(const std::string& bytes);
std::string serialize_policy(const PolicySystem& policy);
std::string serialize_verdict(const PermissibilityVerdict& v);

// Load-time checks: invariants plus monitor determinism.
void validate_policy(const PolicySystem& policy);

}  // namespace certgate
