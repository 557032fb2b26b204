#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "certgate/digest.hpp"

namespace certgate {

enum class EventKind {
  Query,
  Retrieval,
  ToolCall,
  Computation,
  Claim,
  Approval,
  MemoryWrite,
  Release,
  ExecutionCall,
};

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

enum class Tier { C0, C1, C2, C3, C4, C5 };

const char* to_string(Tier t);
Tier tier_from_string(const std::string& s);

// Monetary and exposure quantities are scaled integers (basis points);
// no floating-point accumulation anywhere in the engine.
struct ScaledDecimal {
  std::int64_t bp = 0;
  auto operator<=>(const ScaledDecimal&) const = default;
};

using Scalar = std::variant<std::string, std::int64_t, ScaledDecimal>;

std::string scalar_to_string(const Scalar& s);

struct TraceEvent {
  std::string event_id;
  std::int64_t tick = 0;
  EventKind kind = EventKind::Query;
  std::string principal;
  std::string component;
  std::optional<std::string> resource;
  std::optional<std::string> data_class;
  std::optional<std::string> purpose;
  std::map<std::string, Scalar> params;
  std::map<std::string, std::int64_t> quantity_deltas;
  std::vector<std::string> evidence_refs;
  // True when the value is produced by the environment at execution time.
  // In a proposed trace such an event carries a constraint expression in
  // params["constraint"], never a fixed params["value"].
  bool observation_slot = false;
  bool irreversible = false;

  bool operator==(const TraceEvent&) const = default;
};

struct ProposedTrace {
  std::string trace_id;
  std::string proposer_id;
  std::string task;
  Tier declared_tier = Tier::C0;
  std::string requested_policy_version;
  std::map<std::string, std::int64_t> execution_conditions;
  std::vector<TraceEvent> events;

  bool operator==(const ProposedTrace&) const = default;
};

enum class ExecutionOutcome { Completed, Halted, RolledBack, Escalated };

const char* to_string(ExecutionOutcome o);

struct Deviation {
  std::string event_id;
  std::string field;
  std::string expected;
  std::string observed;
  bool operator==(const Deviation&) const = default;
};

struct RealizedTrace {
  std::string trace_id;
  std::vector<TraceEvent> events;
  ExecutionOutcome outcome = ExecutionOutcome::Completed;
  std::vector<Deviation> deviation_log;
};

// Observation-slot constraints: "any", "eq:<int>", "range:<lo>:<hi>".
struct SlotConstraint {
  enum class Kind { Any, Eq, Range } kind = Kind::Any;
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  static SlotConstraint parse(const std::string& text);
  bool satisfied_by(std::int64_t value) const;
  // True when the constraint pins the value to a single point, i.e. the
  // realized value is known before execution.
  bool pins_value() const { return kind == Kind::Eq; }
};

ProposedTrace parse_trace(const std::string& bytes);
std::string serialize_trace(const ProposedTrace& trace);

// SHA-256 of the canonical serialization: fixed field order, sorted map
// keys, no insignificant whitespace. Observation slots hash as their
// constraint text.
Digest canonical_hash(const ProposedTrace& trace);
std::string canonical_serialize(const ProposedTrace& trace);

ProposedTrace prefix(const ProposedTrace& trace, std::size_t t);

// Throws ValidationError naming the violated invariant.
void validate_trace(const ProposedTrace& trace);

}  // namespace certgate
