#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "certgate/policy.hpp"
#include "certgate/trace.hpp"

namespace certgate {

// Proof-memory capability classes. Each class answers every fact family
// of the classes below it.
enum class MemoryClass { M0_FiniteState, M1_Counter, M2_Provenance, M3_Persistent };

const char* to_string(MemoryClass m);
MemoryClass memory_class_from_string(const std::string& s);

struct ProvenanceRecord {
  std::string source;  // component the evidence came from
  std::optional<std::string> data_class;
  std::optional<std::string> purpose;
};

struct ApprovalRecord {
  std::string approver;
  std::int64_t valid_from = 0;
  std::int64_t valid_until = 0;
};

// Approval validity window when the event does not specify one.
inline constexpr std::int64_t kDefaultApprovalWindow = 100;

struct CounterBreach {
  std::string layer_id;
  std::string counter;
  std::string event_id;
  std::int64_t value = 0;
  std::int64_t bound = 0;
};

struct MonitorRejection {
  std::string layer_id;
  std::string event_id;
};

using CounterKey = std::tuple<std::string, std::string, std::string>;  // name, principal, resource

struct MemoryState {
  std::map<std::string, std::string> monitor_states;  // layer_id -> automaton state
  std::vector<MonitorRejection> monitor_rejections;   // dead-state entries, permanent
  std::map<CounterKey, std::vector<std::pair<std::int64_t, std::int64_t>>> counters;
  std::vector<CounterBreach> counter_breaches;
  std::map<std::string, ProvenanceRecord> provenance;  // event_id -> record
  std::map<std::string, ApprovalRecord> approvals;     // trace hash (hex) -> approval
  std::int64_t last_updated_tick = 0;
};

// Fresh state with every monitor layer at its initial state.
MemoryState init_memory(const PolicySystem& policy);

// Functional update: the old state is unchanged. Automaton steps, counter
// appends with window pruning, provenance registration for Retrieval
// events, approval registration for Approval events.
MemoryState update(const MemoryState& state, const TraceEvent& event,
                   const PolicySystem& policy);

// ---- fact queries --------------------------------------------------------

struct MonitorStateQuery {
  std::string layer_id;
};
struct CounterCountQuery {
  std::string counter;
  std::string principal;
  std::string resource;
  std::optional<std::int64_t> window_ticks;
  std::int64_t now_tick = 0;
};
struct ProvenanceQuery {
  std::string event_id;
};
struct ApprovalQuery {
  std::string trace_hash_hex;
};

using FactQuery =
    std::variant<MonitorStateQuery, CounterCountQuery, ProvenanceQuery, ApprovalQuery>;

using FactAnswer = std::variant<std::string, std::int64_t, ProvenanceRecord,
                                std::optional<ApprovalRecord>>;

// Throws CapabilityDenied when `cls` does not authorize the fact family,
// UnknownFact when the fact is not in state (monitor/provenance lookups).
FactAnswer query(const MemoryState& state, const FactQuery& fact, MemoryClass cls);

}  // namespace certgate
