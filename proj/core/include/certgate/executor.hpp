#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "certgate/certifier.hpp"
#include "certgate/ledger.hpp"
#include "certgate/policy.hpp"
#include "certgate/trace.hpp"

namespace certgate {

// Certificate validity window after issuance when the proposal does not
// set execution_conditions["valid_until"].
inline constexpr std::int64_t kDefaultCertificateWindow = 50;

struct DeviationInjection {
  std::string event_id;
  std::string field;  // event field or "param:<name>"
  std::string substituted;
};

// Simulated execution substrate: scripted tool responses fill observation
// slots, injections model tools deviating from the certified proposal.
struct Environment {
  // event_id -> value produced by the environment for that slot
  std::map<std::string, std::int64_t> tool_behaviors;
  std::vector<DeviationInjection> deviation_injections;
  std::int64_t clock = 0;
};

Environment parse_environment(const std::string& bytes);
std::string serialize_environment(const Environment& env);

struct ExecutionResult {
  RealizedTrace realized;
  std::optional<std::string> halted_before;  // event_id, null when Completed
  std::uint64_t ledger_seq = 0;
};

// Replays the certified proposal against the environment. Conformance is
// checked per event before the event is realized, so no irreversible
// event runs after the first detected deviation. Throws NoCertificate
// when check_certificate fails (after recording the refusal) and
// StaleCertificate when the validity window has expired.
ExecutionResult execute(const ProposedTrace& trace, const Certificate& cert,
                        const PolicySystem& policy, Environment& env, Ledger& ledger,
                        std::string_view mac_key);

struct ConformanceResult {
  bool conforms = true;
  std::vector<Deviation> deviations;
};

// Pure whole-trace check: event counts match, non-observation fields match
// exactly, observation values satisfy their declared constraints.
ConformanceResult conform(const RealizedTrace& realized, const ProposedTrace& proposed);

}  // namespace certgate
