#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "certgate/digest.hpp"
#include "certgate/memory.hpp"
#include "certgate/policy.hpp"
#include "certgate/trace.hpp"

namespace certgate {

class Ledger;

enum class ComponentType { Id, Auth, Source, Policy, Risk, Compute, Privacy, Human, Lineage };
const char* to_string(ComponentType c);
ComponentType component_type_from_string(const std::string& s);

struct CertificateComponent {
  ComponentType component = ComponentType::Id;
  std::string claim;
  // Event ids from the bound trace, or "commit:<hex>" payload commitments.
  std::vector<std::string> evidence;
  std::optional<std::string> layer_id;
};

struct Certificate {
  Digest trace_hash{};
  std::string policy_version;
  std::vector<CertificateComponent> components;
  std::int64_t issued_tick = 0;
  std::string certifier_id;
  Tier certifier_tier = Tier::C0;
  Digest mac{};
};

enum class ObservationMask { FullTrace, FinalEventOnly, EventKindsOnly };
const char* to_string(ObservationMask m);
ObservationMask observation_mask_from_string(const std::string& s);

struct CertifierConfig {
  std::string certifier_id;
  Tier authority_tier = Tier::C5;
  MemoryClass memory_class = MemoryClass::M2_Provenance;
  ObservationMask observation_mask = ObservationMask::FullTrace;
  std::string mac_key;
  // False only for the baseline output-guardrail certifier, which judges
  // the visible sub-trace and may therefore admit impermissible traces.
  bool sound = true;
};

struct Verdict {
  enum class Outcome { Certified, Rejected, Escalate };
  Outcome outcome = Outcome::Rejected;
  std::optional<Certificate> certificate;  // Certified only
  std::vector<std::string> reasons;        // Rejected / Escalate detail
  std::optional<Tier> required_tier;       // Escalate on authority shortfall

  bool certified() const { return outcome == Outcome::Certified; }
};

const char* to_string(Verdict::Outcome o);

// The Permissibility Machine. Pure in its arguments: same inputs, same
// verdict. `ledger` is required when cfg.memory_class is M3.
Verdict certify(const ProposedTrace& trace, const PolicySystem& policy,
                const MemoryState& memory, const CertifierConfig& cfg,
                const Ledger* ledger = nullptr);

// Independent check path: verifies the MAC, the trace binding, the policy
// version, role separation, tier containment, and evidence resolution.
// Shares no state with certify.
bool check_certificate(const Certificate& cert, const ProposedTrace& trace,
                       const PolicySystem& policy, std::string_view key);

struct CheckDetail {
  bool ok = true;
  std::vector<std::string> failures;
};
CheckDetail check_certificate_detailed(const Certificate& cert, const ProposedTrace& trace,
                                       const PolicySystem& policy, std::string_view key);

Digest certificate_mac(const Certificate& cert, std::string_view key);

std::string serialize_certificate(const Certificate& cert);
Certificate parse_certificate(const std::string& bytes);

// Exact scaled-integer expression replay used for Compute components.
// Grammar: integers, + - * / ( ), and references ev.<event_id>.<param>.
// Division is exact; a non-integral quotient is a replay failure.
std::int64_t replay_expression(const std::string& expr, const ProposedTrace& trace,
                               std::size_t upto_index);

}  // namespace certgate
