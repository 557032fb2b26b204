#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "certgate/certifier.hpp"
#include "certgate/digest.hpp"
#include "certgate/policy.hpp"
#include "certgate/trace.hpp"

namespace certgate {

struct LedgerBody {
  Digest trace_hash{};
  // Outcome record: a serialized certificate for Certified entries, or a
  // rejection/escalation/execution/re-certification record. JSON text.
  std::string record;
  std::string outcome;  // Certified | Rejected | Escalate | Executed | Recertified | Refused
  std::string policy_version;
  std::string policy_source;
  std::int64_t policy_effective_from = 0;
  std::int64_t recorded_tick = 0;
};

struct LedgerEntry {
  std::uint64_t seq = 0;
  LedgerBody body;
  Digest prev_hash{};
  Digest entry_hash{};
};

std::string canonical_ledger_body(const LedgerEntry& e);
Digest ledger_entry_hash(const LedgerEntry& e);

struct ChainVerification {
  bool ok = true;
  std::optional<std::uint64_t> first_bad_seq;
};

// Append-only, hash-chained record of (trace, certificate, policy,
// lineage). Optionally persisted as newline-delimited JSON with fsync on
// append. The API exposes no mutation or removal of existing entries.
class Ledger {
 public:
  Ledger() = default;
  explicit Ledger(std::filesystem::path file);

  static Ledger load(const std::filesystem::path& file);

  const LedgerEntry& append(LedgerBody body);

  ChainVerification verify() const;

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::vector<const LedgerEntry*> find_by_trace_hash(const Digest& h) const;

 private:
  std::vector<LedgerEntry> entries_;
  std::optional<std::filesystem::path> file_;

  void persist(const LedgerEntry& e);
};

// Verifies a persisted ledger file without loading it into a Ledger
// (tolerates corrupt lines; they fail verification at that seq).
ChainVerification verify_ledger_file(const std::filesystem::path& file);

std::string serialize_ledger_entry(const LedgerEntry& e);
LedgerEntry parse_ledger_entry(const std::string& line);

// ---- re-certification ----------------------------------------------------

using TraceStore = std::function<std::optional<ProposedTrace>(const Digest&)>;

struct RecertifyResult {
  PermissibilityVerdict verdict;
  // Certified under the old policy but no longer permissible.
  bool drift = false;
};

// Re-evaluates the entry's trace under a later policy system. The
// historical entry is untouched; the caller may append the result.
RecertifyResult recertify(const LedgerEntry& entry, const PolicySystem& new_policy,
                          const TraceStore& traces);

}  // namespace certgate
