#include "certgate/ledger.hpp"

#include <json.hpp>
#include <unistd.h>

#include <cstdio>
#include <fstream>

#include "certgate/errors.hpp"

namespace certgate {

using nlohmann::json;
using nlohmann::ordered_json;

std::string canonical_ledger_body(const LedgerEntry& e) {
  ordered_json j;
  j["seq"] = e.seq;
  j["trace_hash"] = to_hex(e.body.trace_hash);
  j["record"] = e.body.record;
  j["outcome"] = e.body.outcome;
  j["policy_version"] = e.body.policy_version;
  j["policy_source"] = e.body.policy_source;
  j["policy_effective_from"] = e.body.policy_effective_from;
  j["recorded_tick"] = e.body.recorded_tick;
  return j.dump();
}

Digest ledger_entry_hash(const LedgerEntry& e) {
  return sha256(canonical_ledger_body(e) + to_hex(e.prev_hash));
}

Ledger::Ledger(std::filesystem::path file) : file_(std::move(file)) {}

Ledger Ledger::load(const std::filesystem::path& file) {
  Ledger l;
  l.file_ = file;
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open ledger file: " + file.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    l.entries_.push_back(parse_ledger_entry(line));
  }
  return l;
}

const LedgerEntry& Ledger::append(LedgerBody body) {
  LedgerEntry e;
  e.seq = entries_.size();
  e.body = std::move(body);
  e.prev_hash = entries_.empty() ? zero_digest() : entries_.back().entry_hash;
  e.entry_hash = ledger_entry_hash(e);
  entries_.push_back(std::move(e));
  if (file_) persist(entries_.back());
  return entries_.back();
}

void Ledger::persist(const LedgerEntry& e) {
  std::FILE* f = std::fopen(file_->c_str(), "a");
  if (!f) throw std::runtime_error("cannot append to ledger file: " + file_->string());
  std::string line = serialize_ledger_entry(e);
  line.push_back('\n');
  std::fwrite(line.data(), 1, line.size(), f);
  std::fflush(f);
  ::fsync(fileno(f));
  std::fclose(f);
}

ChainVerification Ledger::verify() const {
  Digest prev = zero_digest();
  for (std::uint64_t i = 0; i < entries_.size(); ++i) {
    const LedgerEntry& e = entries_[i];
    if (e.seq != i || e.prev_hash != prev || ledger_entry_hash(e) != e.entry_hash)
      return ChainVerification{false, i};
    prev = e.entry_hash;
  }
  return ChainVerification{true, std::nullopt};
}

std::vector<const LedgerEntry*> Ledger::find_by_trace_hash(const Digest& h) const {
  std::vector<const LedgerEntry*> out;
  for (const auto& e : entries_)
    if (e.body.trace_hash == h) out.push_back(&e);
  return out;
}

ChainVerification verify_ledger_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open ledger file: " + file.string());
  Digest prev = zero_digest();
  std::uint64_t i = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LedgerEntry e;
    try {
      e = parse_ledger_entry(line);
    } catch (const std::exception&) {
      return ChainVerification{false, i};
    }
    if (e.seq != i || e.prev_hash != prev || ledger_entry_hash(e) != e.entry_hash)
      return ChainVerification{false, i};
    prev = e.entry_hash;
    ++i;
  }
  return ChainVerification{true, std::nullopt};
}

std::string serialize_ledger_entry(const LedgerEntry& e) {
  ordered_json j = ordered_json::parse(canonical_ledger_body(e));
  j["prev_hash"] = to_hex(e.prev_hash);
  j["entry_hash"] = to_hex(e.entry_hash);
  return j.dump();
}

LedgerEntry parse_ledger_entry(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed ledger line: ") + ex.what());
  }
  LedgerEntry e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.body.trace_hash = from_hex(j.at("trace_hash").get<std::string>());
  e.body.record = j.at("record").get<std::string>();
  e.body.outcome = j.at("outcome").get<std::string>();
  e.body.policy_version = j.at("policy_version").get<std::string>();
  e.body.policy_source = j.at("policy_source").get<std::string>();
  e.body.policy_effective_from = j.at("policy_effective_from").get<std::int64_t>();
  e.body.recorded_tick = j.at("recorded_tick").get<std::int64_t>();
  e.prev_hash = from_hex(j.at("prev_hash").get<std::string>());
  e.entry_hash = from_hex(j.at("entry_hash").get<std::string>());
  return e;
}

RecertifyResult recertify(const LedgerEntry& entry, const PolicySystem& new_policy,
                          const TraceStore& traces) {
  auto trace = traces(entry.body.trace_hash);
  if (!trace)
    throw TraceNotFound("no trace stored for hash " + to_hex(entry.body.trace_hash));
  RecertifyResult r;
  r.verdict = evaluate(new_policy, *trace);
  r.drift = entry.body.outcome == "Certified" && !r.verdict.permitted;
  return r;
}

}  // namespace certgate
