// Command-line surface over the certification engine. Exit codes:
//   certify: 0 Certified, 10 Escalate, 20 Rejected
//   execute: 0 Completed, 30 Halted, 31 RolledBack, 32 Escalated,
//            40 no usable certificate (missing, invalid, or stale)
//   everything else: 0 success, 1 failure, 2 usage or input error

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "certgate/boundary.hpp"
#include "certgate/certifier.hpp"
#include "certgate/errors.hpp"
#include "certgate/executor.hpp"
#include "certgate/generator.hpp"
#include "certgate/ledger.hpp"
#include "certgate/memory.hpp"
#include "certgate/scenario.hpp"

using namespace certgate;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string mac_key_from_env() {
  const char* k = std::getenv("CERTGATE_MAC_KEY");
  return k ? k : "dev-key";
}

// Flat TOML subset: `key = value` lines with string/int/bool values.
std::map<std::string, std::string> parse_flat_toml(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      auto e = s.find_last_not_of(" \t\r");
      s.erase(e == std::string::npos ? 0 : e + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}

CertifierConfig load_certifier_config(const std::string& path) {
  CertifierConfig cfg;
  cfg.certifier_id = "cert_cli";
  cfg.mac_key = mac_key_from_env();
  if (path.empty()) return cfg;
  std::string text = read_file(path);
  std::map<std::string, std::string> kv;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".toml") {
    kv = parse_flat_toml(text);
  } else {
    json j = json::parse(text);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_string()) kv[it.key()] = it.value().get<std::string>();
      else kv[it.key()] = it.value().dump();
    }
  }
  if (kv.count("certifier_id")) cfg.certifier_id = kv["certifier_id"];
  if (kv.count("authority_tier")) cfg.authority_tier = tier_from_string(kv["authority_tier"]);
  if (kv.count("memory_class")) cfg.memory_class = memory_class_from_string(kv["memory_class"]);
  if (kv.count("observation_mask"))
    cfg.observation_mask = observation_mask_from_string(kv["observation_mask"]);
  if (kv.count("sound")) cfg.sound = kv["sound"] == "true";
  return cfg;
}

// Prior events folded into proof memory before certification, as a JSON
// document {"events": [...]} in trace-event format.
MemoryState load_memory(const std::string& path, const PolicySystem& policy) {
  MemoryState mem = init_memory(policy);
  if (path.empty()) return mem;
  // reuse the trace parser by wrapping the events in a shell trace
  json j = json::parse(read_file(path));
  ordered_json shell;
  shell["trace_id"] = "memory";
  shell["proposer_id"] = "memory";
  shell["declared_tier"] = "C0";
  shell["requested_policy_version"] = policy.version;
  shell["events"] = j.at("events");
  ProposedTrace t = parse_trace(shell.dump());
  for (const auto& e : t.events) mem = update(mem, e, policy);
  return mem;
}

int cmd_certify(const std::string& trace_path, const std::string& policy_path,
                const std::string& memory_path, const std::string& config_path,
                const std::string& out_path) {
  ProposedTrace trace = parse_trace(read_file(trace_path));
  PolicySystem policy = parse_policy(read_file(policy_path));
  CertifierConfig cfg = load_certifier_config(config_path);
  MemoryState mem = load_memory(memory_path, policy);
  Verdict v = certify(trace, policy, mem, cfg);

  ordered_json out;
  out["outcome"] = to_string(v.outcome);
  out["reasons"] = v.reasons;
  if (v.required_tier) out["required_tier"] = to_string(*v.required_tier);
  std::cout << out.dump(2) << "\n";
  if (v.certificate) {
    std::string cert = serialize_certificate(*v.certificate);
    if (!out_path.empty()) write_file(out_path, cert);
    else std::cout << cert << "\n";
  }
  switch (v.outcome) {
    case Verdict::Outcome::Certified: return 0;
    case Verdict::Outcome::Escalate: return 10;
    case Verdict::Outcome::Rejected: return 20;
  }
  return 2;
}

int cmd_execute(const std::string& trace_path, const std::string& cert_path,
                const std::string& policy_path, const std::string& env_path,
                const std::string& ledger_path) {
  ProposedTrace trace = parse_trace(read_file(trace_path));
  Certificate cert = parse_certificate(read_file(cert_path));
  PolicySystem policy = parse_policy(read_file(policy_path));
  Environment env = parse_environment(read_file(env_path));
  Ledger ledger = ledger_path.empty() ? Ledger() : Ledger(ledger_path);

  try {
    ExecutionResult res = execute(trace, cert, policy, env, ledger, mac_key_from_env());
    ordered_json out;
    out["outcome"] = to_string(res.realized.outcome);
    out["realized_events"] = res.realized.events.size();
    if (res.halted_before) out["halted_before"] = *res.halted_before;
    ordered_json devs = ordered_json::array();
    for (const auto& d : res.realized.deviation_log)
      devs.push_back(ordered_json{{"event_id", d.event_id},
                                  {"field", d.field},
                                  {"expected", d.expected},
                                  {"observed", d.observed}});
    out["deviations"] = devs;
    out["ledger_seq"] = res.ledger_seq;
    std::cout << out.dump(2) << "\n";
    switch (res.realized.outcome) {
      case ExecutionOutcome::Completed: return 0;
      case ExecutionOutcome::Halted: return 30;
      case ExecutionOutcome::RolledBack: return 31;
      case ExecutionOutcome::Escalated: return 32;
    }
    return 2;
  } catch (const NoCertificate& ex) {
    std::cerr << "refused: " << ex.what() << "\n";
    return 40;
  } catch (const StaleCertificate& ex) {
    std::cerr << "refused: " << ex.what() << "\n";
    return 40;
  }
}

int cmd_audit(const std::string& ledger_path, const std::string& trace_hash_hex) {
  Ledger ledger = Ledger::load(ledger_path);
  auto hits = ledger.find_by_trace_hash(from_hex(trace_hash_hex));
  for (const auto* e : hits) std::cout << serialize_ledger_entry(*e) << "\n";
  std::cout << hits.size() << " entries for trace " << trace_hash_hex << "\n";
  return 0;
}

int cmd_recertify(const std::string& ledger_path, std::uint64_t entry_seq,
                  const std::string& policy_path, const std::string& trace_path) {
  Ledger ledger = Ledger::load(ledger_path);
  if (entry_seq >= ledger.size()) throw OutOfRange("no ledger entry with that seq");
  const LedgerEntry& entry = ledger.entries()[entry_seq];
  PolicySystem new_policy = parse_policy(read_file(policy_path));
  ProposedTrace trace = parse_trace(read_file(trace_path));
  TraceStore store = [&](const Digest& h) -> std::optional<ProposedTrace> {
    if (h == canonical_hash(trace)) return trace;
    return std::nullopt;
  };
  RecertifyResult r = recertify(entry, new_policy, store);
  ordered_json out;
  out["entry_seq"] = entry_seq;
  out["old_policy_version"] = entry.body.policy_version;
  out["new_policy_version"] = new_policy.version;
  out["permitted_under_new"] = r.verdict.permitted;
  out["drift"] = r.drift;
  std::cout << out.dump(2) << "\n";
  return r.drift ? 1 : 0;
}

int cmd_eval(const std::string& gen_path, const std::string& policy_path,
             const std::string& config_path, const std::string& mode,
             std::int64_t seed_override) {
  GeneratorSpec gen = parse_generator(read_file(gen_path));
  PolicySystem policy = parse_policy(read_file(policy_path));
  CertifierConfig cfg = load_certifier_config(config_path);
  if (seed_override >= 0) gen.seed = static_cast<std::uint64_t>(seed_override);

  BoundaryReport report;
  if (mode == "exact") {
    gen.mode = GeneratorSpec::Mode::Enumerate;
    report = exact_measures(gen, cfg, policy);
  } else if (mode.rfind("sample:", 0) == 0) {
    gen.mode = GeneratorSpec::Mode::Sample;
    gen.n = std::stoll(mode.substr(7));
    report = estimate_measures(gen, cfg, policy);
  } else {
    std::cerr << "mode must be 'exact' or 'sample:<n>'\n";
    return 2;
  }
  std::cout << serialize_report(report) << "\n\n" << report_table(report);
  return 0;
}

int cmd_scenario(const std::string& name, std::uint64_t seed) {
  bool all_passed = true;
  if (name == "all") {
    for (const auto& n : scenario_names()) {
      ScenarioReport r = run_scenario(n, seed);
      std::cout << format_report(r);
      all_passed = all_passed && r.passed;
    }
  } else {
    ScenarioReport r = run_scenario(name, seed);
    std::cout << format_report(r);
    all_passed = r.passed;
  }
  return all_passed ? 0 : 1;
}

int cmd_policy_lint(const std::string& path) {
  PolicySystem p = parse_policy(read_file(path));  // parse_policy validates
  std::cout << "policy " << p.version << ": " << p.layers.size() << " layers, valid\n";
  for (const auto& layer : p.layers) {
    std::cout << "  " << layer.layer_id << " (" << to_string(layer.kind) << ")";
    if (layer.kind == LayerKind::Monitor)
      std::cout << ": deterministic, " << layer.monitor.transitions.size()
                << " transitions, all states have explicit defaults";
    std::cout << "\n";
  }
  return 0;
}

int cmd_ledger_verify(const std::string& path) {
  ChainVerification v = verify_ledger_file(path);
  if (v.ok) {
    std::cout << "ledger chain verified\n";
    return 0;
  }
  std::cout << "ledger chain BROKEN at seq " << *v.first_bad_seq << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace certification engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed = -1;
  app.add_option("--config", config_path, "certifier config (JSON or flat TOML)");
  app.add_option("--seed", seed, "override generator seed");

  std::string trace_path, policy_path, memory_path, out_path, cert_path, env_path,
      ledger_path, gen_path, mode = "exact", trace_hash, scenario_name;
  std::uint64_t entry_seq = 0;

  auto* certify_cmd = app.add_subcommand("certify", "certify a proposed trace");
  certify_cmd->add_option("--trace", trace_path)->required();
  certify_cmd->add_option("--policy", policy_path)->required();
  certify_cmd->add_option("--memory", memory_path, "prior events to fold into proof memory");
  certify_cmd->add_option("--out", out_path, "certificate output path");

  auto* execute_cmd = app.add_subcommand("execute", "execute a certified trace");
  execute_cmd->add_option("--trace", trace_path)->required();
  execute_cmd->add_option("--cert", cert_path)->required();
  execute_cmd->add_option("--policy", policy_path)->required();
  execute_cmd->add_option("--env", env_path)->required();
  execute_cmd->add_option("--ledger", ledger_path, "ndjson ledger to append to");

  auto* audit_cmd = app.add_subcommand("audit", "list ledger entries for a trace hash");
  audit_cmd->add_option("--ledger", ledger_path)->required();
  audit_cmd->add_option("--trace-hash", trace_hash)->required();

  auto* recert_cmd = app.add_subcommand("recertify", "re-evaluate a ledger entry");
  recert_cmd->add_option("--ledger", ledger_path)->required();
  recert_cmd->add_option("--entry", entry_seq)->required();
  recert_cmd->add_option("--policy", policy_path)->required();
  recert_cmd->add_option("--trace", trace_path)->required();

  auto* eval_cmd = app.add_subcommand("eval", "boundary measures for a generator");
  eval_cmd->add_option("--generator", gen_path)->required();
  eval_cmd->add_option("--policy", policy_path)->required();
  eval_cmd->add_option("--mode", mode, "exact or sample:<n>");

  auto* scenario_cmd = app.add_subcommand("scenario", "run packaged scenarios");
  auto* scenario_run = scenario_cmd->add_subcommand("run", "run one scenario or all");
  scenario_run->add_option("name", scenario_name)->required();

  auto* policy_cmd = app.add_subcommand("policy", "policy utilities");
  auto* lint_cmd = policy_cmd->add_subcommand("lint", "validate a policy file");
  std::string lint_path;
  lint_cmd->add_option("path", lint_path)->required();

  auto* ledger_cmd = app.add_subcommand("ledger", "ledger utilities");
  auto* verify_cmd = ledger_cmd->add_subcommand("verify", "verify a ledger chain");
  std::string verify_path;
  verify_cmd->add_option("path", verify_path)->required();

  // let --config / --seed appear after the subcommand as well
  for (auto* sub : app.get_subcommands(nullptr)) {
    sub->fallthrough();
    for (auto* nested : sub->get_subcommands(nullptr)) nested->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*certify_cmd)
      return cmd_certify(trace_path, policy_path, memory_path, config_path, out_path);
    if (*execute_cmd)
      return cmd_execute(trace_path, cert_path, policy_path, env_path, ledger_path);
    if (*audit_cmd) return cmd_audit(ledger_path, trace_hash);
    if (*recert_cmd) return cmd_recertify(ledger_path, entry_seq, policy_path, trace_path);
    if (*eval_cmd) return cmd_eval(gen_path, policy_path, config_path, mode, seed);
    if (*scenario_run)
      return cmd_scenario(scenario_name, seed < 0 ? 1 : static_cast<std::uint64_t>(seed));
    if (*lint_cmd) return cmd_policy_lint(lint_path);
    if (*verify_cmd) return cmd_ledger_verify(verify_path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  std::cerr << app.help();
  return 2;
}
