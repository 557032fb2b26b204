#include "certgate/generator.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

#include "certgate/errors.hpp"

namespace certgate {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::QueryBurst: return "QueryBurst";
    case TemplateKind::ExposureOrders: return "ExposureOrders";
    case TemplateKind::ApprovalFlow: return "ApprovalFlow";
    case TemplateKind::SourceRetrieval: return "SourceRetrieval";
    case TemplateKind::ComputeClaim: return "ComputeClaim";
  }
  return "?";
}

TemplateKind template_kind_from_string(const std::string& s) {
  if (s == "QueryBurst") return TemplateKind::QueryBurst;
  if (s == "ExposureOrders") return TemplateKind::ExposureOrders;
  if (s == "ApprovalFlow") return TemplateKind::ApprovalFlow;
  if (s == "SourceRetrieval") return TemplateKind::SourceRetrieval;
  if (s == "ComputeClaim") return TemplateKind::ComputeClaim;
  throw ParseError("unknown template kind: " + s);
}

void validate_generator(const GeneratorSpec& gen) {
  if (gen.templates.empty()) throw ValidationError("generator needs at least one template");
  std::int64_t sum = 0;
  for (const auto& t : gen.templates) {
    if (t.weight_ppm < 0 || t.weight_ppm > kPpm)
      throw ValidationError("template weight outside [0,1]");
    sum += t.weight_ppm;
  }
  if (sum != kPpm) throw ValidationError("template weights must sum to 1");
  for (const auto& [name, v] : gen.knobs_ppm)
    if (v < 0 || v > kPpm) throw ValidationError("knob '" + name + "' outside [0,1]");
  if (gen.horizon < 1) throw ValidationError("horizon must be positive");
  if (gen.n < 1) throw ValidationError("n must be positive");
}

namespace {

std::int64_t ppm_from_json(const json& v, const std::string& what) {
  if (v.is_number_integer()) {
    std::int64_t i = v.get<std::int64_t>();
    // integers 0 and 1 read as probabilities, anything else is invalid
    if (i == 0 || i == 1) return i * kPpm;
    throw ParseError(what + ": integer probability must be 0 or 1");
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    return static_cast<std::int64_t>(std::llround(d * kPpm));
  }
  throw ParseError(what + ": expected a number in [0,1]");
}

}  // namespace

GeneratorSpec parse_generator(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed generator file: ") + ex.what());
  }
  GeneratorSpec g;
  g.seed = j.value("seed", std::uint64_t{1});
  for (const auto& tj : j.at("templates"))
    g.templates.push_back(
        WeightedTemplate{template_kind_from_string(tj.at("template").get<std::string>()),
                         ppm_from_json(tj.at("weight"), "template weight")});
  if (j.contains("knobs"))
    for (auto it = j["knobs"].begin(); it != j["knobs"].end(); ++it)
      g.knobs_ppm[it.key()] = ppm_from_json(it.value(), "knob " + it.key());
  g.horizon = j.value("horizon", std::int64_t{7});
  std::string mode = j.value("mode", "sample");
  if (mode == "sample") g.mode = GeneratorSpec::Mode::Sample;
  else if (mode == "enumerate") g.mode = GeneratorSpec::Mode::Enumerate;
  else throw ParseError("unknown generator mode: " + mode);
  g.n = j.value("n", std::int64_t{1000});
  validate_generator(g);
  return g;
}

std::string serialize_generator(const GeneratorSpec& g) {
  ordered_json j;
  j["seed"] = g.seed;
  ordered_json ts = ordered_json::array();
  for (const auto& t : g.templates)
    ts.push_back(ordered_json{{"template", to_string(t.kind)},
                              {"weight", static_cast<double>(t.weight_ppm) / kPpm}});
  j["templates"] = ts;
  ordered_json ks = ordered_json::object();
  for (const auto& [k, v] : g.knobs_ppm) ks[k] = static_cast<double>(v) / kPpm;
  j["knobs"] = ks;
  j["horizon"] = g.horizon;
  j["mode"] = g.mode == GeneratorSpec::Mode::Sample ? "sample" : "enumerate";
  j["n"] = g.n;
  return j.dump();
}

// ---- template trace families ---------------------------------------------

namespace {

std::int64_t knob(const GeneratorSpec& gen, const std::string& name) {
  auto it = gen.knobs_ppm.find(name);
  return it == gen.knobs_ppm.end() ? 0 : it->second;
}

ProposedTrace base_trace(std::string id, const std::string& version) {
  ProposedTrace t;
  t.trace_id = std::move(id);
  t.proposer_id = "agent_a";
  t.task = "generated";
  t.declared_tier = Tier::C1;
  t.requested_policy_version = version;
  return t;
}

ProposedTrace query_burst(std::int64_t len, const std::string& version) {
  ProposedTrace t = base_trace("qb" + std::to_string(len), version);
  for (std::int64_t i = 1; i <= len; ++i) {
    TraceEvent e;
    e.event_id = "q" + std::to_string(i);
    e.tick = i;
    e.kind = EventKind::Query;
    e.principal = "agent_a";
    e.component = "retriever";
    e.resource = "records_db";
    e.params["q"] = std::string("lookup");
    t.events.push_back(std::move(e));
  }
  return t;
}

ProposedTrace exposure_orders(std::int64_t k, const std::string& version) {
  ProposedTrace t = base_trace("ord" + std::to_string(k), version);
  for (std::int64_t i = 1; i <= k; ++i) {
    TraceEvent e;
    e.event_id = "o" + std::to_string(i);
    e.tick = i;
    e.kind = EventKind::ToolCall;
    e.principal = "trader_a";
    e.component = "exec";
    e.resource = "book";
    e.params["tool"] = std::string("place_order");
    e.quantity_deltas["exposure_bp"] = 1000;
    t.events.push_back(std::move(e));
  }
  return t;
}

ProposedTrace approval_flow(bool approved, const std::string& version) {
  ProposedTrace t = base_trace(approved ? "apf1" : "apf0", version);
  if (approved) {
    TraceEvent a;
    a.event_id = "ap1";
    a.tick = 1;
    a.kind = EventKind::Approval;
    a.principal = "officer_k";
    a.component = "approvals";
    t.events.push_back(std::move(a));
  }
  TraceEvent x;
  x.event_id = "t1";
  x.tick = 2;
  x.kind = EventKind::ToolCall;
  x.principal = "agent_a";
  x.component = "exec";
  x.resource = "accounts";
  x.params["tool"] = std::string("transfer");
  x.irreversible = true;
  t.events.push_back(std::move(x));
  return t;
}

ProposedTrace source_retrieval(bool vetted, const std::string& version) {
  ProposedTrace t = base_trace(vetted ? "src1" : "src0", version);
  TraceEvent r;
  r.event_id = "r1";
  r.tick = 1;
  r.kind = EventKind::Retrieval;
  r.principal = "agent_a";
  r.component = vetted ? "vetted_feed" : "unvetted_feed";
  r.resource = "feed";
  r.data_class = "market_data";
  r.purpose = "analysis";
  r.params["payload"] = std::string("px=101");
  t.events.push_back(std::move(r));
  TraceEvent c;
  c.event_id = "cl1";
  c.tick = 2;
  c.kind = EventKind::Claim;
  c.principal = "agent_a";
  c.component = "reporter";
  c.purpose = "analysis";
  c.evidence_refs = {"r1"};
  c.params["text"] = std::string("price confirmed");
  t.events.push_back(std::move(c));
  return t;
}

ProposedTrace compute_claim(bool good, const std::string& version) {
  ProposedTrace t = base_trace(good ? "cmp1" : "cmp0", version);
  TraceEvent c;
  c.event_id = "c1";
  c.tick = 1;
  c.kind = EventKind::Computation;
  c.principal = "agent_a";
  c.component = "calc";
  c.params["expr"] = std::string("6*7");
  c.params["value"] = std::int64_t{good ? 42 : 41};
  t.events.push_back(std::move(c));
  TraceEvent m;
  m.event_id = "cl1";
  m.tick = 2;
  m.kind = EventKind::Claim;
  m.principal = "agent_a";
  m.component = "reporter";
  m.evidence_refs = {"c1"};
  m.params["text"] = std::string("result reported");
  t.events.push_back(std::move(m));
  return t;
}

void add_template_variants(const GeneratorSpec& gen, TemplateKind kind,
                           const Rational& weight, const std::string& version,
                           std::vector<WeightedTrace>& out) {
  switch (kind) {
    case TemplateKind::QueryBurst: {
      Rational p(knob(gen, "p_over_budget"), kPpm);
      std::int64_t max_len = gen.horizon;
      std::vector<std::int64_t> under, over;
      for (std::int64_t l = 1; l <= std::min<std::int64_t>(5, max_len); ++l)
        under.push_back(l);
      for (std::int64_t l = 6; l <= max_len; ++l) over.push_back(l);
      if (over.empty()) p = 0;  // budget cannot be exceeded within the horizon
      for (std::int64_t l : under)
        out.push_back({weight * (1 - p) / std::int64_t(under.size()),
                       query_burst(l, version)});
      for (std::int64_t l : over)
        out.push_back({weight * p / std::int64_t(over.size()), query_burst(l, version)});
      break;
    }
    case TemplateKind::ExposureOrders: {
      Rational p(knob(gen, "p_over_exposure"), kPpm);
      out.push_back({weight * (1 - p) / 2, exposure_orders(1, version)});
      out.push_back({weight * (1 - p) / 2, exposure_orders(2, version)});
      out.push_back({weight * p, exposure_orders(3, version)});
      break;
    }
    case TemplateKind::ApprovalFlow: {
      Rational p(knob(gen, "p_missing_approval"), kPpm);
      out.push_back({weight * (1 - p), approval_flow(true, version)});
      out.push_back({weight * p, approval_flow(false, version)});
      break;
    }
    case TemplateKind::SourceRetrieval: {
      Rational p(knob(gen, "p_unauthorized_source"), kPpm);
      out.push_back({weight * (1 - p), source_retrieval(true, version)});
      out.push_back({weight * p, source_retrieval(false, version)});
      break;
    }
    case TemplateKind::ComputeClaim: {
      Rational p(knob(gen, "p_bad_compute"), kPpm);
      out.push_back({weight * (1 - p), compute_claim(true, version)});
      out.push_back({weight * p, compute_claim(false, version)});
      break;
    }
  }
}

}  // namespace

std::vector<WeightedTrace> enumerate_universe(const GeneratorSpec& gen,
                                              const std::string& policy_version) {
  validate_generator(gen);
  std::vector<WeightedTrace> out;
  for (const auto& wt : gen.templates)
    add_template_variants(gen, wt.kind, Rational(wt.weight_ppm, kPpm), policy_version, out);
  const std::int64_t hard_limit = 1'000'000;
  std::int64_t cap =
      gen.mode == GeneratorSpec::Mode::Enumerate ? std::min(gen.n, hard_limit) : hard_limit;
  if (static_cast<std::int64_t>(out.size()) > cap)
    throw UniverseTooLarge("universe has " + std::to_string(out.size()) +
                           " traces, cap is " + std::to_string(cap));
  // zero-mass variants stay in the support list; they never sample and
  // carry no mass in exact aggregation
  return out;
}

TraceSampler::TraceSampler(const GeneratorSpec& gen, const std::string& policy_version)
    : support_(enumerate_universe(gen, policy_version)), rng_(gen.seed) {
  Rational acc = 0;
  for (const auto& wt : support_) {
    acc += wt.probability;
    cumulative_.push_back(acc);
  }
}

const ProposedTrace& TraceSampler::next() {
  // u uniform on [0,1) as an exact rational; thresholds are exact, so the
  // sampler's cell probabilities match the enumeration bit-for-bit
  Rational u{std::uint64_t{rng_()}};
  u /= Rational(std::numeric_limits<std::uint64_t>::max()) + 1;
  for (std::size_t i = 0; i < cumulative_.size(); ++i)
    if (u < cumulative_[i]) return support_[i].trace;
  return support_.back().trace;
}

PolicySystem standard_oracle_policy(const std::string& version) {
  PolicySystem p;
  p.version = version;
  p.source = "risk-desk";
  p.effective_from = 0;

  PolicyLayer budget;
  budget.layer_id = "query_budget";
  budget.kind = LayerKind::Counter;
  budget.tier = Tier::C1;
  budget.description = "at most 5 queries per principal and resource per 100 ticks";
  budget.counter.counters.push_back(CounterDef{"q_count", 100, 5});
  CounterUpdate qu;
  qu.when.kind = EventKind::Query;
  qu.counter = "q_count";
  qu.const_delta = 1;
  budget.counter.updates.push_back(qu);
  p.layers.push_back(budget);

  PolicyLayer exposure;
  exposure.layer_id = "exposure_limit";
  exposure.kind = LayerKind::Counter;
  exposure.tier = Tier::C2;
  exposure.description = "cumulative order exposure capped at 2000 bp";
  exposure.counter.counters.push_back(CounterDef{"exposure", std::nullopt, 2000});
  CounterUpdate eu;
  eu.when.kind = EventKind::ToolCall;
  eu.when.param_equals["tool"] = std::string("place_order");
  eu.counter = "exposure";
  eu.from_quantity = "exposure_bp";
  exposure.counter.updates.push_back(eu);
  p.layers.push_back(exposure);

  PolicyLayer precedence;
  precedence.layer_id = "approval_before_transfer";
  precedence.kind = LayerKind::Temporal;
  precedence.tier = Tier::C2;
  precedence.description = "transfers require a prior approval event";
  precedence.temporal.pattern = TemporalPattern::Precedence;
  precedence.temporal.a.kind = EventKind::Approval;
  precedence.temporal.b.kind = EventKind::ToolCall;
  precedence.temporal.b.param_equals["tool"] = std::string("transfer");
  p.layers.push_back(precedence);

  PolicyLayer flow;
  flow.layer_id = "vetted_sources";
  flow.kind = LayerKind::InfoFlow;
  flow.tier = Tier::C1;
  flow.description = "market data only from the vetted feed; claims need evidence";
  flow.infoflow.auth_table.push_back(AuthTuple{"*", "vetted_feed", "market_data", "*"});
  flow.infoflow.purpose_binding = true;
  p.layers.push_back(flow);

  validate_policy(p);
  return p;
}

}  // namespace certgate
