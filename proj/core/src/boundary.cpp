#include "certgate/boundary.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "certgate/errors.hpp"

namespace certgate {

using nlohmann::ordered_json;

MemoryFactory fresh_memory_factory() {
  return [](const PolicySystem& policy) { return init_memory(policy); };
}

namespace {

bool is_certified(const ProposedTrace& trace, const CertifierConfig& cfg,
                  const PolicySystem& oracle, const MemoryFactory& memory) {
  Verdict v = certify(trace, oracle, memory(oracle), cfg);
  return v.outcome == Verdict::Outcome::Certified;
}

double wilson_halfwidth(double phat, double n) {
  if (n <= 0) return 0.0;
  const double z = 1.959963984540054;  // 95%
  const double z2 = z * z;
  return z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

// Four-cell masses: the partition of generated mass by
// (permissible, certified).
struct Cells {
  Rational perm_cert = 0;
  Rational perm_uncert = 0;
  Rational imp_cert = 0;
  Rational imp_uncert = 0;
};

BoundaryReport report_from_cells(const Cells& c, std::int64_t n, bool exact) {
  BoundaryReport r;
  r.n = n;
  r.exact = exact;
  const Rational total = c.perm_cert + c.perm_uncert + c.imp_cert + c.imp_uncert;
  auto frac = [&](const Rational& x) { return total == 0 ? Rational(0) : x / total; };

  r.gap.value = frac(c.imp_cert + c.imp_uncert);
  r.u.value = frac(c.imp_cert);
  r.m.value = frac(c.perm_uncert);
  r.y.value = frac(c.perm_cert + c.imp_cert);
  r.d.value = r.u.value + r.m.value;

  if (r.y.value > 0) {
    r.rho.value = r.u.value / r.y.value;
  } else {
    r.rho.defined = false;
  }
  if (r.gap.value < 1) {
    r.recall.value = 1 - r.m.value / (1 - r.gap.value);
  } else {
    r.recall.defined = false;
  }
  Rational residual = r.y.value - (1 - r.gap.value - r.m.value + r.u.value);
  r.identity_residual = residual < 0 ? Rational(-residual) : residual;

  if (!exact) {
    double dn = static_cast<double>(n);
    auto hw = [&](Measure& mm) {
      mm.ci_halfwidth = wilson_halfwidth(static_cast<double>(mm.value), dn);
    };
    hw(r.gap);
    hw(r.u);
    hw(r.m);
    hw(r.y);
    hw(r.d);
    if (r.rho.defined) hw(r.rho);
    if (r.recall.defined) hw(r.recall);
  }
  return r;
}

}  // namespace

BoundaryReport estimate_measures(const GeneratorSpec& gen, const CertifierConfig& cfg,
                                 const PolicySystem& oracle, const MemoryFactory& memory) {
  if (gen.mode != GeneratorSpec::Mode::Sample)
    throw ValidationError("estimate_measures needs a Sample-mode generator");
  TraceSampler sampler(gen, oracle.version);
  // distinct traces repeat constantly; memoize the two verdict bits per id
  std::map<std::string, std::pair<bool, bool>> seen;
  Cells c;
  for (std::int64_t i = 0; i < gen.n; ++i) {
    const ProposedTrace& t = sampler.next();
    auto it = seen.find(t.trace_id);
    if (it == seen.end()) {
      bool perm = evaluate(oracle, t).permitted;
      bool cert = is_certified(t, cfg, oracle, memory);
      it = seen.emplace(t.trace_id, std::make_pair(perm, cert)).first;
    }
    auto [perm, cert] = it->second;
    if (perm && cert) c.perm_cert += 1;
    else if (perm) c.perm_uncert += 1;
    else if (cert) c.imp_cert += 1;
    else c.imp_uncert += 1;
  }
  return report_from_cells(c, gen.n, false);
}

BoundaryReport exact_measures(const GeneratorSpec& gen, const CertifierConfig& cfg,
                              const PolicySystem& oracle, const MemoryFactory& memory) {
  auto universe = enumerate_universe(gen, oracle.version);
  Cells c;
  for (const auto& wt : universe) {
    if (wt.probability == 0) continue;
    bool perm = evaluate(oracle, wt.trace).permitted;
    bool cert = is_certified(wt.trace, cfg, oracle, memory);
    if (perm && cert) c.perm_cert += wt.probability;
    else if (perm) c.perm_uncert += wt.probability;
    else if (cert) c.imp_cert += wt.probability;
    else c.imp_uncert += wt.probability;
  }
  return report_from_cells(c, static_cast<std::int64_t>(universe.size()), true);
}

Rational drift_eval(const GeneratorSpec& gen, const CertifierConfig& cfg,
                    const PolicySystem& old_policy, const PolicySystem& new_policy,
                    const MemoryFactory& memory) {
  if (gen.mode == GeneratorSpec::Mode::Enumerate) {
    std::vector<WeightedTrace> certified;
    for (const auto& wt : enumerate_universe(gen, old_policy.version))
      if (wt.probability != 0 && is_certified(wt.trace, cfg, old_policy, memory))
        certified.push_back(wt);
    return drift_eval(certified, new_policy);
  }
  TraceSampler sampler(gen, old_policy.version);
  std::map<std::string, bool> drifted;  // certified-under-old and now impermissible
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < gen.n; ++i) {
    const ProposedTrace& t = sampler.next();
    auto it = drifted.find(t.trace_id);
    if (it == drifted.end()) {
      bool v = is_certified(t, cfg, old_policy, memory) &&
               !evaluate(new_policy, t).permitted;
      it = drifted.emplace(t.trace_id, v).first;
    }
    if (it->second) ++hits;
  }
  return Rational(hits, gen.n);
}

Rational drift_eval(const std::vector<WeightedTrace>& certified_under_old,
                    const PolicySystem& new_policy) {
  Rational d = 0;
  for (const auto& wt : certified_under_old)
    if (!evaluate(new_policy, wt.trace).permitted) d += wt.probability;
  return d;
}

// ---- reporting -----------------------------------------------------------

namespace {

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

ordered_json measure_json(const Measure& m, bool exact) {
  ordered_json j;
  if (!m.defined) {
    j["defined"] = false;
    return j;
  }
  j["defined"] = true;
  j["value"] = static_cast<double>(m.value);
  if (exact) j["exact"] = rational_string(m.value);
  else j["ci95_halfwidth"] = m.ci_halfwidth;
  return j;
}

}  // namespace

std::string serialize_report(const BoundaryReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["mode"] = r.exact ? "exact" : "sample";
  j["gap"] = measure_json(r.gap, r.exact);
  j["u"] = measure_json(r.u, r.exact);
  j["m"] = measure_json(r.m, r.exact);
  j["y"] = measure_json(r.y, r.exact);
  j["rho"] = measure_json(r.rho, r.exact);
  j["recall"] = measure_json(r.recall, r.exact);
  j["d"] = measure_json(r.d, r.exact);
  j["identity_residual"] = rational_string(r.identity_residual);
  return j.dump();
}

std::string report_table(const BoundaryReport& r) {
  std::ostringstream os;
  os << "measure   value        " << (r.exact ? "exact" : "ci95 halfwidth") << "\n";
  auto row = [&](const char* name, const Measure& m) {
    os << name;
    for (std::size_t i = std::string(name).size(); i < 10; ++i) os << ' ';
    if (!m.defined) {
      os << "undefined\n";
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-12.6f ", static_cast<double>(m.value));
    os << buf;
    if (r.exact) os << rational_string(m.value);
    else {
      std::snprintf(buf, sizeof buf, "%.6f", m.ci_halfwidth);
      os << buf;
    }
    os << "\n";
  };
  row("gap", r.gap);
  row("u", r.u);
  row("m", r.m);
  row("y", r.y);
  row("rho", r.rho);
  row("recall", r.recall);
  row("d", r.d);
  os << "identity_residual " << rational_string(r.identity_residual) << "\n";
  os << "n " << r.n << (r.exact ? " (universe)" : " (samples)") << "\n";
  return os.str();
}

}  // namespace certgate
