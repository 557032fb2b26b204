#pragma once

#include <functional>
#include <string>
#include <vector>

#include "certgate/certifier.hpp"
#include "certgate/generator.hpp"
#include "certgate/memory.hpp"
#include "certgate/policy.hpp"

namespace certgate {

using MemoryFactory = std::function<MemoryState(const PolicySystem&)>;

MemoryFactory fresh_memory_factory();

// One boundary measure. Exact mode: `value` is an exact rational and the
// half-width is 0. Sample mode: `value` is the sample proportion and the
// half-width is a 95% Wilson interval. Undefined measures (rho with y=0,
// recall with gap=1) are reported, never thrown.
struct Measure {
  Rational value = 0;
  bool defined = true;
  double ci_halfwidth = 0.0;
};

struct BoundaryReport {
  std::int64_t n = 0;  // sample count or universe size
  bool exact = false;
  Measure gap;     // generated impermissible mass
  Measure u;       // certified but impermissible
  Measure m;       // permissible but not certified
  Measure y;       // certified mass (executable yield)
  Measure rho;     // u / y
  Measure recall;  // 1 - m / (1 - gap)
  Measure d;       // u + m
  Rational identity_residual = 0;  // |y - (1 - gap - m + u)|
};

std::string serialize_report(const BoundaryReport& r);
std::string report_table(const BoundaryReport& r);

// Monte Carlo estimate over n sampled traces. Each trace is certified
// against a fresh memory state and judged by the oracle policy.
BoundaryReport estimate_measures(const GeneratorSpec& gen, const CertifierConfig& cfg,
                                 const PolicySystem& oracle,
                                 const MemoryFactory& memory = fresh_memory_factory());

// Exact enumeration with rational arithmetic. Brute-force oracle for every
// measure the sampler estimates.
BoundaryReport exact_measures(const GeneratorSpec& gen, const CertifierConfig& cfg,
                              const PolicySystem& oracle,
                              const MemoryFactory& memory = fresh_memory_factory());

// Mass of traces certified under `old_policy` that the `new_policy` oracle
// no longer permits. Exact over the enumerated universe in Enumerate mode,
// a sample fraction otherwise.
Rational drift_eval(const GeneratorSpec& gen, const CertifierConfig& cfg,
                    const PolicySystem& old_policy, const PolicySystem& new_policy,
                    const MemoryFactory& memory = fresh_memory_factory());

// Same drift measure over an explicit certified set with per-trace mass.
Rational drift_eval(const std::vector<WeightedTrace>& certified_under_old,
                    const PolicySystem& new_policy);

}  // namespace certgate
