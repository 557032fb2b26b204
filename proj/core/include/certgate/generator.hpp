#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "certgate/policy.hpp"
#include "certgate/trace.hpp"

namespace certgate {

using Rational = boost::multiprecision::cpp_rational;

// Probability knobs are parts-per-million integers so every trace mass is
// an exact rational and enumeration sums to exactly 1.
inline constexpr std::int64_t kPpm = 1'000'000;

enum class TemplateKind {
  QueryBurst,       // repeated queries against one resource, budget-sensitive
  ExposureOrders,   // orders accumulating exposure against a cumulative limit
  ApprovalFlow,     // irreversible transfer with or without a prior approval
  SourceRetrieval,  // retrieval from a vetted or unvetted feed plus a claim
  ComputeClaim,     // computation event whose claimed value may be wrong
};

const char* to_string(TemplateKind k);
TemplateKind template_kind_from_string(const std::string& s);

struct WeightedTemplate {
  TemplateKind kind = TemplateKind::QueryBurst;
  std::int64_t weight_ppm = 0;
};

struct GeneratorSpec {
  std::uint64_t seed = 1;
  std::vector<WeightedTemplate> templates;  // weights sum to kPpm
  // p_over_budget, p_over_exposure, p_missing_approval,
  // p_unauthorized_source, p_bad_compute; each in [0, kPpm].
  std::map<std::string, std::int64_t> knobs_ppm;
  std::int64_t horizon = 7;  // max events per trace
  enum class Mode { Sample, Enumerate } mode = Mode::Sample;
  // Sample: number of draws. Enumerate: declared universe-size cap.
  std::int64_t n = 1000;
};

void validate_generator(const GeneratorSpec& gen);
GeneratorSpec parse_generator(const std::string& bytes);
std::string serialize_generator(const GeneratorSpec& gen);

struct WeightedTrace {
  Rational probability;
  ProposedTrace trace;
};

// The full support of the generator distribution with exact probabilities.
// Probabilities sum to exactly 1. Throws UniverseTooLarge past the
// declared cap (Enumerate mode) or the 10^6 hard limit.
std::vector<WeightedTrace> enumerate_universe(const GeneratorSpec& gen,
                                              const std::string& policy_version);

// Deterministic sampler over the same support: identical seeds yield
// identical trace streams.
class TraceSampler {
 public:
  TraceSampler(const GeneratorSpec& gen, const std::string& policy_version);

  const ProposedTrace& next();

 private:
  std::vector<WeightedTrace> support_;
  std::vector<Rational> cumulative_;
  std::mt19937_64 rng_;
};

// Oracle policy the templates are written against: query budget 5 per
// 100-tick window, cumulative exposure limit 2000 bp, approval-precedes-
// transfer, and a vetted-feed allow list with purpose binding.
PolicySystem standard_oracle_policy(const std::string& version);

}  // namespace certgate
