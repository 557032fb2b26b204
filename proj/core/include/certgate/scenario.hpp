#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "certgate/policy.hpp"

namespace certgate {

struct ScenarioReport {
  std::string name;
  bool passed = true;
  // One line per expectation, "ok: ..." or "FAIL: ...". Deterministic for
  // a fixed seed, byte for byte.
  std::vector<std::string> checks;
};

const std::vector<std::string>& scenario_names();

// Throws UnknownScenario for names outside the registry.
ScenarioReport run_scenario(const std::string& name, std::uint64_t seed = 1);

std::string format_report(const ScenarioReport& r);

// Four-layer reference policy: spoofing monitor, exposure counter,
// approval precedence, vetted-source info flow.
PolicySystem layered_finance_policy(const std::string& version);

}  // namespace certgate
