#pragma once

#include <stdexcept>
#include <string>

namespace certgate {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invariant violated; the message names the offending field.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NondeterministicMonitor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateLayerId : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeRegression : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapabilityDenied : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownFact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PolicyVersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MemoryUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoCertificate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StaleCertificate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UniverseTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownScenario : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace certgate
