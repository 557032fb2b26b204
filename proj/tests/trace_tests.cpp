#include <doctest.h>

#include <random>

#include "certgate/errors.hpp"
#include "certgate/trace.hpp"
#include "helpers.hpp"

using namespace certgate;
using certgate::testing::random_trace;

namespace {

ProposedTrace exposure_fixture() {
  ProposedTrace t;
  t.trace_id = "orders3";
  t.proposer_id = "trader_a";
  t.task = "stacked orders";
  t.declared_tier = Tier::C2;
  t.requested_policy_version = "exp-1";
  for (std::int64_t i = 1; i <= 3; ++i) {
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

}  // namespace

TEST_CASE("serialization round-trips and canonical form is stable") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    ProposedTrace t = random_trace(rng, "v1");
    ProposedTrace back = parse_trace(serialize_trace(t));
    CHECK(back == t);
    CHECK(canonical_serialize(back) == canonical_serialize(t));
    CHECK(canonical_hash(back) == canonical_hash(t));
  }
}

TEST_CASE("golden digest of the stacked-orders fixture") {
  // frozen once; any serialization change must be deliberate
  CHECK(to_hex(canonical_hash(exposure_fixture())) ==
        "99d3c93e7f3812fc6fb7cdfa8e38c789c63bed991f8c09ad9b8bcfaf8e0b17f6");
}

TEST_CASE("hash binding: single-field mutations always change the hash") {
  std::mt19937_64 rng(7);
  int collisions = 0;
  for (int i = 0; i < 10000; ++i) {
    ProposedTrace t = random_trace(rng, "v1");
    ProposedTrace m = t;
    switch (rng() % 6) {
      case 0: m.trace_id += "x"; break;
      case 1: m.proposer_id += "x"; break;
      case 2: m.task += "!"; break;
      case 3: m.requested_policy_version += "x"; break;
      case 4: {
        TraceEvent& e = m.events[rng() % m.events.size()];
        e.principal += "x";
        break;
      }
      default: {
        TraceEvent& e = m.events[rng() % m.events.size()];
        e.tick += 1;
        break;
      }
    }
    if (canonical_hash(m) == canonical_hash(t)) ++collisions;
  }
  CHECK(collisions == 0);
}

TEST_CASE("prefix is monotone and bounded") {
  std::mt19937_64 rng(3);
  ProposedTrace t = random_trace(rng, "v1");
  for (std::size_t n = 0; n <= t.events.size(); ++n) {
    ProposedTrace p = prefix(t, n);
    CHECK(p.events.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(p.events[i] == t.events[i]);
  }
  CHECK_THROWS_AS(prefix(t, t.events.size() + 1), OutOfRange);
}

TEST_CASE("validation rejects malformed traces") {
  ProposedTrace t = exposure_fixture();

  SUBCASE("duplicate event ids") {
    t.events[1].event_id = t.events[0].event_id;
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("decreasing ticks") {
    t.events[2].tick = 0;
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("forward evidence reference") {
    t.events[0].evidence_refs.push_back("o3");
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("observation slot with a fixed value") {
    t.events[2].observation_slot = true;
    t.events[2].params["constraint"] = std::string("any");
    t.events[2].params["value"] = std::int64_t{5};
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("observation slot without a constraint") {
    t.events[2].observation_slot = true;
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("empty trace") {
    t.events.clear();
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
}

TEST_CASE("slot constraints parse and decide membership") {
  CHECK(SlotConstraint::parse("any").satisfied_by(-100));
  SlotConstraint eq = SlotConstraint::parse("eq:7");
  CHECK(eq.satisfied_by(7));
  CHECK(!eq.satisfied_by(8));
  CHECK(eq.pins_value());
  SlotConstraint r = SlotConstraint::parse("range:10:20");
  CHECK(r.satisfied_by(10));
  CHECK(r.satisfied_by(20));
  CHECK(!r.satisfied_by(9));
  CHECK(!r.satisfied_by(21));
  CHECK(!r.pins_value());
  CHECK_THROWS_AS(SlotConstraint::parse("range:20:10"), ParseError);
  CHECK_THROWS_AS(SlotConstraint::parse("weird"), ParseError);
}

TEST_CASE("basis-point scalars survive the JSON round trip exactly") {
  ProposedTrace t = exposure_fixture();
  t.events[0].params["px"] = ScaledDecimal{1010000};
  ProposedTrace back = parse_trace(serialize_trace(t));
  CHECK(std::get<ScaledDecimal>(back.events[0].params.at("px")).bp == 1010000);
}
