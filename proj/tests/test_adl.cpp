#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "qparch/adl/parser.hpp"
#include "qparch/adl/printer.hpp"
#include "qparch/adl/resolve.hpp"
#include "qparch/adl/validate.hpp"
#include "qparch/sim/rng.hpp"
#include "support/test_util.hpp"

using namespace qparch;
using namespace qparch::adl;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(QPARCH_FIXTURES_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kThermostatExcerpt = R"(basic_rate : duration 50msec

thermometer_data : topic { FIELDS temp : float32 75 }
thermostat_button : topic { FIELDS status : bool true }
thermostat_set : topic { FIELDS temp : float32 75 }

thermostat_data : topic { FIELDS switch_on : bool true }

thermostat : node {
  SUBSCRIBES
    thermometer_temp { TOPIC thermometer_data MAXLATENCY 1msec }
    thermostat_switch { TOPIC thermostat_button MAXLATENCY 1msec }
    thermostat_set_temp { TOPIC thermostat_set MAXLATENCY 1msec }
  PUBLISHES
    heater_switch { TOPIC thermostat_data }
  PATH "src"
  CXX
    { HEADER "thermostat.h" FILENAME "thermostat.cpp" CLASS "Thermostat" }
  PERIOD basic_rate
}
)";

}  // namespace

TEST_CASE("thermostat excerpt parses with resolved periods and latencies") {
  auto result = parse_architecture(kThermostatExcerpt, "house");
  REQUIRE(result.ok());
  const ArchitectureSpec& spec = *result.spec;
  CHECK(spec.module_name == "house");
  CHECK(spec.topics.size() == 4);
  REQUIRE(spec.nodes.size() == 1);

  const NodeSpec& node = spec.nodes[0];
  CHECK(node.name == "thermostat");
  CHECK(node.period_min == 50000);
  CHECK(node.period_max == 50000);
  REQUIRE(node.subscriptions.size() == 3);
  for (const auto& sub : node.subscriptions) {
    CHECK(sub.max_latency == 1000);
    CHECK(sub.buffer_capacity == 1);
  }
  REQUIRE(node.publications.size() == 1);
  CHECK(node.publications[0].topic == "thermostat_data");
  CHECK(node.step_binding.size() == 2);  // PATH and CXX preserved

  const TopicSpec* t = spec.topic("thermometer_data");
  REQUIRE(t);
  REQUIRE(t->fields.size() == 1);
  CHECK(t->fields[0].type == FormatType::Float32);
  CHECK(t->fields[0].default_value.kind == Literal::Kind::Float);
  CHECK(t->fields[0].default_value.float_value == 75.0);
}

TEST_CASE("empty source gives an empty module") {
  auto result = parse_architecture("", "empty");
  REQUIRE(result.ok());
  CHECK(result.spec->topics.empty());
  CHECK(result.spec->nodes.empty());
  CHECK(result.spec->extras.empty());
  CHECK_FALSE(result.spec->plant.has_value());
}

TEST_CASE("dangling alias is a parse diagnostic") {
  auto result = parse_architecture("x = y\n", "m");
  CHECK_FALSE(result.ok());
  bool mentions = false;
  for (const auto& d : result.diagnostics)
    if (d.message.find("y") != std::string::npos) mentions = true;
  CHECK(mentions);
}

TEST_CASE("malformed duration literal reports line and column") {
  auto result = parse_architecture("rate : duration 50ms\n", "m");
  CHECK_FALSE(result.ok());
  REQUIRE_FALSE(result.diagnostics.empty());
  CHECK(result.diagnostics[0].pos.line == 1);
  CHECK(result.diagnostics[0].message.find("duration") != std::string::npos);
}

TEST_CASE("syntax error carries a position") {
  auto result = parse_architecture("t : topic { FIELDS }\n", "m");
  CHECK_FALSE(result.ok());
  REQUIRE_FALSE(result.diagnostics.empty());
  CHECK(result.diagnostics[0].pos.line == 1);
}

TEST_CASE("period ranges and queue extension parse") {
  const char* src =
      "t : topic { FIELDS v : int32 0 }\n"
      "n : node { PUBLISHES p { TOPIC t } PERIOD 40msec .. 60msec }\n"
      "m : node { SUBSCRIBES s { TOPIC t MAXLATENCY 5msec QUEUE 3 } PERIOD 50msec }\n";
  auto result = parse_architecture(src, "m");
  REQUIRE(result.ok());
  CHECK(result.spec->nodes[0].period_min == 40000);
  CHECK(result.spec->nodes[0].period_max == 60000);
  CHECK(result.spec->nodes[1].subscriptions[0].buffer_capacity == 3);
}

TEST_CASE("plant with nested virtual machines flattens to machine assignments") {
  const char* src = R"(
t : topic { FIELDS v : int32 0 }
heater : node { PUBLISHES p { TOPIC t } PERIOD 50msec }
thermostat : node { SUBSCRIBES s { TOPIC t MAXLATENCY 1msec } PERIOD 50msec }

sys1 : linux {
  IP 192.168.1.201
  NODES heater
}
sys2 : linux {
  IP 192.168.1.202
  NODES thermostat
}

plant : plant {
  MACHINES
    house_heater { OS sys1 }
    house_computer {
      OS l1 : lynxsecure {
        VMS
          vm1 { OS sys2 }
      }
    }
}
)";
  auto result = parse_architecture(src, "m");
  REQUIRE(result.ok());
  REQUIRE(result.spec->plant.has_value());
  const PlantSpec& plant = *result.spec->plant;
  REQUIRE(plant.machines.size() == 2);
  CHECK(plant.machines[0].os_kind == "linux");
  CHECK(plant.machines[0].address == "192.168.1.201");
  REQUIRE(plant.machines[0].nodes.size() == 1);
  CHECK(plant.machines[0].nodes[0] == "heater");
  CHECK(plant.machines[1].os_kind == "lynxsecure");
  REQUIRE(plant.machines[1].nodes.size() == 1);
  CHECK(plant.machines[1].nodes[0] == "thermostat");
}

TEST_CASE("class inference picks the unique admitting class") {
  auto result = parse_architecture("t { FIELDS v : int32 0 }\n", "m");
  REQUIRE(result.ok());
  CHECK(result.spec->topics.size() == 1);

  // an empty body admits several classes: rejected, never guessed
  auto ambiguous = parse_architecture("x { }\n", "m");
  CHECK_FALSE(ambiguous.ok());
}

TEST_CASE("parse determinism: identical bytes give equal specs") {
  auto a = parse_architecture(kThermostatExcerpt, "house");
  auto b = parse_architecture(kThermostatExcerpt, "house");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(*a.spec == *b.spec);
}

TEST_CASE("round trip on fixtures: print-parse-print is identity") {
  for (const char* name : {"thermostat.radl", "afs.radl", "plant_demo.radl"}) {
    CAPTURE(name);
    std::string source = read_fixture(name);
    auto first = parse_architecture(source, "m");
    REQUIRE(first.ok());
    std::string printed = pretty_print(*first.spec);
    auto second = parse_architecture(printed, "m");
    REQUIRE(second.ok());
    CHECK(*first.spec == *second.spec);
    CHECK(pretty_print(*second.spec) == printed);
  }
}

TEST_CASE("pretty print preserves opaque step bindings verbatim") {
  auto result = parse_architecture(kThermostatExcerpt, "house");
  REQUIRE(result.ok());
  std::string printed = pretty_print(*result.spec);
  CHECK(printed.find("PATH \"src\"") != std::string::npos);
  CHECK(printed.find("\"thermostat.cpp\"") != std::string::npos);
  CHECK(printed.find("basic_rate : duration 50msec") != std::string::npos);
}

// ---------------------------------------------------------------------------

TEST_CASE("validate: thermostat fixture is clean") {
  auto spec = testing::parse_or_die(read_fixture("thermostat.radl"));
  auto report = validate(spec);
  CHECK(report.empty());
}

TEST_CASE("validate: two publishers of one topic") {
  const char* src =
      "t : topic { FIELDS v : int32 0 }\n"
      "a : node { PUBLISHES p { TOPIC t } PERIOD 50msec }\n"
      "b : node { PUBLISHES p { TOPIC t } PERIOD 50msec }\n";
  auto report = validate(testing::parse_or_die(src));
  REQUIRE_FALSE(report.empty());
  CHECK(report.findings[0].rule == rules::kUniquePublisher);
}

TEST_CASE("validate: int16 default out of range") {
  const char* src =
      "t : topic { FIELDS v : int16 70000 }\n"
      "a : node { PUBLISHES p { TOPIC t } PERIOD 50msec }\n";
  auto report = validate(testing::parse_or_die(src));
  bool found = false;
  for (const auto& f : report.findings)
    if (f.rule == rules::kTypeSize) found = true;
  CHECK(found);
}

TEST_CASE("validate: period, wcet, latency, and queue guards") {
  ArchitectureSpec spec;
  spec.module_name = "m";
  TopicSpec t;
  t.name = "t";
  spec.topics.push_back(t);

  NodeSpec bad;
  bad.name = "bad";
  bad.period_min = 0;
  bad.period_max = 0;
  spec.nodes.push_back(bad);

  NodeSpec worse;
  worse.name = "worse";
  worse.period_min = 1000;
  worse.period_max = 500;  // min > max
  worse.wcet = 2000;
  SubscriptionSpec s;
  s.local_name = "s";
  s.topic = "t";
  s.max_latency = 0;
  s.buffer_capacity = 0;
  worse.subscriptions.push_back(s);
  PublicationSpec p;
  p.local_name = "p";
  p.topic = "nope";
  worse.publications.push_back(p);
  spec.nodes.push_back(worse);

  auto report = validate(spec);
  std::set<std::string> rules_seen;
  for (const auto& f : report.findings) rules_seen.insert(f.rule);
  CHECK(rules_seen.count(rules::kPeriodBounds));
  CHECK(rules_seen.count(rules::kWcetBound));
  CHECK(rules_seen.count(rules::kMaxLatency));
  CHECK(rules_seen.count(rules::kQueueCapacity));
  CHECK(rules_seen.count(rules::kUnknownTopic));
  CHECK(rules_seen.count(rules::kNoPublisher));
}

TEST_CASE("validate: unknown class fields warn but do not error") {
  const char* src =
      "t : topic { FIELDS v : int32 0 WIDGET 7 }\n"
      "a : node { PUBLISHES p { TOPIC t } PERIOD 50msec }\n";
  auto spec = testing::parse_or_die(src);
  auto report = validate(spec);
  REQUIRE_FALSE(report.empty());
  CHECK_FALSE(report.has_errors());
  CHECK(report.findings[0].rule == rules::kUnknownField);
  // and the field is preserved
  CHECK(pretty_print(spec).find("WIDGET 7") != std::string::npos);
}

TEST_CASE("validation report records are tab separated and ordered") {
  const char* src =
      "t : topic { FIELDS v : int16 70000 }\n"
      "a : node { PUBLISHES p { TOPIC t } PERIOD 50msec }\n"
      "b : node { PUBLISHES q { TOPIC t } PERIOD 50msec }\n";
  auto report = validate(testing::parse_or_die(src));
  std::string records = report.to_records();
  CHECK(records.find("ERROR\tTYPE_SIZE\t1:") != std::string::npos);
  // ordered by location: the topic declaration (1:1) precedes its field
  CHECK(records.find("UNIQUE_PUBLISHER") < records.find("TYPE_SIZE"));
}

// ---------------------------------------------------------------------------

TEST_CASE("check_subtype follows signedness families and widths") {
  CHECK(check_subtype(FormatType::Int16, FormatType::Int32) == SubtypeAnswer::Yes);
  CHECK(check_subtype(FormatType::Int32, FormatType::Int32) == SubtypeAnswer::Yes);
  CHECK(check_subtype(FormatType::Int32, FormatType::Int16) == SubtypeAnswer::No);
  CHECK(check_subtype(FormatType::UInt8, FormatType::UInt64) == SubtypeAnswer::Yes);
  CHECK(check_subtype(FormatType::UInt8, FormatType::Int16) == SubtypeAnswer::No);
  CHECK(check_subtype(FormatType::Float32, FormatType::Float64) == SubtypeAnswer::Yes);
  CHECK(check_subtype(FormatType::Float64, FormatType::Float32) == SubtypeAnswer::No);
  CHECK(check_subtype(FormatType::Bool, FormatType::Int32) ==
        SubtypeAnswer::Unsupported);
  CHECK(check_subtype(FormatType::Int32, FormatType::Duration) ==
        SubtypeAnswer::Unsupported);
}

TEST_CASE("resolve_identifier walks aliases and members") {
  const char* src =
      "t : topic { FIELDS v : int32 0 }\n"
      "a : node { PUBLISHES p { TOPIC t } PERIOD 50msec }\n"
      "b : node { SUBSCRIBES s { TOPIC t MAXLATENCY 1msec } PERIOD 50msec }\n"
      "shortcut = t\n";
  auto spec = testing::parse_or_die(src);

  auto direct = resolve_identifier(spec, "t");
  REQUIRE(direct.ok());
  CHECK(std::holds_alternative<const TopicSpec*>(*direct.value));

  auto hop = resolve_identifier(spec, "shortcut");
  REQUIRE(hop.ok());
  CHECK(std::get<const TopicSpec*>(*hop.value)->name == "t");

  auto member = resolve_identifier(spec, "b.s");
  REQUIRE(member.ok());
  CHECK(std::get<const SubscriptionSpec*>(*member.value)->max_latency == 1000);

  auto field = resolve_identifier(spec, "t.v");
  REQUIRE(field.ok());
  CHECK(std::get<const FieldSpec*>(*field.value)->name == "v");

  auto unknown = resolve_identifier(spec, "ghost");
  CHECK_FALSE(unknown.ok());
  CHECK(unknown.error.find("unknown root") != std::string::npos);

  spec.aliases["x"] = "y";
  spec.aliases["y"] = "x";
  auto cycle = resolve_identifier(spec, "x");
  CHECK_FALSE(cycle.ok());
  CHECK(cycle.error.find("cycle") != std::string::npos);
}

TEST_CASE("alias cycles are validation findings") {
  ArchitectureSpec spec;
  spec.module_name = "m";
  spec.aliases["x"] = "y";
  spec.aliases["y"] = "x";
  auto report = validate(spec);
  bool cycle = false;
  for (const auto& f : report.findings)
    if (f.rule == rules::kAliasCycle) cycle = true;
  CHECK(cycle);
}

// ---------------------------------------------------------------------------
// randomized round-trip and validation soundness

namespace {

ArchitectureSpec random_spec(sim::Rng& rng) {
  ArchitectureSpec spec;
  spec.module_name = "module";
  const int n_topics = 1 + static_cast<int>(rng.below(4));
  for (int i = 0; i < n_topics; ++i) {
    TopicSpec t;
    t.name = "topic" + std::to_string(i);
    const int n_fields = 1 + static_cast<int>(rng.below(3));
    for (int f = 0; f < n_fields; ++f) {
      FieldSpec field;
      field.name = "f" + std::to_string(f);
      switch (rng.below(4)) {
        case 0:
          field.type = FormatType::Int16;
          field.default_value = Literal::integer(rng.between(-100, 100));
          break;
        case 1:
          field.type = FormatType::UInt32;
          field.default_value = Literal::integer(rng.between(0, 1000));
          break;
        case 2:
          field.type = FormatType::Float32;
          field.default_value = Literal::real(static_cast<double>(rng.between(0, 99)));
          break;
        default:
          field.type = FormatType::Bool;
          field.default_value = Literal::boolean(rng.below(2) == 0);
          break;
      }
      t.fields.push_back(std::move(field));
    }
    spec.topics.push_back(std::move(t));
  }
  const int n_nodes = 1 + static_cast<int>(rng.below(3));
  for (int i = 0; i < n_nodes; ++i) {
    NodeSpec n;
    n.name = "node" + std::to_string(i);
    n.period_min = 1000 * (1 + static_cast<Micros>(rng.below(50)));
    n.period_max = n.period_min + 1000 * static_cast<Micros>(rng.below(20));
    if (rng.below(2) == 0) n.wcet = n.period_min / 2;
    spec.nodes.push_back(std::move(n));
  }
  // each topic gets exactly one publisher
  for (size_t t = 0; t < spec.topics.size(); ++t) {
    NodeSpec& owner = spec.nodes[t % spec.nodes.size()];
    owner.publications.push_back(
        {"pub" + std::to_string(t), spec.topics[t].name, {}});
  }
  // random subscriptions
  for (auto& n : spec.nodes) {
    const int n_subs = static_cast<int>(rng.below(3));
    for (int s = 0; s < n_subs; ++s) {
      SubscriptionSpec sub;
      sub.local_name = "sub" + std::to_string(s);
      sub.topic = spec.topics[rng.below(spec.topics.size())].name;
      sub.max_latency = 100 + static_cast<Micros>(rng.below(5000));
      sub.buffer_capacity = 1 + static_cast<int>(rng.below(3));
      n.subscriptions.push_back(std::move(sub));
    }
  }
  if (rng.below(3) == 0) {
    PlantSpec plant;
    plant.name = "plant";
    MachineSpec m;
    m.name = "box";
    m.os_kind = "linux";
    m.address = "10.0.0.1";
    for (const auto& n : spec.nodes) m.nodes.push_back(n.name);
    plant.machines.push_back(std::move(m));
    spec.plant = std::move(plant);
  }
  return spec;
}

}  // namespace

TEST_CASE("property: printed random specs re-parse to equal specs") {
  sim::Rng rng(2024);
  for (int iter = 0; iter < 200; ++iter) {
    ArchitectureSpec spec = random_spec(rng);
    std::string printed = pretty_print(spec);
    CAPTURE(printed);
    auto reparsed = parse_architecture(printed, "module");
    REQUIRE(reparsed.ok());
    CHECK(*reparsed.spec == spec);
  }
}

TEST_CASE("property: clean validation implies the stated invariants") {
  sim::Rng rng(77);
  for (int iter = 0; iter < 200; ++iter) {
    ArchitectureSpec spec = random_spec(rng);
    auto report = validate(spec);
    if (!report.empty()) continue;
    for (const auto& t : spec.topics) CHECK(spec.publisher_of(t.name) != nullptr);
    for (const auto& n : spec.nodes) {
      CHECK(n.period_min > 0);
      CHECK(n.period_min <= n.period_max);
      if (n.wcet) CHECK(*n.wcet <= n.period_min);
      for (const auto& s : n.subscriptions) {
        CHECK(spec.topic(s.topic) != nullptr);
        CHECK(s.max_latency > 0);
        CHECK(s.buffer_capacity >= 1);
      }
    }
  }
}
