#include <doctest.h>

#include <sstream>

#include "sysmine/composition.hpp"
#include "sysmine/logkit.hpp"

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "fixture.hpp"

using namespace sysmine;
using namespace std::chrono;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::ParseError;
}

EventLog jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_log(in, LogFormat::jsonl);
}

RolePolicy two_sided() {
  RolePolicy p;
  p.role_of = {{"shop", "vendor"}, {"ann", "client"}, {"ben", "client"}};
  p.side_of = {{"vendor", Side::right}, {"client", Side::left}};
  return p;
}

}  // namespace

TEST_CASE("timestamps") {
  const auto base = parse_timestamp("2024-01-01T09:00:00Z");
  CHECK(parse_timestamp("2024-01-01T09:00:00") == base);
  CHECK(parse_timestamp("2024-01-01T10:30:00+01:30") == base);
  CHECK(parse_timestamp("2024-01-01T09:00:00.250Z") - base == milliseconds(250));
  CHECK(parse_timestamp("2024-03-01T00:00:00Z") - parse_timestamp("2024-02-28T00:00:00Z") == hours(48));
  for (const auto* bad : {"", "2024-01-01", "2024-13-01T00:00:00Z", "2024-01-01T25:00:00Z", "2024-01-01T09:00:00Zjunk"})
    CHECK(code_of([&] { parse_timestamp(bad); }) == Errc::BadTimestamp);
}

TEST_CASE("JSONL and CSV logs agree") {
  const auto a = load_log(fixture::data_dir / "retail.jsonl");
  const auto b = load_log(fixture::data_dir / "retail.csv");
  REQUIRE(a.size() == 7);
  REQUIRE(b.size() == 7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.events()[i].name == b.events()[i].name);
    CHECK(a.events()[i].agents == b.events()[i].agents);
    CHECK(a.events()[i].data == b.events()[i].data);
    CHECK(a.events()[i].timestamp == b.events()[i].timestamp);
  }
  CHECK(a.agents() == std::set<AgentId>{"Alice", "Bob", "Claire", "V1", "V2", "cashier"});
  REQUIRE(a.find("V1 packs shirt") != nullptr);
  CHECK(a.find("V1 packs shirt")->agents == std::set<AgentId>{"Alice", "V1"});
  CHECK(a.find("nothing") == nullptr);
}

TEST_CASE("log errors") {
  CHECK(code_of([] { jsonl("{\"name\": \"a\", \"agents\": [\"x\"], \"ts\": \"2024-01-01T00:00:00Z\"}\n"
                           "{\"name\": \"a\", \"agents\": [\"y\"], \"ts\": \"2024-01-01T00:00:01Z\"}\n"); }) ==
        Errc::DuplicateEventName);
  CHECK(code_of([] { jsonl("{\"name\": \"a\", \"agents\": [], \"ts\": \"2024-01-01T00:00:00Z\"}\n"); }) ==
        Errc::EmptyAgentSet);
  CHECK(code_of([] { jsonl("{\"name\": \"a\", \"agents\": [\"x\"], \"ts\": \"yesterday\"}\n"); }) ==
        Errc::BadTimestamp);
  try {
    jsonl("\n{\"name\": \"a\", \"agents\": [\"x\"], \"ts\": \"2024-01-01T00:00:00Z\"}\n{oops\n");
    FAIL("accepted malformed JSON");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(e.detail().rfind("line 3", 0) == 0);
  }
  CHECK(code_of([] { load_log("/no/such/log.jsonl"); }) == Errc::ParseError);
  CHECK(jsonl("").empty());
}

TEST_CASE("events are ordered by timestamp, stable on ties") {
  const auto log = jsonl(
      "{\"name\": \"late\", \"agents\": [\"x\"], \"ts\": \"2024-01-01T00:00:02Z\"}\n"
      "{\"name\": \"tie1\", \"agents\": [\"x\"], \"ts\": \"2024-01-01T00:00:01Z\"}\n"
      "{\"name\": \"tie2\", \"agents\": [\"x\"], \"ts\": \"2024-01-01T00:00:01Z\"}\n");
  std::vector<std::string> names;
  for (const auto& e : log.events()) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"tie1", "tie2", "late"});
}

TEST_CASE("role policies") {
  const auto& p = fixture::policy();
  CHECK(p.role("V1") == "vendor");
  CHECK(p.side("cashier") == Side::right);
  CHECK(p.side("Claire") == Side::left);
  CHECK(code_of([&] { p.side("Dora"); }) == Errc::MissingRole);
  CHECK(code_of([] { role_policy_from_json({{"roles", {{"a", "r"}}}, {"sides", {{"r", "up"}}}}); }) ==
        Errc::ParseError);
}

TEST_CASE("chain place labels") {
  CHECK(chain_place_label("a", "b", "V1") == "a→b/V1");
  const auto parsed = parse_chain_place_label("start→shirt to take home/V1");
  REQUIRE(parsed.has_value());
  CHECK(parsed->producer == "start");
  CHECK(parsed->consumer == "shirt to take home");
  CHECK(parsed->agent == "V1");
  CHECK_FALSE(parse_chain_place_label("no arrow here").has_value());
  CHECK(chain_transition_id("V1", "handing over") == "V1:handing over");
}

TEST_CASE("behaviour of vendor V1") {
  const auto m = fixture::behavior("V1");
  CHECK(m.net().transitions().size() == 3);
  CHECK(m.right() == m.net().transitions());
  CHECK(m.left().empty());
  CHECK(m.interior().size() == 4);
  CHECK(m.label("V1:p0") == "start→shirt to take home/V1");
  CHECK(m.label("V1:p3") == "handing over→end/V1");
  CHECK(code_of([] { behavior_to_module({}, "V1", fixture::policy()); }) == Errc::EmptyBehavior);
  CHECK(code_of([] { agent_behavior(fixture::log(), "Dora"); }) == Errc::UnknownAgent);
}

TEST_CASE("mined fixture run") {
  const auto mined = mine_run(fixture::log(), fixture::policy());
  CHECK(mined.fold_order == std::vector<AgentId>{"V1", "V2", "cashier", "Alice", "Bob", "Claire"});
  CHECK(mined.warnings.empty());
  const auto& m = mined.run.module();
  CHECK(m.net().transitions().size() == 7);
  CHECK(m.net().places().size() == 20);
  CHECK(m.left().empty());
  CHECK(m.right().empty());

  // vendors and cashier on one side, customers on the other
  std::vector<Module> trade, customers;
  for (const auto* a : {"V1", "cashier", "V2"}) trade.push_back(fixture::behavior(a));
  for (const auto* a : {"Alice", "Bob", "Claire"}) customers.push_back(fixture::behavior(a));
  CHECK(isomorphic(compose(compose_all(trade), compose_all(customers)), m));
}

TEST_CASE("events shared within one side") {
  const auto log = jsonl(
      "{\"name\": \"meet\", \"agents\": [\"ann\", \"ben\"], \"ts\": \"2024-01-01T00:00:00Z\"}\n"
      "{\"name\": \"buy\", \"agents\": [\"ann\", \"shop\"], \"ts\": \"2024-01-01T00:00:01Z\"}\n");
  const auto mined = mine_run(log, two_sided());
  REQUIRE(mined.warnings.size() == 1);
  CHECK(mined.warnings[0].find("meet") != std::string::npos);
  const auto& m = mined.run.module();
  CHECK(m.net().transitions().size() == 2);
  CHECK(m.left_labels() == std::set<Label>{"meet"});
  CHECK(code_of([&] { mine_run(EventLog{}, two_sided()); }) == Errc::EmptyLog);
}

TEST_CASE("property: mined runs respect timestamps") {
  testing::Rng rng(99);
  for (int i = 0; i < 150; ++i) {
    const auto g = testing::random_log(rng);
    const auto mined = mine_run(g.log, g.policy);
    const auto& run = mined.run;
    REQUIRE(oracle::is_occurrence_net(run.net()));
    std::map<std::string, NodeId> node;
    for (const auto& t : run.net().transitions()) node[run.module().label(t)] = t;
    REQUIRE(node.size() == g.log.size());
    const auto& events = g.log.events();
    for (std::size_t x = 0; x < events.size(); ++x) {
      for (std::size_t y = 0; y < events.size(); ++y) {
        const auto& a = events[x];
        const auto& b = events[y];
        if (run.causally_before(node[a.name], node[b.name])) CHECK(a.timestamp < b.timestamp);
        bool shared = false;
        for (const auto& agent : a.agents) shared = shared || b.agents.count(agent);
        if (shared && a.timestamp < b.timestamp) CHECK(run.causally_before(node[a.name], node[b.name]));
      }
    }
  }
}
