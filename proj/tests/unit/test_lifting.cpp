#include <doctest.h>

#include <algorithm>

#include "sysmine/lifting.hpp"

#include "../support/oracles.hpp"
#include "fixture.hpp"

using namespace sysmine;

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

const SystemAtom& atom_for(const std::string& event) {
  for (const auto& a : fixture::mining().atoms)
    if (a.event == event) return a;
  throw std::runtime_error("no atom for " + event);
}

std::multiset<std::string> rendered(const std::vector<std::pair<std::string, TermTuple>>& arcs) {
  std::multiset<std::string> out;
  for (const auto& [place, terms] : arcs) out.insert(place + " " + to_string(terms));
  return out;
}

std::multiset<std::string> atom_inputs(const SystemAtom& a) {
  std::multiset<std::string> out;
  for (const auto& [arc, terms] : a.inscriptions)
    if (arc.second == a.atom.transition) out.insert(to_string(terms));
  return out;
}

std::multiset<std::string> atom_outputs(const SystemAtom& a) {
  std::multiset<std::string> out;
  for (const auto& [arc, terms] : a.inscriptions)
    if (arc.first == a.atom.transition) out.insert(to_string(terms));
  return out;
}

}  // namespace

TEST_CASE("place roles") {
  const auto& m = fixture::mining();
  const auto role = resolve_place_role("shirt to take home→V1 packs shirt/V1", m.policy, m.config);
  CHECK(role.label == "vendors with selected items");
  CHECK(role.fields == std::vector<std::string>{"agent", "item"});
  CHECK(resolve_place_role("start→shirt to take home/V1", m.policy, m.config).label == "available vendors");
  const auto fallback = resolve_place_role("start→x/Bob", m.policy, LiftingConfig{});
  CHECK(fallback.label == "client:pre:x");
  CHECK(fallback.fields == std::vector<std::string>{"agent"});
  CHECK(resolve_place_role("x→end/Bob", m.policy, LiftingConfig{}).label == "client:post:x");
  CHECK(code_of([&] { resolve_place_role("garbage", m.policy, m.config); }) == Errc::MissingPlaceRole);
  CHECK(code_of([&] { resolve_place_role("a→b/Dora", m.policy, m.config); }) == Errc::MissingPlaceRole);
}

TEST_CASE("place tokens read event data") {
  const auto& m = fixture::mining();
  const auto token = place_token("start→shirt to take home/Alice", m.log, m.structure, m.policy, m.config);
  CHECK(token == ConstantTuple{{"Alice", "clients"}, {"blue shirt", "item descriptions"}});
  const auto price = place_token("shoes to be ordered→Bob pays order/Bob", m.log, m.structure, m.policy, m.config);
  CHECK(price == ConstantTuple{{"Bob", "clients"}, {"shoes", "products"}, {"80 €", "money"}});

  auto config = m.config;
  config.places.insert(config.places.begin(), PlaceRoleRule{"client", "start", std::nullopt, "odd", {"agent", "colour"}});
  CHECK(code_of([&] { place_token("start→shirt to take home/Alice", m.log, m.structure, m.policy, config); }) ==
        Errc::UnresolvableValue);
}

TEST_CASE("generalized atoms of the case study") {
  const auto& shirt = atom_for("shirt to take home");
  CHECK(shirt.system_label == "item to take home");
  CHECK(atom_inputs(shirt) == std::multiset<std::string>{"y", "(x, descr(z))"});
  CHECK(atom_outputs(shirt) == std::multiset<std::string>{"(x, f(z))", "(y, z)"});
  CHECK(shirt.witness == Valuation{{"x", "Alice"}, {"y", "V1"}, {"z", "shirt"}});

  const auto& bob = atom_for("Bob pays order");
  CHECK(atom_inputs(bob) == std::multiset<std::string>{"c", "(x, z, f(z))"});
  CHECK(atom_outputs(bob) == std::multiset<std::string>{"c", "(x, v)"});

  const auto& alice = atom_for("Alice pays take home");
  CHECK(atom_inputs(alice) == std::multiset<std::string>{"c", "(x, total(v))"});

  std::size_t variables = 0;
  for (const auto& a : fixture::mining().atoms) variables += a.variables.size();
  CHECK(variables == 23);
}

TEST_CASE("instantiating a generalized atom gives back its annotation") {
  const auto& m = fixture::mining();
  REQUIRE(m.atoms.size() == m.annotated.size());
  for (std::size_t i = 0; i < m.atoms.size(); ++i) CHECK(instantiate(m.atoms[i], m.structure) == m.annotated[i].inscriptions);
}

TEST_CASE("ties between functional matches need a priority") {
  const auto& m = fixture::mining();
  const auto it = std::find_if(m.annotated.begin(), m.annotated.end(),
                               [](const AnnotatedAtom& a) { return a.event == "Bob pays order"; });
  REQUIRE(it != m.annotated.end());
  CHECK(code_of([&] { generalize_atom(*it, m.structure, {}); }) == Errc::AmbiguousFunctionalMatch);
  const std::vector<Symbol> totals_first{"total", "f"};
  const auto other = generalize_atom(*it, m.structure, totals_first);
  CHECK(atom_inputs(other).count("(x, z, total(v))") == 1);
}

TEST_CASE("symbolic module and system net sizes") {
  const auto& m = fixture::mining();
  CHECK(m.symbolic.module.net().places().size() == 20);
  CHECK(m.symbolic.module.left().size() == 6);
  CHECK(m.symbolic.module.right().size() == 6);
  CHECK(m.net.places.size() == 11);
  CHECK(m.net.transitions.size() == 7);
  CHECK(m.net.transitions.size() == m.symbolic.module.net().transitions().size());
  CHECK(m.net.places.size() < m.symbolic.module.net().places().size());
  CHECK(m.net.token_count() == 6);
  CHECK(m.net.marking.at("available vendors") == std::multiset<ValueTuple>{{"V1"}, {"V2"}});
  CHECK(m.net.transitions.at("hat not on offer").label == "item not on offer");
  CHECK(rendered(m.net.inputs("handing over")) ==
        std::multiset<std::string>{"clients with vouchers (x, v)", "vendors with packed items (y, w)"});
}

TEST_CASE("firing item to take home") {
  const auto& m = fixture::mining();
  const Valuation beta{{"x", "Alice"}, {"y", "V1"}, {"z", "shirt"}};
  REQUIRE(enabled(m.net, m.structure, "shirt to take home", beta));
  const auto next = fire(m.net, m.structure, "shirt to take home", beta);
  CHECK(next.marking.at("available vendors") == std::multiset<ValueTuple>{{"V2"}});
  CHECK(next.marking.at("clients with descriptions of items") ==
        std::multiset<ValueTuple>{{"Bob", "brown shoes"}, {"Claire", "straw hat"}});
  CHECK(next.marking.at("clients with items to take home") == std::multiset<ValueTuple>{{"Alice", "50 €"}});
  CHECK(next.marking.at("vendors with selected items") == std::multiset<ValueTuple>{{"V1", "shirt"}});
  CHECK(next.token_count() == m.net.token_count());

  const Valuation wrong{{"x", "Alice"}, {"y", "V1"}, {"z", "shoes"}};
  const auto missing = missing_tokens(m.net, m.structure, "shirt to take home", wrong);
  REQUIRE(missing.size() == 1);
  CHECK(missing[0].first == "clients with descriptions of items");
  CHECK(missing[0].second == ValueTuple{"Alice", "brown shoes"});
  try {
    fire(m.net, m.structure, "shirt to take home", wrong);
    FAIL("fired a disabled transition");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotEnabled);
    CHECK(e.detail().find("brown shoes") != std::string::npos);
  }
  CHECK(code_of([&] { fire(m.net, m.structure, "shirt to take home", {{"x", "Alice"}}); }) == Errc::UnboundVariable);
  CHECK(code_of([&] { fire(m.net, m.structure, "nope", beta); }) == Errc::UnknownNode);
}

TEST_CASE("enabling valuations agree with exhaustive search") {
  const auto& m = fixture::mining();
  for (const auto& [id, t] : m.net.transitions) {
    std::vector<std::string> vars;
    for (const auto& [name, sort] : t.variables) vars.push_back(name);
    std::vector<Valuation> expected;
    for (const auto& beta : oracle::all_valuations(m.structure, vars))
      if (enabled(m.net, m.structure, id, beta)) expected.push_back(beta);
    auto found = enabling_valuations(m.net, m.structure, id);
    std::sort(found.begin(), found.end());
    std::sort(expected.begin(), expected.end());
    CHECK(found == expected);
  }
  CHECK(enabling_valuations(m.net, m.structure, "shirt to take home").size() == 6);
  CHECK(enabling_valuations(m.net, m.structure, "shirt to take home", {{"x", "Bob"}}).size() == 2);
}

TEST_CASE("schema round trip") {
  const auto& m = fixture::mining();
  const auto& schema = m.schema;
  CHECK(schema.marking.at("available vendors") == std::vector<SymbolicToken>{{"VE", true}});
  CHECK(schema.symbols.at("CL") == SortProfile{"clients", "item descriptions"});
  CHECK(schema.net.marking.empty());
  const auto interpretation = interpretation_of(m.net, m.config.schema);
  CHECK(interpretation.at("CA") == std::set<ValueTuple>{{"cashier"}});
  CHECK(instantiate(schema, interpretation) == m.net);
  CHECK(code_of([&] { schematize(m.net, {}); }) == Errc::UnmappedMarkedPlace);
  CHECK(code_of([&] { instantiate(schema, {}); }) == Errc::UnknownSymbol);
}

TEST_CASE("replay of the mined run") {
  const auto& m = fixture::mining();
  CHECK(m.replay.conformant);
  CHECK(m.replay.firing_sequence.size() == 7);
  CHECK_FALSE(m.replay.blocked_at.has_value());

  // without the second vendor the order of shoes cannot be served
  auto poorer = m.net;
  poorer.marking["available vendors"].erase(ValueTuple{"V2"});
  const auto report = replay(poorer, m.structure, m.run.run, witnesses_of(m.symbolic));
  CHECK_FALSE(report.conformant);
  REQUIRE(report.blocked_at.has_value());
  CHECK_FALSE(report.missing.empty());

  auto witnesses = witnesses_of(m.symbolic);
  witnesses.erase("handing over");
  CHECK_FALSE(replay(m.net, m.structure, m.run.run, witnesses).conformant);
}

TEST_CASE("JSON round trips") {
  const auto& m = fixture::mining();
  CHECK(system_net_from_json(to_json(m.net), m.structure) == m.net);
  CHECK(net_schema_from_json(to_json(m.schema), m.structure) == m.schema);
  const auto doc = to_json(m.symbolic);
  CHECK(doc.at("kind") == "symbolic_module");
  CHECK(module_from_json(doc.at("module")) == m.symbolic.module);
  auto broken = to_json(m.net);
  broken["transitions"][0]["inputs"][0]["place"] = "nowhere";
  CHECK(code_of([&] { system_net_from_json(broken, m.structure); }) == Errc::UnknownNode);
}

TEST_CASE("DOT rendering") {
  const auto& m = fixture::mining();
  const auto dot = to_dot(m.net);
  CHECK(dot.find("available vendors") != std::string::npos);
  CHECK(dot.find("descr(z)") != std::string::npos);
  CHECK(to_dot(m.schema).find("VE") != std::string::npos);
}
