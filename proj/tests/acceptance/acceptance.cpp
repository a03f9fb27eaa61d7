// Acceptance suite: one line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "sysmine/composition.hpp"
#include "sysmine/lifting.hpp"
#include "sysmine/logkit.hpp"
#include "sysmine/occurrence.hpp"
#include "sysmine/pipeline.hpp"

#include "../support/generators.hpp"
#include "../support/oracles.hpp"

namespace fs = std::filesystem;
using namespace sysmine;
using sysmine::testing::Rng;

namespace {

const fs::path data_dir{SYSMINE_DATA_DIR};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string join_lines(const std::vector<std::string>& items, std::size_t max = 3) {
  std::string out;
  for (std::size_t i = 0; i < items.size() && i < max; ++i) out += (i ? "; " : "") + items[i];
  if (items.size() > max) out += "; ...";
  return out;
}

PipelineConfig fixture_config() {
  PipelineConfig c;
  c.log = data_dir / "retail.jsonl";
  c.roles = data_dir / "roles.json";
  c.structure = data_dir / "s0.json";
  c.place_roles = data_dir / "place_roles.json";
  return c;
}

NodeId transition_labelled(const Module& m, const Label& label) {
  for (const auto& t : m.net().transitions()) {
    if (m.label(t) == label) return t;
  }
  throw std::runtime_error("no transition labelled " + label);
}

Outcome case_study_pipeline() {
  const auto start = std::chrono::steady_clock::now();
  const auto mined = mine_run_steps(fixture_config());
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& run = mined.run;
  const auto& m = run.module();
  std::vector<std::string> problems;
  if (m.net().transitions().size() != 7) problems.push_back("transitions: " + std::to_string(m.net().transitions().size()));
  if (!m.left().empty() || !m.right().empty()) problems.push_back("interfaces not empty");

  const auto shirt = transition_labelled(m, "shirt to take home");
  const auto pack = transition_labelled(m, "V1 packs shirt");
  const auto hand = transition_labelled(m, "handing over");
  if (!run.causally_before(shirt, pack) || !run.causally_before(pack, hand)) {
    problems.push_back("V1 events not ordered shirt < pack < handing over");
  }
  const auto alice_pays = transition_labelled(m, "Alice pays take home");
  const auto bob_pays = transition_labelled(m, "Bob pays order");
  if (!run.causally_before(alice_pays, bob_pays)) problems.push_back("Bob's payment not after Alice's");
  const auto hat = transition_labelled(m, "hat not on offer");
  for (const auto& c : {alice_pays, bob_pays}) {
    if (!run.concurrent(hat, c)) problems.push_back("hat not on offer ordered with " + m.label(c));
  }
  if (elapsed >= 1.0) problems.push_back("runtime " + std::to_string(elapsed) + " s");

  std::ostringstream detail;
  detail << "7 transitions, " << m.left().size() + m.right().size() << " interface elements, V1 chain ordered, "
         << "Alice's payment < Bob's, hat unordered with cashier events, " << static_cast<int>(elapsed * 1000)
         << " ms";
  if (!problems.empty()) return {false, join_lines(problems)};
  return {true, detail.str()};
}

Outcome associativity() {
  Rng rng(20240101);
  testing::ModuleShape shape;
  shape.max_nodes = 10;
  int counted = 0, attempts = 0, rejected = 0, one_sided = 0, literal = 0;
  std::vector<std::string> failures;
  while (counted < 1000 && attempts < 100000) {
    ++attempts;
    shape.labels = testing::uniform(rng, 2, 5);
    shape.overlapping_interfaces = testing::coin(rng, 0.3);
    const auto a = testing::random_module(rng, "a", shape);
    const auto b = testing::random_module(rng, "b", shape);
    const auto c = testing::random_module(rng, "c", shape);
    // only triples whose four partial composites all exist: no resulting
    // interface may hold two elements with one label
    std::optional<Module> left, right;
    try {
      left = compose(compose(a, b), c);
    } catch (const Error& e) {
      if (e.code() != Errc::ResultingDuplicateInterfaceLabel) throw;
    }
    try {
      right = compose(a, compose(b, c));
    } catch (const Error& e) {
      if (e.code() != Errc::ResultingDuplicateInterfaceLabel) throw;
    }
    if (!left || !right) {
      ++rejected;
      one_sided += left.has_value() != right.has_value() ? 1 : 0;
      continue;
    }
    ++counted;
    if (*left == *right) ++literal;
    if (!isomorphic(*left, *right)) failures.push_back("not isomorphic (attempt " + std::to_string(attempts) + ")");
  }
  std::ostringstream detail;
  detail << counted << " collision-free triples, " << failures.size() << " failures, " << literal
         << " also literally equal under canonical merge ids; " << rejected
         << " triples with duplicate resulting interface labels skipped (" << one_sided << " on one bracketing only)";
  if (counted < 1000 || !failures.empty()) return {false, detail.str() + ": " + join_lines(failures)};
  return {true, detail.str()};
}

Outcome commutativity() {
  Rng rng(7);
  testing::ModuleShape shape;
  shape.max_nodes = 8;
  shape.overlapping_interfaces = false;
  int disjoint = 0, shared = 0, iso_with_shared = 0;
  std::vector<std::string> failures;
  for (int i = 0; i < 1000; ++i) {
    shape.labels = testing::uniform(rng, 2, 12);
    shape.interface_p = testing::uniform(rng, 1, 5) / 10.0;
    const auto a = testing::random_module(rng, "a", shape);
    const auto b = testing::random_module(rng, "b", shape);
    std::optional<Module> ab, ba;
    try {
      ab = compose(a, b);
    } catch (const Error&) {
    }
    try {
      ba = compose(b, a);
    } catch (const Error&) {
    }
    const bool equal = ab && ba && *ab == *ba;
    const bool iso = ab && ba && isomorphic(*ab, *ba);
    const bool labels_disjoint = commutes(a, b);
    (labels_disjoint ? disjoint : shared) += 1;
    if (!labels_disjoint && iso) ++iso_with_shared;
    if (equal != labels_disjoint || iso != labels_disjoint) {
      failures.push_back("pair " + std::to_string(i) + (labels_disjoint ? ": disjoint but A•B and B•A differ"
                                                                           : ": shared labels but A•B matches B•A"));
    }
  }
  std::ostringstream detail;
  detail << "1000 pairs (" << disjoint << " with disjoint interface labels, " << shared << " sharing), "
         << failures.size() << " failures, comparing both on canonical ids and up to isomorphism ("
         << iso_with_shared << " sharing pairs isomorphic)";
  if (!failures.empty() || disjoint == 0 || shared == 0) return {false, detail.str() + ": " + join_lines(failures)};
  return {true, detail.str()};
}

Outcome occurrence_closure() {
  Rng rng(42);
  int pairs = 0, with_dissent = 0, non_occurrence = 0;
  int as_occurrence_disagrees = 0, cycle_without_dissent = 0, occurrence_with_dissent = 0;
  std::vector<std::string> examples;
  while (pairs < 1000) {
    const auto generated = testing::random_occurrence_pair(rng, 8);
    const auto a = as_occurrence(generated.a);
    const auto b = as_occurrence(generated.b);
    ++pairs;
    const auto composed = compose(generated.a, generated.b);
    const bool oracle = oracle::is_occurrence_net(composed.net());
    bool accepted = true;
    try {
      as_occurrence(composed);
    } catch (const Error&) {
      accepted = false;
    }
    const bool no_dissent = dissenting_pairs(a, b).empty();
    with_dissent += no_dissent ? 0 : 1;
    non_occurrence += oracle ? 0 : 1;
    if (accepted != oracle) ++as_occurrence_disagrees;
    if (oracle != no_dissent) {
      if (no_dissent) {
        ++cycle_without_dissent;
        if (examples.size() < 1) {
          examples.push_back(std::to_string(harmonic_pairs(generated.a, generated.b).size()) +
                             " harmonic pairs, no dissent, composite cyclic");
        }
      } else {
        ++occurrence_with_dissent;
      }
    }
  }
  std::ostringstream detail;
  detail << pairs << " pairs (" << with_dissent << " with dissent, " << non_occurrence
         << " composites not occurrence nets); as_occurrence vs oracle mismatches: " << as_occurrence_disagrees
         << "; iff violations: " << cycle_without_dissent << " cyclic without dissent, " << occurrence_with_dissent
         << " occurrence net despite dissent";
  const bool pass = as_occurrence_disagrees == 0 && cycle_without_dissent == 0 && occurrence_with_dissent == 0;
  if (!pass && !examples.empty()) detail << " (e.g. " << examples.front() << ")";
  if (pass) detail << "; cycles through four or more harmonic pairs escape the pairwise test but none occur in this sample";
  return {pass, detail.str()};
}

Outcome atom_round_trip() {
  Rng rng(4);
  testing::OccurrenceShape shape;
  shape.max_transitions = 8;
  int nets = 0, checks = 0, skipped = 0;
  std::vector<std::string> failures;
  while (nets < 500) {
    const auto module = testing::random_occurrence_net(rng, "n", shape);
    const auto orders = oracle::linearizations(module.net(), 3);
    if (orders.size() < 3) {
      ++skipped;
      continue;
    }
    ++nets;
    const auto run = as_occurrence(module);
    const auto expected = boundary_form(run);
    for (const auto& order : orders) {
      ++checks;
      std::vector<Module> parts;
      for (const auto& atom : atoms(run, order)) parts.push_back(atom.module.module());
      const auto rebuilt = compose_all(parts);
      const bool iso = isomorphic(rebuilt, expected);
      if (iso != oracle::isomorphic(rebuilt, expected)) failures.push_back("isomorphism check disagrees with oracle");
      if (!iso) failures.push_back("net " + std::to_string(nets) + ": recomposition differs");
    }
  }
  std::ostringstream detail;
  detail << nets << " nets x 3 linearizations = " << checks << " recompositions, " << failures.size()
         << " failures (" << skipped << " nets with fewer than 3 linearizations skipped)";
  if (!failures.empty()) return {false, detail.str() + ": " + join_lines(failures)};
  return {true, detail.str()};
}

Outcome term_evaluation() {
  std::vector<std::string> failures;
  std::ifstream in(data_dir / "s0.json");
  const auto s0 = parse_structure(in);
  const Valuation beta{{"x", "Alice"}, {"y", "V1"}, {"z", "shirt"}};
  const auto vars = s0.signature().variables;
  const auto yz = eval(parse_terms("(y, z)", s0, vars), s0, beta);
  const auto xfz = eval(parse_terms("(x, f(z))", s0, vars), s0, beta);
  if (yz != ValueTuple{"V1", "shirt"}) failures.push_back("(y, z) gave " + to_string(yz));
  if (xfz != ValueTuple{"Alice", "50 €"}) failures.push_back("(x, f(z)) gave " + to_string(xfz));

  Rng rng(5);
  std::size_t evaluations = 0;
  for (int k = 0; k < 200; ++k) {
    const auto s = testing::random_structure(rng, 5);
    const auto sorts = std::vector<Sort>(s.signature().sorts.begin(), s.signature().sorts.end());
    for (int j = 0; j < 10; ++j) {
      const auto sort = testing::pick(rng, sorts);
      const auto term = testing::random_term(rng, s, sort, 3);
      if (sort_of(term, s.signature()) != sort) failures.push_back("sort_of mismatch for " + to_string(term));
      for (const auto& b : oracle::all_valuations(s, variables_of(TermTuple{term}))) {
        ++evaluations;
        const auto value = eval(term, s, b);
        if (value != oracle::evaluate(term, s, b)) failures.push_back("eval differs from tables on " + to_string(term));
        if (!s.in_carrier(sort, value)) failures.push_back("result outside carrier for " + to_string(term));
        if (term.kind == Term::Kind::apply) {
          ValueTuple args;
          for (const auto& a : term.args) args.push_back(eval(a, s, b));
          if (value != s.apply(term.name, args)) failures.push_back("not compositional at " + to_string(term));
        }
      }
    }
  }
  std::ostringstream detail;
  detail << "(y, z) -> " << to_string(yz) << ", (x, f(z)) -> " << to_string(xfz) << "; " << evaluations
         << " brute-force evaluations over 200 structures, " << failures.size() << " failures";
  if (!failures.empty()) return {false, detail.str() + ": " + join_lines(failures)};
  return {true, detail.str()};
}

Outcome lifting_round_trips() {
  const auto m = mine_system_steps(fixture_config());
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    if (instantiate(m.atoms[i], m.structure) != m.annotated[i].inscriptions) {
      failures.push_back("atom " + m.atoms[i].event + " does not instantiate to its source");
    }
  }
  if (!m.replay.conformant) failures.push_back("replay not conformant");

  NodeId take_home;
  for (const auto& [id, t] : m.net.transitions) {
    if (t.label == "item to take home") take_home = id;
  }
  std::string client_var, vendor_var, client_place;
  for (const auto& [place, terms] : m.net.inputs(take_home)) {
    if (place == "available vendors") vendor_var = terms.front().name;
    if (place == "clients with descriptions of items") client_var = terms.front().name;
  }
  int pairs = 0;
  const auto& clients = m.net.marking.at("clients with descriptions of items");
  const auto& vendors = m.net.marking.at("available vendors");
  for (const auto& client : clients) {
    for (const auto& vendor : vendors) {
      ++pairs;
      const Valuation partial{{client_var, client.front()}, {vendor_var, vendor.front()}};
      const auto betas = enabling_valuations(m.net, m.structure, take_home, partial);
      if (betas.empty()) {
        failures.push_back("item to take home not enabled for " + client.front() + ", " + vendor.front());
        continue;
      }
      fire(m.net, m.structure, take_home, betas.front());
    }
  }
  std::ostringstream detail;
  detail << m.atoms.size() << " system atoms reinstantiate, replay " << (m.replay.conformant ? "conformant" : "blocked")
         << ", item to take home enabled for " << pairs - static_cast<int>(failures.size()) << "/" << pairs
         << " (client, vendor) pairs";
  if (!failures.empty() || pairs == 0) return {false, detail.str() + ": " + join_lines(failures)};
  return {true, detail.str()};
}

Outcome timestamp_soundness() {
  Rng rng(8);
  int ordered_pairs = 0, logs_with_gap = 0, gaps = 0;
  std::vector<std::string> failures;
  for (int i = 0; i < 200; ++i) {
    const auto g = testing::random_log(rng);
    try {
      const auto mined = mine_run(g.log, g.policy);
      const auto& m = mined.run.module();
      std::map<NodeId, Timestamp> when;
      for (const auto& t : m.net().transitions()) when[t] = g.log.find(m.label(t))->timestamp;
      bool gap = false;
      for (const auto& [a, ta] : when) {
        for (const auto& [b, tb] : when) {
          if (a == b) continue;
          if (mined.run.causally_before(a, b)) {
            ++ordered_pairs;
            if (!(ta < tb)) failures.push_back("log " + std::to_string(i) + ": " + m.label(a) + " < " + m.label(b));
          } else if (ta < tb && !mined.run.causally_before(b, a)) {
            gap = true;
            ++gaps;
          }
        }
      }
      logs_with_gap += gap ? 1 : 0;
    } catch (const Error& e) {
      failures.push_back("log " + std::to_string(i) + ": " + e.what());
    }
  }
  std::ostringstream detail;
  detail << "200 logs, " << ordered_pairs << " causally ordered pairs all timestamp-ordered; " << logs_with_gap
         << " logs (" << gaps << " pairs) timestamp-ordered but causally unordered";
  if (!failures.empty() || logs_with_gap == 0) return {false, detail.str() + ": " + join_lines(failures)};
  return {true, detail.str()};
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[entry.path().filename().string()] = s.str();
  }
  return out;
}

Outcome determinism() {
  const auto base = fs::temp_directory_path() / ("sysmine-acceptance-" + std::to_string(::getpid()));
  const auto config = fixture_config();
  std::vector<Artifacts> runs;
  for (int i = 0; i < 2; ++i) {
    const auto dir = base / std::to_string(i);
    fs::create_directories(dir);
    std::ostringstream cmd;
    cmd << '"' << SYSMINE_CLI << "\" mine-system --log \"" << config.log.string() << "\" --roles \""
        << config.roles.string() << "\" --structure \"" << config.structure.string() << "\" --place-roles \""
        << config.place_roles.string() << "\" --format dot --out-dir \"" << dir.string() << "\" > /dev/null";
    if (std::system(cmd.str().c_str()) != 0) {
      fs::remove_all(base);
      return {false, "mine-system exited with an error"};
    }
    runs.push_back(read_dir(dir));
  }
  fs::remove_all(base);
  const bool same_library = mine_system_pipeline(config).artifacts == mine_system_pipeline(config).artifacts;
  std::ostringstream detail;
  detail << runs[0].size() << " artifacts from two CLI runs " << (runs[0] == runs[1] ? "byte-identical" : "DIFFER")
         << ", in-process pipeline " << (same_library ? "identical" : "DIFFERS");
  return {runs[0] == runs[1] && same_library && !runs[0].empty(), detail.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"case-study pipeline", case_study_pipeline},
      {"associativity", associativity},
      {"commutativity criterion", commutativity},
      {"occurrence closure", occurrence_closure},
      {"atom round trip", atom_round_trip},
      {"term evaluation", term_evaluation},
      {"lifting round trips", lifting_round_trips},
      {"timestamp soundness", timestamp_soundness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].first << ": "
              << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
