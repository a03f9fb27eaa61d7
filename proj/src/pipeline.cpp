#include "sysmine/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace sysmine {

namespace fs = std::filesystem;
using nlohmann::json;

StepError::StepError(int step, const std::string& message)
    : std::runtime_error("step " + std::to_string(step) + ": " + message), step_(step) {}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

template <typename F>
auto at_step(int step, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StepError&) {
    throw;
  } catch (const std::exception& e) {
    throw StepError(step, e.what());
  }
}

std::string plural(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

}  // namespace

EventLog load_log_step(const fs::path& path) {
  auto log = at_step(1, [&] { return load_log(path); });
  if (log.empty()) throw StepError(1, "empty log");
  return log;
}

RolePolicy load_roles_step(const fs::path& path, const EventLog& log) {
  return at_step(2, [&] {
    auto policy = role_policy_from_json(read_json(path));
    for (const auto& agent : log.agents()) policy.side(agent);
    return policy;
  });
}

Structure load_structure(const fs::path& path) {
  try {
    return structure_from_json(read_json(path));
  } catch (const std::exception& e) {
    throw StepError(4, std::string("cannot load structure: ") + e.what());
  }
}

LiftingConfig load_lifting_config(const fs::path& path) {
  try {
    return lifting_config_from_json(read_json(path));
  } catch (const std::exception& e) {
    throw StepError(4, std::string("cannot load place roles: ") + e.what());
  }
}

Module load_module(const fs::path& path) { return module_from_json(read_json(path)); }

MinedRun mine_run_steps(const PipelineConfig& config, EventLog* log_out) {
  auto log = load_log_step(config.log);
  auto policy = load_roles_step(config.roles, log);
  auto run = at_step(3, [&] { return mine_run(log, policy); });
  if (log_out) *log_out = std::move(log);
  return run;
}

SystemMining mine_system_steps(const PipelineConfig& config) {
  SystemMining m;
  m.run = mine_run_steps(config, &m.log);
  m.policy = load_roles_step(config.roles, m.log);
  m.structure = load_structure(config.structure);
  m.config = load_lifting_config(config.place_roles);
  if (!config.function_priority.empty()) m.config.function_priority = config.function_priority;

  const auto run_atoms = atoms(m.run.run);
  at_step(4, [&] {
    for (const auto& atom : run_atoms) m.annotated.push_back(annotate_atom(atom, m.log, m.structure, m.policy, m.config));
    return 0;
  });
  at_step(5, [&] {
    for (const auto& a : m.annotated) m.atoms.push_back(generalize_atom(a, m.structure, m.config.function_priority));
    return 0;
  });
  m.symbolic = at_step(6, [&] { return compose_symbolic(m.atoms, m.structure); });
  m.net = at_step(7, [&] { return fold_places(m.symbolic); });
  m.schema = at_step(8, [&] { return schematize(m.net, m.config.schema); });
  m.replay = at_step(9, [&] { return replay(m.net, m.structure, m.run.run, witnesses_of(m.symbolic)); });
  return m;
}

namespace {

std::vector<std::string> run_summary(const EventLog& log, const MinedRun& mined) {
  const auto& run = mined.run;
  const auto& module = run.module();
  std::vector<std::string> out;
  out.push_back("events: " + std::to_string(log.size()));
  out.push_back("agents: " + std::to_string(log.agents().size()));
  out.push_back("run: " + plural(module.net().transitions().size(), "transition") + ", " +
                plural(module.net().places().size(), "place") + ", " +
                plural(module.left().size() + module.right().size(), "interface element"));

  std::map<std::string, NodeId> transition_of;
  for (const auto& t : module.net().transitions()) transition_of[module.label(t)] = t;
  std::size_t unordered = 0;
  const std::vector<NodeId> ts(module.net().transitions().begin(), module.net().transitions().end());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) unordered += run.concurrent(ts[i], ts[j]) ? 1 : 0;
  }
  out.push_back("causally unordered event pairs: " + std::to_string(unordered));

  const auto agents = log.agents();
  std::vector<std::string> detached;
  for (auto a = agents.begin(); a != agents.end(); ++a) {
    for (auto b = std::next(a); b != agents.end(); ++b) {
      bool related = false;
      for (const auto& ea : log.events()) {
        if (!ea.agents.count(*a)) continue;
        for (const auto& eb : log.events()) {
          if (!eb.agents.count(*b)) continue;
          const auto& ta = transition_of.at(ea.name);
          const auto& tb = transition_of.at(eb.name);
          if (ta == tb || !run.concurrent(ta, tb)) related = true;
        }
      }
      if (!related) detached.push_back(*a + "/" + *b);
    }
  }
  out.push_back("causally unrelated agent pairs: " + (detached.empty() ? "none" : detail::join(detached, ", ")));
  return out;
}

json witnesses_json(const SymbolicModule& symbolic) {
  json doc = json::object();
  for (const auto& [event, beta] : witnesses_of(symbolic)) doc[event] = beta;
  return doc;
}

}  // namespace

PipelineResult mine_run_pipeline(const PipelineConfig& config) {
  EventLog log;
  auto mined = mine_run_steps(config, &log);
  PipelineResult result;
  result.artifacts["run.json"] = dump(to_json(mined.run.module()));
  if (config.format == OutputFormat::dot) result.artifacts["run.dot"] = to_dot(mined.run.module(), "run");
  result.summary = run_summary(log, mined);
  result.warnings = mined.warnings;
  return result;
}

PipelineResult mine_system_pipeline(const PipelineConfig& config) {
  auto m = mine_system_steps(config);
  PipelineResult result;
  auto& files = result.artifacts;
  files["run.json"] = dump(to_json(m.run.run.module()));
  files["symbolic.json"] = dump(to_json(m.symbolic));
  files["system_net.json"] = dump(to_json(m.net));
  files["schema.json"] = dump(to_json(m.schema));
  files["witnesses.json"] = dump(witnesses_json(m.symbolic));
  if (config.format == OutputFormat::dot) {
    files["run.dot"] = to_dot(m.run.run.module(), "run");
    files["symbolic.dot"] = to_dot(m.symbolic.module, "symbolic");
    files["system_net.dot"] = to_dot(m.net);
    files["schema.dot"] = to_dot(m.schema);
  }

  std::size_t variables = 0;
  for (const auto& a : m.atoms) variables += a.variables.size();
  const auto& sm = m.symbolic.module;
  std::vector<std::string> symbols;
  for (const auto& [symbol, profile] : m.schema.symbols) symbols.push_back(symbol);
  auto& s = result.summary;
  s.push_back("step 1: " + plural(m.log.size(), "event"));
  s.push_back("step 2: " + plural(m.log.agents().size(), "agent"));
  s.push_back("step 3: run with " + plural(m.run.run.net().transitions().size(), "transition") + " and " +
              plural(m.run.run.net().places().size(), "place"));
  s.push_back("step 4: " + plural(m.annotated.size(), "annotated atom"));
  s.push_back("step 5: " + plural(m.atoms.size(), "system atom") + " with " + plural(variables, "variable"));
  s.push_back("step 6: symbolic module with " + plural(sm.net().places().size(), "place") + ", " +
              std::to_string(sm.left().size()) + " left and " + std::to_string(sm.right().size()) +
              " right interface elements");
  s.push_back("step 7: system net with " + plural(m.net.places.size(), "place") + ", " +
              plural(m.net.transitions.size(), "transition") + ", " + plural(m.net.token_count(), "token"));
  s.push_back("step 8: schema symbols " + (symbols.empty() ? "none" : detail::join(symbols, ", ")));
  s.push_back(std::string("conformant: ") + (m.replay.conformant ? "yes" : "no"));
  if (!m.replay.conformant && m.replay.blocked_at) s.push_back("blocked at: " + *m.replay.blocked_at);
  result.warnings = m.run.warnings;
  return result;
}

std::vector<std::string> check_modules(const Module& a, const Module& b) {
  std::vector<std::string> out;
  const auto pairs = harmonic_pairs(a, b);
  out.push_back("harmonic pairs: " + std::to_string(pairs.size()));
  for (const auto& p : pairs) out.push_back("  " + p.label + ": " + p.left_node + " ~ " + p.right_node);
  out.push_back(std::string("commutes: ") + (commutes(a, b) ? "yes" : "no"));

  std::optional<OccurrenceModule> oa, ob;
  try {
    oa = as_occurrence(a);
    ob = as_occurrence(b);
  } catch (const Error&) {
    out.push_back(std::string("dissent: not applicable, ") + (oa ? "second" : "first") +
                  " module is not an occurrence module");
  }
  if (oa && ob) {
    const auto dissent = dissenting_pairs(*oa, *ob);
    if (dissent.empty()) out.push_back("dissent: none");
    for (const auto& d : dissent) out.push_back("dissent: " + d.first.label + " / " + d.second.label);
  }

  try {
    as_occurrence(compose(a, b));
    out.push_back("composition is an occurrence module");
  } catch (const Error& e) {
    out.push_back(std::string("composition is not an occurrence module: ") + e.what());
  }
  return out;
}

std::string export_dot(const json& artifact, const Structure* structure) {
  const auto kind = artifact.value("kind", std::string{});
  if (kind == "module") return to_dot(module_from_json(artifact));
  if (kind == "symbolic_module") return to_dot(module_from_json(artifact.at("module")), "symbolic");
  if (kind == "system_net" || kind == "net_schema") {
    if (!structure) throw Error(Errc::ParseError, kind + " export needs --structure");
    if (kind == "system_net") return to_dot(system_net_from_json(artifact, *structure));
    return to_dot(net_schema_from_json(artifact, *structure));
  }
  throw Error(Errc::ParseError, "unknown artifact kind '" + kind + "'");
}

}  // namespace sysmine
