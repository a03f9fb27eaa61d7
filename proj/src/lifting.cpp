#include "sysmine/lifting.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "sysmine/composition.hpp"
#include "text_util.hpp"

namespace sysmine {

LiftingConfig lifting_config_from_json(const nlohmann::json& doc) {
  LiftingConfig config;
  try {
    if (doc.contains("places")) {
      for (const auto& rule : doc.at("places")) {
        PlaceRoleRule r;
        auto optional = [&](const char* key) -> std::optional<std::string> {
          if (rule.contains(key) && !rule.at(key).is_null()) return rule.at(key).get<std::string>();
          return std::nullopt;
        };
        r.role = optional("role");
        r.after = optional("after");
        r.before = optional("before");
        r.label = rule.at("label").get<std::string>();
        if (r.label.empty()) throw Error(Errc::ParseError, "place rule with empty label");
        r.fields = rule.value("fields", std::vector<std::string>{"agent"});
        config.places.push_back(std::move(r));
      }
    }
    if (doc.contains("transitions")) {
      config.transition_labels = doc.at("transitions").get<std::map<std::string, std::string>>();
    }
    if (doc.contains("function_priority")) {
      config.function_priority = doc.at("function_priority").get<std::vector<Symbol>>();
    }
    if (doc.contains("schema")) config.schema = doc.at("schema").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return config;
}

PlaceRole resolve_place_role(const Label& place_label, const RolePolicy& policy, const LiftingConfig& config) {
  auto parts = parse_chain_place_label(place_label);
  if (!parts) throw Error(Errc::MissingPlaceRole, place_label);
  auto role_it = policy.role_of.find(parts->agent);
  if (role_it == policy.role_of.end()) throw Error(Errc::MissingPlaceRole, place_label);
  const auto& role = role_it->second;
  for (const auto& rule : config.places) {
    if (rule.role && *rule.role != role) continue;
    if (rule.after && *rule.after != parts->producer) continue;
    if (rule.before && *rule.before != parts->consumer) continue;
    return PlaceRole{rule.label, rule.fields};
  }
  if (parts->producer == "start") return PlaceRole{role + ":pre:" + parts->consumer, {"agent"}};
  return PlaceRole{role + ":post:" + parts->producer, {"agent"}};
}

namespace {

Constant resolve_constant(const Value& value, const Structure& structure) {
  auto sorts = structure.sorts_of_value(value);
  if (sorts.empty()) throw Error(Errc::UnresolvableValue, value);
  if (sorts.size() > 1) throw Error(Errc::UnresolvableValue, value + " (in several carriers)");
  return Constant{value, sorts.front()};
}

}  // namespace

ConstantTuple place_token(const Label& place_label, const EventLog& log, const Structure& structure,
                          const RolePolicy& policy, const LiftingConfig& config) {
  const auto role = resolve_place_role(place_label, policy, config);
  const auto parts = *parse_chain_place_label(place_label);
  const Event* producer = parts.producer == "start" ? nullptr : log.find(parts.producer);
  const Event* consumer = parts.consumer == "end" ? nullptr : log.find(parts.consumer);
  ConstantTuple token;
  for (const auto& field : role.fields) {
    if (field == "agent") {
      token.push_back(resolve_constant(parts.agent, structure));
      continue;
    }
    const std::string* value = nullptr;
    for (const Event* e : {producer, consumer}) {
      if (!e || value) continue;
      auto it = e->data.find(field);
      if (it != e->data.end()) value = &it->second;
    }
    if (!value) throw Error(Errc::UnresolvableValue, "no data '" + field + "' for place '" + place_label + "'");
    token.push_back(resolve_constant(*value, structure));
  }
  return token;
}

AnnotatedAtom annotate_atom(const OccurrenceAtom& atom, const EventLog& log, const Structure& structure,
                            const RolePolicy& policy, const LiftingConfig& config) {
  const auto& module = atom.module.module();
  AnnotatedAtom out{atom, module.label(atom.transition), {}, {}, {}};
  if (!log.find(out.event)) throw Error(Errc::UnresolvableValue, "event '" + out.event + "' is not in the log");
  auto label_it = config.transition_labels.find(out.event);
  out.system_label = label_it == config.transition_labels.end() ? out.event : label_it->second;
  for (const auto& arc : module.net().arcs()) {
    const auto& place = arc.first == atom.transition ? arc.second : arc.first;
    const auto& label = module.label(place);
    out.place_roles[place] = resolve_place_role(label, policy, config).label;
    out.inscriptions[arc] = place_token(label, log, structure, policy, config);
  }
  return out;
}

namespace {

std::string variable_base(const Sort& sort, const Signature& signature) {
  auto declared = signature.variables_of(sort);
  if (!declared.empty()) return declared.front();
  std::string base;
  for (char c : sort) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      base = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      break;
    }
  }
  if (base.empty() || signature.variables.count(base) || signature.functions.count(base)) {
    base = "v_";
    for (char c : sort) base += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return base;
}

struct Candidate {
  Symbol function;
  Constant argument;
};

Signature with_variables(const Signature& base, const std::map<std::string, Sort>& variables) {
  Signature sig = base;
  sig.variables = variables;
  return sig;
}

}  // namespace

SystemAtom generalize_atom(const AnnotatedAtom& atom, const Structure& structure, std::span<const Symbol> priority) {
  const auto& signature = structure.signature();

  std::vector<Constant> constants;
  for (const auto& [arc, tuple] : atom.inscriptions) {
    for (const auto& c : tuple) {
      if (std::find(constants.begin(), constants.end(), c) == constants.end()) constants.push_back(c);
    }
  }

  auto images_of = [&](const Constant& c) {
    std::vector<Candidate> out;
    for (const auto& [name, sig] : signature.functions) {
      if (sig.args.size() != 1 || sig.result != c.sort) continue;
      for (const auto& other : constants) {
        if (other == c || other.sort != sig.args.front()) continue;
        if (structure.apply(name, {other.value}) == c.value) out.push_back(Candidate{name, other});
      }
    }
    return out;
  };

  std::set<Constant> roots;
  std::map<Constant, std::vector<Candidate>> candidates;
  for (const auto& c : constants) {
    auto found = images_of(c);
    if (found.empty()) {
      roots.insert(c);
    } else {
      candidates[c] = std::move(found);
    }
  }
  // an image of a non-root only would need a nested term; such constants get a variable
  std::map<Constant, Candidate> derived;
  for (auto& [c, found] : candidates) {
    std::erase_if(found, [&](const Candidate& k) { return !roots.count(k.argument); });
    if (found.empty()) continue;
    if (found.size() == 1) {
      derived.emplace(c, found.front());
      continue;
    }
    std::optional<Candidate> chosen;
    for (const auto& g : priority) {
      std::vector<Candidate> with_g;
      for (const auto& k : found) {
        if (k.function == g) with_g.push_back(k);
      }
      if (with_g.size() == 1) chosen = with_g.front();
      if (!with_g.empty()) break;
    }
    if (!chosen) {
      std::string detail = c.value + " =";
      for (const auto& k : found) detail += " " + k.function + "(" + k.argument.value + ")";
      throw Error(Errc::AmbiguousFunctionalMatch, detail);
    }
    derived.emplace(c, *chosen);
  }

  SystemAtom out{atom.atom, atom.event, atom.system_label, {}, {}, {}, atom.place_roles};
  std::map<Constant, std::string> variable_of;
  std::map<Sort, std::size_t> per_sort;
  std::set<std::string> used;
  for (const auto& c : constants) {
    if (derived.count(c)) continue;
    const auto base = variable_base(c.sort, signature);
    std::string name;
    do {
      const auto k = per_sort[c.sort]++;
      name = k == 0 ? base : base + std::to_string(k + 1);
    } while (used.count(name) || signature.functions.count(name));
    used.insert(name);
    variable_of[c] = name;
    out.variables[name] = c.sort;
    out.witness[name] = c.value;
  }

  auto term_of = [&](const Constant& c) {
    if (auto it = derived.find(c); it != derived.end()) {
      return Term::apply(it->second.function, {Term::var(variable_of.at(it->second.argument))});
    }
    return Term::var(variable_of.at(c));
  };
  for (const auto& [arc, tuple] : atom.inscriptions) {
    TermTuple terms;
    for (const auto& c : tuple) terms.push_back(term_of(c));
    out.inscriptions[arc] = std::move(terms);
  }
  return out;
}

std::map<Arc, ConstantTuple> instantiate(const SystemAtom& atom, const Structure& structure) {
  const auto sig = with_variables(structure.signature(), atom.variables);
  std::map<Arc, ConstantTuple> out;
  for (const auto& [arc, terms] : atom.inscriptions) {
    const auto values = eval(terms, structure, atom.witness);
    const auto sorts = sort_of(terms, sig);
    ConstantTuple tuple;
    for (std::size_t i = 0; i < values.size(); ++i) tuple.push_back(Constant{values[i], sorts[i]});
    out[arc] = std::move(tuple);
  }
  return out;
}

namespace {

void rename_variable(SystemAtom& atom, const std::string& from, const std::string& to) {
  std::function<void(Term&)> visit = [&](Term& t) {
    if (t.kind == Term::Kind::variable && t.name == from) t.name = to;
    for (auto& a : t.args) visit(a);
  };
  for (auto& [arc, terms] : atom.inscriptions) {
    for (auto& t : terms) visit(t);
  }
  atom.variables[to] = atom.variables.at(from);
  atom.variables.erase(from);
  atom.witness[to] = atom.witness.at(from);
  atom.witness.erase(from);
}

struct Endpoint {
  std::size_t atom;
  Arc arc;  // in the atom's own ids
};

}  // namespace

SymbolicModule compose_symbolic(std::span<const SystemAtom> input, const Structure& structure) {
  SymbolicModule out;
  if (input.empty()) return out;
  std::vector<SystemAtom> atoms(input.begin(), input.end());
  std::vector<Module> modules;
  for (const auto& a : atoms) modules.push_back(a.atom.module.module());
  auto composed = compose_all_traced(modules);
  const auto& image = composed.image;

  std::map<NodeId, Endpoint> producer, consumer;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (const auto& [arc, terms] : atoms[i].inscriptions) {
      if (arc.first == atoms[i].atom.transition) {
        producer[image.at(arc.second)] = Endpoint{i, arc};
      } else {
        consumer[image.at(arc.first)] = Endpoint{i, arc};
      }
    }
  }

  // align bare variables flowing through shared places
  for (const auto& [place, in] : consumer) {
    auto p = producer.find(place);
    if (p == producer.end()) continue;
    const auto& produced = atoms[p->second.atom].inscriptions.at(p->second.arc);
    auto& target = atoms[in.atom];
    const auto consumed = target.inscriptions.at(in.arc);
    if (produced.size() != consumed.size()) continue;
    for (std::size_t k = 0; k < produced.size(); ++k) {
      const auto& a = produced[k];
      const auto& b = consumed[k];
      if (a.kind != Term::Kind::variable || b.kind != Term::Kind::variable || a.name == b.name) continue;
      const auto& source = atoms[p->second.atom];
      if (source.variables.at(a.name) != target.variables.at(b.name)) continue;
      if (target.variables.count(a.name)) continue;
      rename_variable(target, b.name, a.name);
    }
  }

  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    const auto sig = with_variables(structure.signature(), a.variables);
    const auto t = image.at(a.atom.transition);
    out.transitions[t] = SymbolicTransition{a.event, a.system_label, a.variables, a.witness};
    for (const auto& [arc, terms] : a.inscriptions) {
      const Arc mapped{image.at(arc.first), image.at(arc.second)};
      out.inscriptions[mapped] = terms;
      const auto& place = arc.first == a.atom.transition ? arc.second : arc.first;
      const auto& mapped_place = arc.first == a.atom.transition ? mapped.second : mapped.first;
      const auto profile = sort_of(terms, sig);
      auto [it, fresh] = out.place_sorts.emplace(mapped_place, profile);
      if (!fresh && it->second != profile) {
        throw Error(Errc::SortClash, "place '" + composed.module.label(mapped_place) + "'");
      }
      out.place_roles[mapped_place] = a.place_roles.at(place);
    }
  }

  for (const auto& place : composed.module.net().places()) {
    const auto& from = producer.count(place) ? producer.at(place) : consumer.at(place);
    const auto& a = atoms[from.atom];
    out.tokens[place] = eval(a.inscriptions.at(from.arc), structure, a.witness);
  }
  out.module = std::move(composed.module);
  return out;
}

std::vector<std::pair<std::string, TermTuple>> SystemNet::inputs(const NodeId& transition) const {
  std::vector<std::pair<std::string, TermTuple>> out;
  for (const auto& [arc, inscriptions] : arcs) {
    if (arc.second != transition) continue;
    for (const auto& terms : inscriptions) out.emplace_back(arc.first, terms);
  }
  return out;
}

std::vector<std::pair<std::string, TermTuple>> SystemNet::outputs(const NodeId& transition) const {
  std::vector<std::pair<std::string, TermTuple>> out;
  for (const auto& [arc, inscriptions] : arcs) {
    if (arc.first != transition) continue;
    for (const auto& terms : inscriptions) out.emplace_back(arc.second, terms);
  }
  return out;
}

std::size_t SystemNet::token_count() const {
  std::size_t n = 0;
  for (const auto& [place, tokens] : marking) n += tokens.size();
  return n;
}

SystemNet fold_places(const SymbolicModule& module) {
  SystemNet net;
  const auto& m = module.module;
  for (const auto& place : m.net().places()) {
    const auto& role = module.place_roles.at(place);
    const auto& profile = module.place_sorts.at(place);
    auto [it, fresh] = net.places.emplace(role, profile);
    if (!fresh && it->second != profile) throw Error(Errc::SortClash, "place role '" + role + "'");
  }
  std::map<NodeId, std::string> name_of;
  for (const auto& [id, t] : module.transitions) {
    if (net.transitions.count(t.event)) throw Error(Errc::SortClash, "two transitions for event '" + t.event + "'");
    name_of[id] = t.event;
    net.transitions[t.event] = SystemTransition{t.label, t.variables};
  }
  for (const auto& [arc, terms] : module.inscriptions) {
    const bool input = m.net().is_place(arc.first);
    const Arc folded = input ? Arc{module.place_roles.at(arc.first), name_of.at(arc.second)}
                             : Arc{name_of.at(arc.first), module.place_roles.at(arc.second)};
    net.arcs[folded].push_back(terms);
  }
  for (auto& [arc, inscriptions] : net.arcs) std::sort(inscriptions.begin(), inscriptions.end());
  for (const auto& place : m.net().places()) {
    if (m.net().preset(place).empty()) net.marking[module.place_roles.at(place)].insert(module.tokens.at(place));
  }
  return net;
}

NetSchema schematize(const SystemNet& net, const std::map<std::string, std::string>& mapping) {
  NetSchema schema;
  schema.net = net;
  schema.net.marking.clear();
  for (const auto& [place, tokens] : net.marking) {
    if (!tokens.empty() && !mapping.count(place)) throw Error(Errc::UnmappedMarkedPlace, place);
  }
  for (const auto& [place, symbol] : mapping) {
    auto it = net.places.find(place);
    if (it == net.places.end()) throw Error(Errc::UnknownNode, place);
    auto [sym, fresh] = schema.symbols.emplace(symbol, it->second);
    if (!fresh && sym->second != it->second) throw Error(Errc::SortClash, "symbol " + symbol);
    schema.marking[place].push_back(SymbolicToken{symbol, true});
  }
  return schema;
}

std::map<std::string, std::set<ValueTuple>> interpretation_of(const SystemNet& net,
                                                             const std::map<std::string, std::string>& mapping) {
  std::map<std::string, std::set<ValueTuple>> out;
  for (const auto& [place, symbol] : mapping) {
    auto& elements = out[symbol];
    if (auto it = net.marking.find(place); it != net.marking.end()) elements.insert(it->second.begin(), it->second.end());
  }
  return out;
}

SystemNet instantiate(const NetSchema& schema, const std::map<std::string, std::set<ValueTuple>>& interpretation) {
  SystemNet net = schema.net;
  net.marking.clear();
  for (const auto& [place, tokens] : schema.marking) {
    for (const auto& token : tokens) {
      auto it = interpretation.find(token.symbol);
      if (it == interpretation.end()) throw Error(Errc::UnknownSymbol, token.symbol);
      if (token.elm) {
        for (const auto& element : it->second) net.marking[place].insert(element);
      } else {
        std::vector<std::string> rendered;
        for (const auto& element : it->second) rendered.push_back(to_string(element));
        net.marking[place].insert(ValueTuple{"{" + detail::join(rendered, ", ") + "}"});
      }
    }
  }
  for (auto it = net.marking.begin(); it != net.marking.end();) {
    it = it->second.empty() ? net.marking.erase(it) : std::next(it);
  }
  return net;
}

std::vector<std::pair<std::string, ValueTuple>> missing_tokens(const SystemNet& net, const Structure& structure,
                                                               const NodeId& transition, const Valuation& beta) {
  if (!net.transitions.count(transition)) throw Error(Errc::UnknownNode, transition);
  std::map<std::string, std::multiset<ValueTuple>> needed;
  for (const auto& [place, terms] : net.inputs(transition)) needed[place].insert(eval(terms, structure, beta));
  std::vector<std::pair<std::string, ValueTuple>> out;
  for (const auto& [place, tokens] : needed) {
    auto have = net.marking.find(place);
    for (auto it = tokens.begin(); it != tokens.end(); it = tokens.upper_bound(*it)) {
      const auto want = tokens.count(*it);
      const auto got = have == net.marking.end() ? 0 : have->second.count(*it);
      for (auto k = got; k < want; ++k) out.emplace_back(place, *it);
    }
  }
  return out;
}

bool enabled(const SystemNet& net, const Structure& structure, const NodeId& transition, const Valuation& beta) {
  return missing_tokens(net, structure, transition, beta).empty();
}

SystemNet fire(const SystemNet& net, const Structure& structure, const NodeId& transition, const Valuation& beta) {
  auto missing = missing_tokens(net, structure, transition, beta);
  if (!missing.empty()) {
    std::string detail = transition + " under {";
    bool first = true;
    for (const auto& [var, value] : beta) {
      detail += (first ? "" : ", ") + var + "=" + value;
      first = false;
    }
    detail += "}; missing";
    for (const auto& [place, token] : missing) detail += " " + place + ":" + to_string(token);
    throw Error(Errc::NotEnabled, detail);
  }
  SystemNet next = net;
  for (const auto& [place, terms] : net.inputs(transition)) {
    auto& tokens = next.marking.at(place);
    tokens.erase(tokens.find(eval(terms, structure, beta)));
    if (tokens.empty()) next.marking.erase(place);
  }
  for (const auto& [place, terms] : net.outputs(transition)) next.marking[place].insert(eval(terms, structure, beta));
  return next;
}

std::vector<Valuation> enabling_valuations(const SystemNet& net, const Structure& structure,
                                           const NodeId& transition, const Valuation& partial) {
  auto it = net.transitions.find(transition);
  if (it == net.transitions.end()) throw Error(Errc::UnknownNode, transition);
  std::vector<std::pair<std::string, Sort>> free;
  for (const auto& [name, sort] : it->second.variables) {
    if (!partial.count(name)) free.emplace_back(name, sort);
  }
  std::vector<Valuation> out;
  Valuation beta = partial;
  std::function<void(std::size_t)> search = [&](std::size_t i) {
    if (i == free.size()) {
      if (enabled(net, structure, transition, beta)) out.push_back(beta);
      return;
    }
    for (const auto& v : structure.carrier(free[i].second)) {
      beta[free[i].first] = v;
      search(i + 1);
    }
    beta.erase(free[i].first);
  };
  search(0);
  return out;
}

ConformanceReport replay(const SystemNet& net, const Structure& structure, const OccurrenceModule& run,
                         const std::map<std::string, Valuation>& witnesses) {
  const auto order = topological_transitions(run);
  const auto& module = run.module();
  for (const auto& t : order) {
    if (!net.transitions.count(module.label(t))) throw Error(Errc::UnknownTransitionLabel, module.label(t));
  }
  const std::size_t n = order.size();
  std::vector<std::vector<std::size_t>> predecessors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (run.causally_before(order[j], order[i])) predecessors[i].push_back(j);
    }
  }

  ConformanceReport report;
  std::set<std::vector<bool>> dead;
  std::vector<bool> fired(n, false);
  std::vector<std::string> sequence;
  std::function<bool(const SystemNet&)> search = [&](const SystemNet& state) {
    if (sequence.size() == n) return true;
    if (dead.count(fired)) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (fired[i]) continue;
      if (!std::all_of(predecessors[i].begin(), predecessors[i].end(), [&](std::size_t j) { return fired[j]; })) {
        continue;
      }
      const auto& label = module.label(order[i]);
      auto w = witnesses.find(label);
      const Valuation beta = w == witnesses.end() ? Valuation{} : w->second;
      std::optional<SystemNet> next;
      try {
        auto missing = missing_tokens(state, structure, label, beta);
        if (missing.empty()) {
          next = fire(state, structure, label, beta);
        } else if (!report.blocked_at) {
          report.blocked_at = label;
          report.missing = std::move(missing);
        }
      } catch (const Error& e) {
        if (e.code() != Errc::UnboundVariable && e.code() != Errc::IllSorted) throw;
        if (!report.blocked_at) report.blocked_at = label + " (" + e.what() + ")";
      }
      if (!next) continue;
      fired[i] = true;
      sequence.push_back(label);
      if (search(*next)) return true;
      fired[i] = false;
      sequence.pop_back();
    }
    dead.insert(fired);
    return false;
  };
  report.conformant = search(net);
  if (report.conformant) {
    report.firing_sequence = sequence;
    report.blocked_at.reset();
    report.missing.clear();
  }
  return report;
}

std::map<std::string, Valuation> witnesses_of(const SymbolicModule& module) {
  std::map<std::string, Valuation> out;
  for (const auto& [id, t] : module.transitions) out[t.event] = t.witness;
  return out;
}

namespace {

using nlohmann::json;

json terms_json(const std::vector<TermTuple>& inscriptions) {
  json out = json::array();
  for (const auto& t : inscriptions) out.push_back(to_string(t));
  return out;
}

json transitions_json(const SystemNet& net) {
  json out = json::array();
  for (const auto& [id, t] : net.transitions) {
    json inputs = json::array(), outputs = json::array();
    for (const auto& [arc, inscriptions] : net.arcs) {
      if (arc.second == id) inputs.push_back({{"place", arc.first}, {"terms", terms_json(inscriptions)}});
      if (arc.first == id) outputs.push_back({{"place", arc.second}, {"terms", terms_json(inscriptions)}});
    }
    out.push_back({{"id", id},
                   {"label", t.label},
                   {"variables", t.variables},
                   {"inputs", std::move(inputs)},
                   {"outputs", std::move(outputs)}});
  }
  return out;
}

json places_json(const SystemNet& net) {
  json out = json::array();
  for (const auto& [id, sorts] : net.places) out.push_back({{"id", id}, {"sorts", sorts}});
  return out;
}

SystemNet net_structure_from_json(const json& doc, const Structure& structure) {
  SystemNet net;
  for (const auto& p : doc.at("places")) {
    net.places[p.at("id").get<std::string>()] = p.at("sorts").get<SortProfile>();
  }
  for (const auto& t : doc.at("transitions")) {
    const auto id = t.at("id").get<std::string>();
    SystemTransition tr{t.value("label", id), t.value("variables", std::map<std::string, Sort>{})};
    auto read = [&](const char* key, bool input) {
      const auto arcs = t.value(key, json::array());
      for (const auto& arc : arcs) {
        const auto place = arc.at("place").get<std::string>();
        if (!net.places.count(place)) throw Error(Errc::UnknownNode, place);
        auto& inscriptions = net.arcs[input ? Arc{place, id} : Arc{id, place}];
        for (const auto& text : arc.at("terms")) {
          inscriptions.push_back(parse_terms(text.get<std::string>(), structure, tr.variables));
        }
        std::sort(inscriptions.begin(), inscriptions.end());
      }
    };
    read("inputs", true);
    read("outputs", false);
    net.transitions[id] = std::move(tr);
  }
  return net;
}

}  // namespace

json to_json(const SymbolicModule& module) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "symbolic_module";
  doc["module"] = to_json(module.module);
  json inscriptions = json::array();
  for (const auto& [arc, terms] : module.inscriptions) {
    inscriptions.push_back({{"from", arc.first}, {"to", arc.second}, {"terms", to_string(terms)}});
  }
  doc["inscriptions"] = std::move(inscriptions);
  doc["place_roles"] = module.place_roles;
  json transitions = json::object();
  for (const auto& [id, t] : module.transitions) {
    transitions[id] = {{"event", t.event}, {"label", t.label}, {"variables", t.variables}, {"witness", t.witness}};
  }
  doc["transitions"] = std::move(transitions);
  json tokens = json::object();
  for (const auto& [place, token] : module.tokens) tokens[place] = token;
  doc["tokens"] = std::move(tokens);
  return doc;
}

json to_json(const SystemNet& net) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "system_net";
  doc["places"] = places_json(net);
  doc["transitions"] = transitions_json(net);
  json marking = json::object();
  for (const auto& [place, tokens] : net.marking) {
    json list = json::array();
    for (const auto& token : tokens) list.push_back(token);
    marking[place] = std::move(list);
  }
  doc["marking"] = std::move(marking);
  return doc;
}

json to_json(const NetSchema& schema) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "net_schema";
  doc["places"] = places_json(schema.net);
  doc["transitions"] = transitions_json(schema.net);
  json marking = json::object();
  for (const auto& [place, tokens] : schema.marking) {
    json list = json::array();
    for (const auto& t : tokens) list.push_back({{"symbol", t.symbol}, {"elm", t.elm}});
    marking[place] = std::move(list);
  }
  doc["marking"] = std::move(marking);
  doc["symbols"] = schema.symbols;
  return doc;
}

SystemNet system_net_from_json(const json& doc, const Structure& structure) {
  try {
    auto net = net_structure_from_json(doc, structure);
    const auto marking = doc.value("marking", json::object());
    for (const auto& [place, tokens] : marking.items()) {
      auto it = net.places.find(place);
      if (it == net.places.end()) throw Error(Errc::UnknownNode, place);
      for (const auto& token : tokens) {
        auto values = token.get<ValueTuple>();
        if (values.size() != it->second.size()) throw Error(Errc::SortClash, "token arity on " + place);
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (!structure.in_carrier(it->second[i], values[i])) {
            throw Error(Errc::ValueOutsideCarrier, values[i] + " on " + place);
          }
        }
        net.marking[place].insert(std::move(values));
      }
    }
    return net;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

NetSchema net_schema_from_json(const json& doc, const Structure& structure) {
  try {
    NetSchema schema;
    schema.net = net_structure_from_json(doc, structure);
    schema.symbols = doc.value("symbols", std::map<std::string, SortProfile>{});
    const auto marking = doc.value("marking", json::object());
    for (const auto& [place, tokens] : marking.items()) {
      if (!schema.net.places.count(place)) throw Error(Errc::UnknownNode, place);
      for (const auto& t : tokens) {
        SymbolicToken token{t.at("symbol").get<std::string>(), t.value("elm", true)};
        if (!schema.symbols.count(token.symbol)) throw Error(Errc::UnknownSymbol, token.symbol);
        schema.marking[place].push_back(std::move(token));
      }
    }
    return schema;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

namespace {

void write_net_dot(std::ostringstream& out, const SystemNet& net,
                   const std::function<std::string(const std::string&)>& place_contents) {
  using detail::dot_quote;
  for (const auto& [id, sorts] : net.places) {
    out << "  " << dot_quote("p:" + id) << " [shape=ellipse, label=" << dot_quote(id + place_contents(id)) << "];\n";
  }
  for (const auto& [id, t] : net.transitions) {
    out << "  " << dot_quote("t:" + id) << " [shape=box, label=" << dot_quote(t.label) << "];\n";
  }
  for (const auto& [arc, inscriptions] : net.arcs) {
    const bool input = net.places.count(arc.first) != 0;
    std::vector<std::string> terms;
    for (const auto& t : inscriptions) terms.push_back(to_string(t));
    out << "  " << dot_quote((input ? "p:" : "t:") + arc.first) << " -> "
        << dot_quote((input ? "t:" : "p:") + arc.second) << " [label=" << dot_quote(detail::join(terms, " + "))
        << "];\n";
  }
}

}  // namespace

std::string to_dot(const SystemNet& net, std::string_view name) {
  std::ostringstream out;
  out << "digraph " << detail::dot_quote(name) << " {\n  rankdir=LR;\n";
  write_net_dot(out, net, [&](const std::string& place) {
    std::string text;
    if (auto it = net.marking.find(place); it != net.marking.end()) {
      for (const auto& token : it->second) text += "\n" + to_string(token);
    }
    return text;
  });
  out << "}\n";
  return out.str();
}

std::string to_dot(const NetSchema& schema, std::string_view name) {
  std::ostringstream out;
  out << "digraph " << detail::dot_quote(name) << " {\n  rankdir=LR;\n";
  write_net_dot(out, schema.net, [&](const std::string& place) {
    std::string text;
    if (auto it = schema.marking.find(place); it != schema.marking.end()) {
      for (const auto& token : it->second) text += "\n" + std::string(token.elm ? "elm " : "") + token.symbol;
    }
    return text;
  });
  out << "}\n";
  return out.str();
}

}  // namespace sysmine
