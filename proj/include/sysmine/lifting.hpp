#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysmine/algebra.hpp"
#include "sysmine/logkit.hpp"
#include "sysmine/occurrence.hpp"

namespace sysmine {

struct Constant {
  Value value;
  Sort sort;

  friend auto operator<=>(const Constant&, const Constant&) = default;
};
using ConstantTuple = std::vector<Constant>;

/// Assigns a role label and a token layout to chain places. A rule matches a
/// place when every present key matches: `role` is the agent's role, `after`
/// the producing event (`start` for chain heads), `before` the consuming event
/// (`end` for chain tails). `fields` lists what the place's token holds, each
/// entry either `agent` or a key of the event data.
struct PlaceRoleRule {
  std::optional<std::string> role;
  std::optional<std::string> after;
  std::optional<std::string> before;
  std::string label;
  std::vector<std::string> fields;
};

struct LiftingConfig {
  std::vector<PlaceRoleRule> places;
  /// Event name -> transition label in the system net; unmapped events keep their name.
  std::map<std::string, std::string> transition_labels;
  /// Breaks ties when a constant is the image of several (function, constant) pairs.
  std::vector<Symbol> function_priority;
  /// Place role -> set symbol for the symbolic initial marking.
  std::map<std::string, std::string> schema;
};

/// `{"places": [{"role", "after", "before", "label", "fields"}], "transitions":
/// {event: label}, "function_priority": [...], "schema": {place: symbol}}`
LiftingConfig lifting_config_from_json(const nlohmann::json& doc);

struct PlaceRole {
  std::string label;
  std::vector<std::string> fields;
};

/// First matching rule; without one, `role:post:producer` (or `role:pre:consumer`
/// for chain heads) holding just the agent. Throws MissingPlaceRole when the
/// label is not a chain-place label or the agent has no role.
PlaceRole resolve_place_role(const Label& place_label, const RolePolicy& policy, const LiftingConfig& config);

/// Token of a chain place: fields read from the producing event's data, falling
/// back to the consuming event's. Throws UnresolvableValue, MissingPlaceRole.
ConstantTuple place_token(const Label& place_label, const EventLog& log, const Structure& structure,
                          const RolePolicy& policy, const LiftingConfig& config);

/// An occurrence atom whose place contents moved onto its arcs.
struct AnnotatedAtom {
  OccurrenceAtom atom;
  std::string event;
  std::string system_label;
  std::map<Arc, ConstantTuple> inscriptions;
  std::map<NodeId, std::string> place_roles;
};

AnnotatedAtom annotate_atom(const OccurrenceAtom& atom, const EventLog& log, const Structure& structure,
                            const RolePolicy& policy, const LiftingConfig& config);

/// An atom inscribed with terms, plus the valuation that turns it back into its
/// annotated source.
struct SystemAtom {
  OccurrenceAtom atom;
  std::string event;
  std::string system_label;
  std::map<Arc, TermTuple> inscriptions;
  std::map<std::string, Sort> variables;
  Valuation witness;
  std::map<NodeId, std::string> place_roles;
};

/// Replaces constants by variables, one per distinct constant. A constant c that
/// equals g(c') for a unary g and a constant c' of the same atom which itself
/// is not such an image becomes the term g(v') instead. Several candidates are
/// resolved by `priority`; otherwise AmbiguousFunctionalMatch. Variables are
/// named after the first declared variable of their sort (x for clients, ...),
/// with numeric suffixes for further variables of that sort.
SystemAtom generalize_atom(const AnnotatedAtom& atom, const Structure& structure,
                           std::span<const Symbol> priority = {});

/// Evaluates every inscription under the witness.
std::map<Arc, ConstantTuple> instantiate(const SystemAtom& atom, const Structure& structure);

struct SymbolicTransition {
  std::string event;
  std::string label;
  std::map<std::string, Sort> variables;
  Valuation witness;
};

/// Composition of system atoms: a run whose arcs carry terms.
struct SymbolicModule {
  Module module;
  std::map<Arc, TermTuple> inscriptions;
  std::map<NodeId, std::string> place_roles;
  std::map<NodeId, SortProfile> place_sorts;
  std::map<NodeId, SymbolicTransition> transitions;
  /// Place contents given by the firing rule under the witnesses.
  std::map<NodeId, ValueTuple> tokens;
};

/// Composes the atoms with •. Where a bare variable flows through a shared
/// place under two names of the same sort, the consumer's name is aligned to
/// the producer's. Throws SortClash.
SymbolicModule compose_symbolic(std::span<const SystemAtom> atoms, const Structure& structure);

using Marking = std::map<std::string, std::multiset<ValueTuple>>;

struct SystemTransition {
  Label label;
  std::map<std::string, Sort> variables;

  friend bool operator==(const SystemTransition&, const SystemTransition&) = default;
};

/// High-level net: places are role labels with a sort profile, arcs carry a
/// multiset of term tuples, the marking is a multiset of value tuples per place.
struct SystemNet {
  std::map<std::string, SortProfile> places;
  std::map<NodeId, SystemTransition> transitions;
  std::map<Arc, std::vector<TermTuple>> arcs;
  Marking marking;

  std::vector<std::pair<std::string, TermTuple>> inputs(const NodeId& transition) const;
  std::vector<std::pair<std::string, TermTuple>> outputs(const NodeId& transition) const;
  std::size_t token_count() const;

  friend bool operator==(const SystemNet&, const SystemNet&) = default;
};

/// Identifies equally labelled (same role) places. Transitions are named by
/// their event; the initial marking collects the tokens of places without a
/// producer. Throws SortClash.
SystemNet fold_places(const SymbolicModule& module);

struct SymbolicToken {
  std::string symbol;
  bool elm = true;  // one token per element of the interpreted set, not the set as one token

  friend bool operator==(const SymbolicToken&, const SymbolicToken&) = default;
};

struct NetSchema {
  SystemNet net;  // concrete marking left empty
  std::map<std::string, std::vector<SymbolicToken>> marking;
  std::map<std::string, SortProfile> symbols;

  friend bool operator==(const NetSchema&, const NetSchema&) = default;
};

/// Throws UnmappedMarkedPlace, UnknownNode, SortClash.
NetSchema schematize(const SystemNet& net, const std::map<std::string, std::string>& mapping);
/// The concrete marking read back as an interpretation of the set symbols.
std::map<std::string, std::set<ValueTuple>> interpretation_of(const SystemNet& net,
                                                             const std::map<std::string, std::string>& mapping);
/// Concrete net for an interpretation of the set symbols. Throws UnknownSymbol.
SystemNet instantiate(const NetSchema& schema, const std::map<std::string, std::set<ValueTuple>>& interpretation);

/// Tokens the transition needs under β but the marking lacks.
std::vector<std::pair<std::string, ValueTuple>> missing_tokens(const SystemNet& net, const Structure& structure,
                                                               const NodeId& transition, const Valuation& beta);
bool enabled(const SystemNet& net, const Structure& structure, const NodeId& transition, const Valuation& beta);
/// Throws NotEnabled (listing the missing tokens), UnboundVariable, UnknownNode.
SystemNet fire(const SystemNet& net, const Structure& structure, const NodeId& transition, const Valuation& beta);
/// Every valuation of the transition's variables that extends `partial` and
/// enables it, by enumeration of the carriers.
std::vector<Valuation> enabling_valuations(const SystemNet& net, const Structure& structure,
                                           const NodeId& transition, const Valuation& partial = {});

struct ConformanceReport {
  bool conformant = false;
  std::vector<std::string> firing_sequence;  // net transitions, in firing order
  std::optional<std::string> blocked_at;
  std::vector<std::pair<std::string, ValueTuple>> missing;
};

/// Searches for a linearization of the run that the net can fire, transition t
/// of the run firing its namesake net transition under witnesses[label(t)].
/// Throws UnknownTransitionLabel.
ConformanceReport replay(const SystemNet& net, const Structure& structure, const OccurrenceModule& run,
                         const std::map<std::string, Valuation>& witnesses);

/// Witness valuations keyed by event name.
std::map<std::string, Valuation> witnesses_of(const SymbolicModule& module);

nlohmann::json to_json(const SymbolicModule& module);
nlohmann::json to_json(const SystemNet& net);
nlohmann::json to_json(const NetSchema& schema);
SystemNet system_net_from_json(const nlohmann::json& doc, const Structure& structure);
NetSchema net_schema_from_json(const nlohmann::json& doc, const Structure& structure);

/// Graphviz rendering with term inscriptions on arcs and tokens inside places.
std::string to_dot(const SystemNet& net, std::string_view name = "system");
std::string to_dot(const NetSchema& schema, std::string_view name = "schema");

}  // namespace sysmine
