#pragma once

#include <map>
#include <span>
#include <vector>

#include "sysmine/petri.hpp"

namespace sysmine {

/// A module whose net is an occurrence net: F+ is irreflexive and every place
/// has at most one incoming and one outgoing arc. Carries F+ (the causal order).
class OccurrenceModule {
 public:
  const Module& module() const noexcept { return module_; }
  const Net& net() const noexcept { return module_.net(); }

  /// (a, b) in F+. Throws UnknownNode.
  bool causally_before(const NodeId& a, const NodeId& b) const;
  /// Neither a < b nor b < a, and a != b.
  bool concurrent(const NodeId& a, const NodeId& b) const;

  friend bool operator==(const OccurrenceModule& a, const OccurrenceModule& b) {
    return a.module_ == b.module_;
  }

 private:
  friend OccurrenceModule as_occurrence(Module module);

  std::size_t index_of(const NodeId& node) const;

  Module module_;
  std::vector<NodeId> nodes_;
  std::map<NodeId, std::size_t> index_;
  std::vector<std::vector<bool>> before_;  // before_[i][j] iff nodes_[i] < nodes_[j]
};

/// Validates the occurrence-net conditions. Throws CyclicFlow or
/// PlaceBranching (the latter naming the offending place).
OccurrenceModule as_occurrence(Module module);

bool causally_before(const OccurrenceModule& run, const NodeId& a, const NodeId& b);

/// Linearization of the transitions extending the causal order. Among the
/// currently minimal transitions the one with the smallest label goes first
/// (ties on label fall back to the id).
std::vector<NodeId> topological_transitions(const OccurrenceModule& run);

/// True iff `order` lists every transition exactly once and never places a
/// transition before one of its causal predecessors.
bool is_linearization(const OccurrenceModule& run, std::span<const NodeId> order);

/// One transition with its adjacent places: pre-places form the left (top)
/// interface, post-places the right (bottom) one. The transition keeps its id
/// and label; an adjacent place `p` of transition `t` gets the id `p@t` and
/// keeps the label of `p`.
struct OccurrenceAtom {
  NodeId transition;
  OccurrenceModule module;
};

OccurrenceAtom atom_of(const OccurrenceModule& run, const NodeId& transition);

/// Atoms of all transitions, ordered by topological_transitions().
std::vector<OccurrenceAtom> atoms(const OccurrenceModule& run);
/// Atoms in a caller-chosen order. Throws InvalidLinearization unless
/// is_linearization(run, order).
std::vector<OccurrenceAtom> atoms(const OccurrenceModule& run, std::span<const NodeId> order);

/// The run's net with interface transitions made interior, places without a
/// producer on the left interface and places without a consumer on the right.
/// This is what composing the atoms of `run` rebuilds.
Module boundary_form(const OccurrenceModule& run);

}  // namespace sysmine
