#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sysmine/occurrence.hpp"
#include "sysmine/petri.hpp"

namespace sysmine {

/// Equally labelled elements of A* (left_node) and *B (right_node).
struct HarmonicPair {
  NodeId left_node;
  NodeId right_node;
  Label label;

  friend auto operator<=>(const HarmonicPair&, const HarmonicPair&) = default;
};

/// Harmonic pairs of A* and *B, sorted by label.
std::vector<HarmonicPair> harmonic_pairs(const Module& a, const Module& b);

/// Id of the node standing for the merged pair {x, y}. Merge records are flat:
/// the id is the sorted, '+'-joined list of original ids, so merging an already
/// merged node extends the list instead of nesting it.
NodeId merged_id(const NodeId& x, const NodeId& y);
/// Original ids recorded in a (possibly merged) id.
std::vector<NodeId> merge_origins(const NodeId& id);

/// A composite together with the image x' of every operand node x.
struct Composition {
  Module module;
  std::map<NodeId, NodeId> image;
};

/// A • B. Operands must have disjoint node ids. Throws NodeIdCollision,
/// MergeTypeMismatch (a harmonic pair joins a place and a transition) and
/// ResultingDuplicateInterfaceLabel.
Module compose(const Module& a, const Module& b);
Composition compose_traced(const Module& a, const Module& b);

/// Left fold of compose over a non-empty sequence.
Module compose_all(std::span<const Module> modules);
/// As compose_all; `image` maps every node of every operand to its node in the result.
Composition compose_all_traced(std::span<const Module> modules);

/// True iff no label occurs both in *A ∪ A* and in *B ∪ B*.
bool commutes(const Module& a, const Module& b);

/// Two harmonic pairs whose causal orders in A and B contradict each other.
struct Dissent {
  HarmonicPair first;
  HarmonicPair second;

  friend auto operator<=>(const Dissent&, const Dissent&) = default;
};

std::vector<Dissent> dissenting_pairs(const OccurrenceModule& a, const OccurrenceModule& b);

/// A label-, kind-, interface- and flow-preserving bijection from `a` onto `b`.
std::optional<std::map<NodeId, NodeId>> find_isomorphism(const Module& a, const Module& b);
bool isomorphic(const Module& a, const Module& b);

}  // namespace sysmine
