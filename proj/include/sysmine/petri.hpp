#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sysmine/error.hpp"

namespace sysmine {

/// Opaque node identity. Distinct from the node's label: composition merges
/// nodes, so identity has to survive independently of what is drawn.
using NodeId = std::string;
using Label = std::string;
using Arc = std::pair<NodeId, NodeId>;

enum class NodeKind { place, transition };

/// A Petri net (P, T; F). Validated on construction: P and T are disjoint and
/// every arc runs from a place to a transition or from a transition to a place.
class Net {
 public:
  Net() = default;
  Net(std::set<NodeId> places, std::set<NodeId> transitions, std::set<Arc> arcs);

  const std::set<NodeId>& places() const noexcept { return places_; }
  const std::set<NodeId>& transitions() const noexcept { return transitions_; }
  const std::set<Arc>& arcs() const noexcept { return arcs_; }

  bool contains(const NodeId& node) const;
  bool is_place(const NodeId& node) const { return places_.count(node) != 0; }
  bool is_transition(const NodeId& node) const { return transitions_.count(node) != 0; }
  std::optional<NodeKind> kind(const NodeId& node) const;

  /// All nodes, places first, each group in id order.
  std::vector<NodeId> nodes() const;
  std::size_t size() const noexcept { return places_.size() + transitions_.size(); }

  std::vector<NodeId> preset(const NodeId& node) const;
  std::vector<NodeId> postset(const NodeId& node) const;

  friend bool operator==(const Net&, const Net&) = default;

 private:
  std::set<NodeId> places_;
  std::set<NodeId> transitions_;
  std::set<Arc> arcs_;
};

/// A net with a labelling and two interfaces: the left one (*A) and the right
/// one (A*). Within one interface labels are pairwise distinct.
class Module {
 public:
  /// The empty module.
  Module() = default;
  Module(Net net, std::map<NodeId, Label> labels, std::set<NodeId> left, std::set<NodeId> right);

  const Net& net() const noexcept { return net_; }
  const std::map<NodeId, Label>& labels() const noexcept { return labels_; }
  const Label& label(const NodeId& node) const;
  const std::set<NodeId>& left() const noexcept { return left_; }
  const std::set<NodeId>& right() const noexcept { return right_; }

  std::set<NodeId> interior() const;
  std::set<Label> left_labels() const;
  std::set<Label> right_labels() const;
  /// The node of the given interface carrying `label`, if any.
  std::optional<NodeId> left_node(const Label& label) const;
  std::optional<NodeId> right_node(const Label& label) const;

  friend bool operator==(const Module&, const Module&) = default;

 private:
  Net net_;
  std::map<NodeId, Label> labels_;
  std::set<NodeId> left_;
  std::set<NodeId> right_;
};

Module new_module(Net net, std::map<NodeId, Label> labels, std::set<NodeId> left,
                  std::set<NodeId> right);

std::set<NodeId> interior(const Module& module);

/// Copy of `module` with every node id prefixed; used to make operands of a
/// composition id-disjoint.
Module with_prefixed_ids(const Module& module, std::string_view prefix);

nlohmann::json to_json(const Module& module);
Module module_from_json(const nlohmann::json& doc);

/// Graphviz rendering: transitions as boxes, places as circles, the interior
/// inside a cluster and interface elements pinned to the left/right margin.
std::string to_dot(const Module& module, std::string_view name = "module");

}  // namespace sysmine
