#include "sysmine/petri.hpp"

#include <sstream>

#include "text_util.hpp"

namespace sysmine {

Net::Net(std::set<NodeId> places, std::set<NodeId> transitions, std::set<Arc> arcs)
    : places_(std::move(places)), transitions_(std::move(transitions)), arcs_(std::move(arcs)) {
  for (const auto& p : places_) {
    if (transitions_.count(p)) throw Error(Errc::OverlappingNodeKinds, p);
  }
  for (const auto& [from, to] : arcs_) {
    if (!contains(from)) throw Error(Errc::DanglingArc, from + " -> " + to);
    if (!contains(to)) throw Error(Errc::DanglingArc, from + " -> " + to);
    if (is_place(from) == is_place(to)) throw Error(Errc::NonBipartiteFlow, from + " -> " + to);
  }
}

bool Net::contains(const NodeId& node) const { return is_place(node) || is_transition(node); }

std::optional<NodeKind> Net::kind(const NodeId& node) const {
  if (is_place(node)) return NodeKind::place;
  if (is_transition(node)) return NodeKind::transition;
  return std::nullopt;
}

std::vector<NodeId> Net::nodes() const {
  std::vector<NodeId> out(places_.begin(), places_.end());
  out.insert(out.end(), transitions_.begin(), transitions_.end());
  return out;
}

std::vector<NodeId> Net::preset(const NodeId& node) const {
  std::vector<NodeId> out;
  for (const auto& [from, to] : arcs_) {
    if (to == node) out.push_back(from);
  }
  return out;
}

std::vector<NodeId> Net::postset(const NodeId& node) const {
  std::vector<NodeId> out;
  auto it = arcs_.lower_bound(Arc{node, NodeId{}});
  for (; it != arcs_.end() && it->first == node; ++it) out.push_back(it->second);
  return out;
}

namespace {

void check_interface(const Net& net, const std::map<NodeId, Label>& labels,
                     const std::set<NodeId>& interface, std::string_view side) {
  std::map<Label, NodeId> seen;
  for (const auto& node : interface) {
    if (!net.contains(node)) throw Error(Errc::UnknownNode, node);
    const auto& label = labels.at(node);
    auto [it, fresh] = seen.emplace(label, node);
    if (!fresh) {
      throw Error(Errc::DuplicateInterfaceLabel,
                  std::string(side) + " interface: " + it->second + ", " + node + " share '" + label + "'");
    }
  }
}

}  // namespace

Module::Module(Net net, std::map<NodeId, Label> labels, std::set<NodeId> left, std::set<NodeId> right)
    : net_(std::move(net)), labels_(std::move(labels)), left_(std::move(left)), right_(std::move(right)) {
  for (const auto& node : net_.nodes()) {
    auto it = labels_.find(node);
    if (it == labels_.end() || it->second.empty()) throw Error(Errc::MissingLabel, node);
  }
  for (const auto& [node, label] : labels_) {
    if (!net_.contains(node)) throw Error(Errc::UnknownNode, node);
  }
  check_interface(net_, labels_, left_, "left");
  check_interface(net_, labels_, right_, "right");
}

const Label& Module::label(const NodeId& node) const {
  auto it = labels_.find(node);
  if (it == labels_.end()) throw Error(Errc::UnknownNode, node);
  return it->second;
}

std::set<NodeId> Module::interior() const {
  std::set<NodeId> out;
  for (const auto& node : net_.nodes()) {
    if (!left_.count(node) && !right_.count(node)) out.insert(node);
  }
  return out;
}

std::set<Label> Module::left_labels() const {
  std::set<Label> out;
  for (const auto& node : left_) out.insert(labels_.at(node));
  return out;
}

std::set<Label> Module::right_labels() const {
  std::set<Label> out;
  for (const auto& node : right_) out.insert(labels_.at(node));
  return out;
}

std::optional<NodeId> Module::left_node(const Label& label) const {
  for (const auto& node : left_) {
    if (labels_.at(node) == label) return node;
  }
  return std::nullopt;
}

std::optional<NodeId> Module::right_node(const Label& label) const {
  for (const auto& node : right_) {
    if (labels_.at(node) == label) return node;
  }
  return std::nullopt;
}

Module new_module(Net net, std::map<NodeId, Label> labels, std::set<NodeId> left, std::set<NodeId> right) {
  return Module(std::move(net), std::move(labels), std::move(left), std::move(right));
}

std::set<NodeId> interior(const Module& module) { return module.interior(); }

Module with_prefixed_ids(const Module& module, std::string_view prefix) {
  auto rename = [&](const NodeId& id) { return std::string(prefix) + id; };
  std::set<NodeId> places, transitions, left, right;
  std::set<Arc> arcs;
  std::map<NodeId, Label> labels;
  for (const auto& p : module.net().places()) places.insert(rename(p));
  for (const auto& t : module.net().transitions()) transitions.insert(rename(t));
  for (const auto& [from, to] : module.net().arcs()) arcs.emplace(rename(from), rename(to));
  for (const auto& [node, label] : module.labels()) labels.emplace(rename(node), label);
  for (const auto& node : module.left()) left.insert(rename(node));
  for (const auto& node : module.right()) right.insert(rename(node));
  return Module(Net(std::move(places), std::move(transitions), std::move(arcs)), std::move(labels),
                std::move(left), std::move(right));
}

nlohmann::json to_json(const Module& module) {
  using nlohmann::json;
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "module";
  json places = json::array();
  for (const auto& p : module.net().places()) places.push_back({{"id", p}, {"label", module.label(p)}});
  json transitions = json::array();
  for (const auto& t : module.net().transitions()) {
    transitions.push_back({{"id", t}, {"label", module.label(t)}});
  }
  json arcs = json::array();
  for (const auto& [from, to] : module.net().arcs()) arcs.push_back({from, to});
  doc["places"] = std::move(places);
  doc["transitions"] = std::move(transitions);
  doc["arcs"] = std::move(arcs);
  doc["left"] = module.left();
  doc["right"] = module.right();
  return doc;
}

Module module_from_json(const nlohmann::json& doc) {
  try {
    std::set<NodeId> places, transitions, left, right;
    std::set<Arc> arcs;
    std::map<NodeId, Label> labels;
    auto read_nodes = [&](const char* key, std::set<NodeId>& into) {
      for (const auto& entry : doc.at(key)) {
        auto id = entry.at("id").get<std::string>();
        if (!into.insert(id).second) throw Error(Errc::ParseError, "duplicate node id " + id);
        labels[id] = entry.at("label").get<std::string>();
      }
    };
    read_nodes("places", places);
    read_nodes("transitions", transitions);
    for (const auto& arc : doc.at("arcs")) {
      if (!arc.is_array() || arc.size() != 2) throw Error(Errc::ParseError, "arc must be [from, to]");
      arcs.emplace(arc[0].get<std::string>(), arc[1].get<std::string>());
    }
    if (doc.contains("left")) left = doc.at("left").get<std::set<NodeId>>();
    if (doc.contains("right")) right = doc.at("right").get<std::set<NodeId>>();
    return Module(Net(std::move(places), std::move(transitions), std::move(arcs)), std::move(labels),
                  std::move(left), std::move(right));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

std::string to_dot(const Module& module, std::string_view name) {
  using detail::dot_quote;
  std::ostringstream out;
  const auto& net = module.net();
  auto node_line = [&](const NodeId& node) {
    const bool place = net.is_place(node);
    out << "    " << dot_quote(node) << " [label=" << dot_quote(module.label(node))
        << (place ? ", shape=circle" : ", shape=box") << "];\n";
  };
  out << "digraph " << dot_quote(name) << " {\n";
  out << "  rankdir=LR;\n";
  out << "  subgraph cluster_left {\n    label=\"left\"; style=invis; rank=min;\n";
  for (const auto& node : module.left()) node_line(node);
  out << "  }\n";
  out << "  subgraph cluster_interior {\n    label=" << dot_quote(name) << "; style=solid;\n";
  for (const auto& node : module.interior()) node_line(node);
  out << "  }\n";
  out << "  subgraph cluster_right {\n    label=\"right\"; style=invis; rank=max;\n";
  for (const auto& node : module.right()) {
    if (!module.left().count(node)) node_line(node);
  }
  out << "  }\n";
  for (const auto& [from, to] : net.arcs()) out << "  " << dot_quote(from) << " -> " << dot_quote(to) << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace sysmine
