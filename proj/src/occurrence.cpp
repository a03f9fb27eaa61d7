#include "sysmine/occurrence.hpp"

#include <algorithm>
#include <queue>

namespace sysmine {

namespace {

// Kahn's algorithm over all nodes; empty optional when the flow has a cycle.
std::optional<std::vector<std::size_t>> topological_nodes(const std::vector<NodeId>& nodes,
                                                          const std::map<NodeId, std::size_t>& index,
                                                          const Net& net,
                                                          std::vector<std::vector<std::size_t>>& succ) {
  const std::size_t n = nodes.size();
  succ.assign(n, {});
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& [from, to] : net.arcs()) {
    succ[index.at(from)].push_back(index.at(to));
    ++indegree[index.at(to)];
  }
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto i = ready.front();
    ready.pop();
    order.push_back(i);
    for (auto j : succ[i]) {
      if (--indegree[j] == 0) ready.push(j);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

}  // namespace

OccurrenceModule as_occurrence(Module module) {
  OccurrenceModule out;
  const auto& net = module.net();
  out.nodes_ = net.nodes();
  for (std::size_t i = 0; i < out.nodes_.size(); ++i) out.index_[out.nodes_[i]] = i;

  std::vector<std::vector<std::size_t>> succ;
  auto order = topological_nodes(out.nodes_, out.index_, net, succ);
  if (!order) throw Error(Errc::CyclicFlow, "flow relation has a cycle");

  for (const auto& p : net.places()) {
    std::size_t in = 0;
    for (const auto& [from, to] : net.arcs()) {
      if (to == p) ++in;
    }
    const auto out_degree = net.postset(p).size();
    if (in > 1 || out_degree > 1) throw Error(Errc::PlaceBranching, p);
  }

  const std::size_t n = out.nodes_.size();
  out.before_.assign(n, std::vector<bool>(n, false));
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    auto& row = out.before_[*it];
    for (auto j : succ[*it]) {
      row[j] = true;
      const auto& reach = out.before_[j];
      for (std::size_t k = 0; k < n; ++k) {
        if (reach[k]) row[k] = true;
      }
    }
  }
  out.module_ = std::move(module);
  return out;
}

std::size_t OccurrenceModule::index_of(const NodeId& node) const {
  auto it = index_.find(node);
  if (it == index_.end()) throw Error(Errc::UnknownNode, node);
  return it->second;
}

bool OccurrenceModule::causally_before(const NodeId& a, const NodeId& b) const {
  return before_[index_of(a)][index_of(b)];
}

bool OccurrenceModule::concurrent(const NodeId& a, const NodeId& b) const {
  return a != b && !causally_before(a, b) && !causally_before(b, a);
}

bool causally_before(const OccurrenceModule& run, const NodeId& a, const NodeId& b) {
  return run.causally_before(a, b);
}

std::vector<NodeId> topological_transitions(const OccurrenceModule& run) {
  const auto& transitions = run.net().transitions();
  std::vector<NodeId> pending(transitions.begin(), transitions.end());
  std::vector<NodeId> order;
  order.reserve(pending.size());
  const auto& module = run.module();
  while (!pending.empty()) {
    auto best = pending.end();
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      bool minimal = std::none_of(pending.begin(), pending.end(),
                                  [&](const NodeId& other) { return run.causally_before(other, *it); });
      if (!minimal) continue;
      if (best == pending.end() || std::pair(module.label(*it), *it) < std::pair(module.label(*best), *best)) {
        best = it;
      }
    }
    order.push_back(*best);
    pending.erase(best);
  }
  return order;
}

bool is_linearization(const OccurrenceModule& run, std::span<const NodeId> order) {
  const auto& transitions = run.net().transitions();
  if (order.size() != transitions.size()) return false;
  std::set<NodeId> seen;
  for (const auto& t : order) {
    if (!transitions.count(t) || seen.count(t)) return false;
    for (const auto& other : transitions) {
      if (run.causally_before(other, t) && !seen.count(other)) return false;
    }
    seen.insert(t);
  }
  return true;
}

OccurrenceAtom atom_of(const OccurrenceModule& run, const NodeId& transition) {
  const auto& net = run.net();
  if (!net.is_transition(transition)) throw Error(Errc::UnknownNode, transition);
  const auto& module = run.module();
  std::set<NodeId> places, left, right;
  std::set<Arc> arcs;
  std::map<NodeId, Label> labels{{transition, module.label(transition)}};
  auto local = [&](const NodeId& p) { return p + "@" + transition; };
  for (const auto& p : net.preset(transition)) {
    places.insert(local(p));
    left.insert(local(p));
    arcs.emplace(local(p), transition);
    labels[local(p)] = module.label(p);
  }
  for (const auto& p : net.postset(transition)) {
    places.insert(local(p));
    right.insert(local(p));
    arcs.emplace(transition, local(p));
    labels[local(p)] = module.label(p);
  }
  Module atom(Net(std::move(places), {transition}, std::move(arcs)), std::move(labels), std::move(left),
              std::move(right));
  return OccurrenceAtom{transition, as_occurrence(std::move(atom))};
}

std::vector<OccurrenceAtom> atoms(const OccurrenceModule& run) {
  auto order = topological_transitions(run);
  return atoms(run, order);
}

std::vector<OccurrenceAtom> atoms(const OccurrenceModule& run, std::span<const NodeId> order) {
  if (!is_linearization(run, order)) throw Error(Errc::InvalidLinearization, "order violates causality");
  std::vector<OccurrenceAtom> out;
  out.reserve(order.size());
  for (const auto& t : order) out.push_back(atom_of(run, t));
  return out;
}

Module boundary_form(const OccurrenceModule& run) {
  const auto& net = run.net();
  std::set<NodeId> left, right;
  for (const auto& p : net.places()) {
    if (net.preset(p).empty()) left.insert(p);
    if (net.postset(p).empty()) right.insert(p);
  }
  return Module(net, run.module().labels(), std::move(left), std::move(right));
}

}  // namespace sysmine
