#include "sysmine/composition.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace sysmine {

std::vector<HarmonicPair> harmonic_pairs(const Module& a, const Module& b) {
  std::vector<HarmonicPair> out;
  for (const auto& x : a.right()) {
    const auto& label = a.label(x);
    if (auto y = b.left_node(label)) out.push_back(HarmonicPair{x, *y, label});
  }
  std::sort(out.begin(), out.end(),
            [](const HarmonicPair& l, const HarmonicPair& r) { return l.label < r.label; });
  return out;
}

std::vector<NodeId> merge_origins(const NodeId& id) {
  std::vector<NodeId> out;
  std::size_t start = 0;
  while (true) {
    auto pos = id.find('+', start);
    out.push_back(id.substr(start, pos == NodeId::npos ? NodeId::npos : pos - start));
    if (pos == NodeId::npos) break;
    start = pos + 1;
  }
  return out;
}

NodeId merged_id(const NodeId& x, const NodeId& y) {
  auto origins = merge_origins(x);
  auto more = merge_origins(y);
  origins.insert(origins.end(), more.begin(), more.end());
  std::sort(origins.begin(), origins.end());
  return detail::join(origins, "+");
}

Composition compose_traced(const Module& a, const Module& b) {
  const auto& na = a.net();
  const auto& nb = b.net();
  for (const auto& node : na.nodes()) {
    if (nb.contains(node)) throw Error(Errc::NodeIdCollision, node);
  }

  const auto pairs = harmonic_pairs(a, b);
  Composition out;
  auto& image = out.image;
  for (const auto& pair : pairs) {
    if (na.kind(pair.left_node) != nb.kind(pair.right_node)) {
      throw Error(Errc::MergeTypeMismatch, pair.left_node + " / " + pair.right_node + " ('" + pair.label + "')");
    }
    auto merged = merged_id(pair.left_node, pair.right_node);
    image[pair.left_node] = merged;
    image[pair.right_node] = merged;
  }
  for (const auto& node : na.nodes()) image.emplace(node, node);
  for (const auto& node : nb.nodes()) image.emplace(node, node);

  std::set<NodeId> places, transitions;
  std::map<NodeId, Label> labels;
  auto add_nodes = [&](const Module& m) {
    for (const auto& p : m.net().places()) places.insert(image.at(p));
    for (const auto& t : m.net().transitions()) transitions.insert(image.at(t));
    for (const auto& [node, label] : m.labels()) labels[image.at(node)] = label;
  };
  add_nodes(a);
  add_nodes(b);
  if (places.size() + transitions.size() != na.size() + nb.size() - pairs.size()) {
    throw Error(Errc::NodeIdCollision, "a merged id coincides with an existing node id");
  }

  std::set<Arc> arcs;
  for (const auto* net : {&na, &nb}) {
    for (const auto& [from, to] : net->arcs()) arcs.emplace(image.at(from), image.at(to));
  }

  std::set<NodeId> matched_left_of_b, matched_right_of_a;
  for (const auto& pair : pairs) {
    matched_right_of_a.insert(pair.left_node);
    matched_left_of_b.insert(pair.right_node);
  }
  std::set<NodeId> left, right;
  auto add_unique = [&](std::set<NodeId>& interface, const NodeId& node, std::string_view side) {
    const auto& label = labels.at(node);
    for (const auto& other : interface) {
      if (other != node && labels.at(other) == label) {
        throw Error(Errc::ResultingDuplicateInterfaceLabel, std::string(side) + " interface, label '" + label + "'");
      }
    }
    interface.insert(node);
  };
  for (const auto& x : a.left()) add_unique(left, image.at(x), "left");
  for (const auto& x : b.left()) {
    if (!matched_left_of_b.count(x)) add_unique(left, image.at(x), "left");
  }
  for (const auto& x : b.right()) add_unique(right, image.at(x), "right");
  for (const auto& x : a.right()) {
    if (!matched_right_of_a.count(x)) add_unique(right, image.at(x), "right");
  }

  out.module = Module(Net(std::move(places), std::move(transitions), std::move(arcs)), std::move(labels),
                      std::move(left), std::move(right));
  return out;
}

Module compose(const Module& a, const Module& b) { return compose_traced(a, b).module; }

Composition compose_all_traced(std::span<const Module> modules) {
  if (modules.empty()) throw std::invalid_argument("compose_all: empty sequence");
  Composition acc{modules.front(), {}};
  for (const auto& node : modules.front().net().nodes()) acc.image[node] = node;
  for (std::size_t i = 1; i < modules.size(); ++i) {
    auto step = compose_traced(acc.module, modules[i]);
    for (auto& [node, img] : acc.image) img = step.image.at(img);
    for (const auto& node : modules[i].net().nodes()) acc.image[node] = step.image.at(node);
    acc.module = std::move(step.module);
  }
  return acc;
}

Module compose_all(std::span<const Module> modules) { return compose_all_traced(modules).module; }

bool commutes(const Module& a, const Module& b) {
  auto labels_a = a.left_labels();
  labels_a.merge(a.right_labels());
  auto labels_b = b.left_labels();
  labels_b.merge(b.right_labels());
  return std::none_of(labels_a.begin(), labels_a.end(), [&](const Label& l) { return labels_b.count(l) != 0; });
}

std::vector<Dissent> dissenting_pairs(const OccurrenceModule& a, const OccurrenceModule& b) {
  const auto pairs = harmonic_pairs(a.module(), b.module());
  std::vector<Dissent> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const auto& [x, y, l1] = pairs[i];
      const auto& [x2, y2, l2] = pairs[j];
      const bool forward = a.causally_before(x, x2) && b.causally_before(y2, y);
      const bool backward = a.causally_before(x2, x) && b.causally_before(y, y2);
      if (forward || backward) out.push_back(Dissent{pairs[i], pairs[j]});
    }
  }
  return out;
}

namespace {

// Nodes of a module as dense indices with the data the isomorphism has to keep.
struct IndexedModule {
  std::vector<NodeId> nodes;
  std::map<NodeId, std::size_t> index;
  std::vector<std::vector<std::size_t>> succ, pred;
  std::set<std::pair<std::size_t, std::size_t>> arcs;

  explicit IndexedModule(const Module& m) : nodes(m.net().nodes()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
    succ.resize(nodes.size());
    pred.resize(nodes.size());
    for (const auto& [from, to] : m.net().arcs()) {
      auto f = index.at(from), t = index.at(to);
      succ[f].push_back(t);
      pred[t].push_back(f);
      arcs.emplace(f, t);
    }
  }
};

// Colour refinement run on both modules with a shared signature table so that
// colours are comparable across them.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> refine(const Module& ma, const IndexedModule& a,
                                                                     const Module& mb, const IndexedModule& b) {
  using Signature = std::vector<std::string>;
  std::map<Signature, std::size_t> table;
  auto initial = [&](const Module& m, const IndexedModule& g) {
    std::vector<std::size_t> colour(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const auto& node = g.nodes[i];
      Signature sig{m.net().is_place(node) ? "P" : "T", m.label(node), m.left().count(node) ? "L" : "-",
                    m.right().count(node) ? "R" : "-"};
      colour[i] = table.emplace(sig, table.size()).first->second;
    }
    return colour;
  };
  auto ca = initial(ma, a);
  auto cb = initial(mb, b);
  auto count_colours = [](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    std::set<std::size_t> all(x.begin(), x.end());
    all.insert(y.begin(), y.end());
    return all.size();
  };
  std::size_t classes = count_colours(ca, cb);
  while (true) {
    table.clear();
    auto step = [&](const IndexedModule& g, const std::vector<std::size_t>& colour) {
      std::vector<std::size_t> next(g.nodes.size());
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        std::vector<std::size_t> out, in;
        for (auto j : g.succ[i]) out.push_back(colour[j]);
        for (auto j : g.pred[i]) in.push_back(colour[j]);
        std::sort(out.begin(), out.end());
        std::sort(in.begin(), in.end());
        Signature sig{std::to_string(colour[i]), "|"};
        for (auto c : out) sig.push_back(std::to_string(c));
        sig.push_back("|");
        for (auto c : in) sig.push_back(std::to_string(c));
        next[i] = table.emplace(sig, table.size()).first->second;
      }
      return next;
    };
    auto na = step(a, ca);
    auto nb = step(b, cb);
    auto refined = count_colours(na, nb);
    ca = std::move(na);
    cb = std::move(nb);
    if (refined == classes) break;
    classes = refined;
  }
  return {ca, cb};
}

bool extend(const IndexedModule& a, const IndexedModule& b, const std::vector<std::size_t>& ca,
            const std::vector<std::size_t>& cb, const std::vector<std::size_t>& order, std::size_t depth,
            std::vector<std::size_t>& map, std::vector<bool>& used) {
  if (depth == order.size()) return true;
  const auto u = order[depth];
  constexpr auto unmapped = static_cast<std::size_t>(-1);
  for (std::size_t v = 0; v < b.nodes.size(); ++v) {
    if (used[v] || cb[v] != ca[u]) continue;
    bool consistent = true;
    for (auto w : a.succ[u]) {
      if (map[w] != unmapped && !b.arcs.count({v, map[w]})) consistent = false;
    }
    for (auto w : a.pred[u]) {
      if (map[w] != unmapped && !b.arcs.count({map[w], v})) consistent = false;
    }
    if (!consistent) continue;
    map[u] = v;
    used[v] = true;
    if (extend(a, b, ca, cb, order, depth + 1, map, used)) return true;
    map[u] = unmapped;
    used[v] = false;
  }
  return false;
}

}  // namespace

std::optional<std::map<NodeId, NodeId>> find_isomorphism(const Module& ma, const Module& mb) {
  if (ma.net().places().size() != mb.net().places().size() ||
      ma.net().transitions().size() != mb.net().transitions().size() ||
      ma.net().arcs().size() != mb.net().arcs().size() || ma.left().size() != mb.left().size() ||
      ma.right().size() != mb.right().size()) {
    return std::nullopt;
  }
  IndexedModule a(ma), b(mb);
  auto [ca, cb] = refine(ma, a, mb, b);
  auto histogram = [](const std::vector<std::size_t>& c) {
    std::map<std::size_t, std::size_t> h;
    for (auto x : c) ++h[x];
    return h;
  };
  if (histogram(ca) != histogram(cb)) return std::nullopt;

  // rarest colours first keeps the search shallow
  auto freq = histogram(ca);
  std::vector<std::size_t> order(a.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return freq[ca[x]] < freq[ca[y]]; });

  std::vector<std::size_t> map(a.nodes.size(), static_cast<std::size_t>(-1));
  std::vector<bool> used(b.nodes.size(), false);
  if (!extend(a, b, ca, cb, order, 0, map, used)) return std::nullopt;
  std::map<NodeId, NodeId> out;
  for (std::size_t i = 0; i < map.size(); ++i) out[a.nodes[i]] = b.nodes[map[i]];
  return out;
}

bool isomorphic(const Module& a, const Module& b) { return find_isomorphism(a, b).has_value(); }

}  // namespace sysmine
