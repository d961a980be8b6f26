#include "qunfold/unfolding.hpp"

#include <algorithm>
#include <limits>

#include "qunfold/error.hpp"
#include "qunfold/eval.hpp"

namespace qunfold {

namespace {

constexpr std::size_t kSizeMax = std::numeric_limits<std::size_t>::max();

std::size_t sat_add(std::size_t a, std::size_t b) { return a > kSizeMax - b ? kSizeMax : a + b; }

}  // namespace

SeedGraph SeedGraph::build(std::vector<NodeId> nodes, std::vector<std::pair<NodeId, NodeId>> edges,
                           NodeId root, std::set<NodeId> atoms) {
  SeedGraph g;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId& id = nodes[i];
    if (!is_valid_atom_tag(id)) throw Error("invalid seed node id '" + id + "'");
    if (id.front() == '*') throw Error("seed node id '" + id + "' must not start with '*'");
    if (!g.index_.emplace(id, i).second) throw Error("duplicate seed node '" + id + "'");
  }
  g.nodes_ = std::move(nodes);
  auto lookup = [&](const NodeId& id, const char* where) {
    auto it = g.index_.find(id);
    if (it == g.index_.end()) throw Error(std::string("undeclared seed node '") + id + "' in " + where);
    return it->second;
  };

  auto root_it = g.index_.find(root);
  if (root_it == g.index_.end()) throw Error("root '" + root + "' is not a seed node");
  g.root_ = root_it->second;

  g.atom_flags_.assign(g.nodes_.size(), false);
  for (const auto& a : atoms) g.atom_flags_[lookup(a, "atoms")] = true;
  g.atoms_ = std::move(atoms);

  std::set<std::pair<std::size_t, std::size_t>> seen;
  g.members_.assign(g.nodes_.size(), {});
  for (const auto& [from, to] : edges) {
    std::size_t u = lookup(from, "edges");
    std::size_t v = lookup(to, "edges");
    if (!seen.emplace(u, v).second) throw Error("duplicate edge " + from + " -> " + to);
    if (g.atom_flags_[u]) {
      if (u != v) throw Error("atom '" + from + "' has a member");
      continue;
    }
    g.members_[u].push_back(v);
  }
  for (auto& ms : g.members_)
    std::stable_sort(ms.begin(), ms.end(),
                     [&](std::size_t a, std::size_t b) { return g.nodes_[a] < g.nodes_[b]; });
  g.edges_ = std::move(edges);
  return g;
}

std::size_t SeedGraph::index_of(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("unknown seed node '" + id + "'");
  return it->second;
}

UnfoldTree::UnfoldTree(std::size_t alpha, std::vector<TreeNode> nodes)
    : alpha_(alpha), nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].walk_key, i);
}

std::optional<std::size_t> UnfoldTree::find(const std::string& walk_key) const {
  auto it = index_.find(walk_key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::optional<std::size_t>> UnfoldTree::parents() const {
  std::vector<std::optional<std::size_t>> p;
  p.reserve(nodes_.size());
  for (const auto& n : nodes_) p.push_back(n.parent);
  return p;
}

std::vector<AtomTag> StageModel::frame() const { return kripke.worlds(); }

KripkeModel StageModel::membership_model() const {
  std::vector<KripkeModel::Edge> edges;
  for (const auto& [a, b] : kripke.access())
    if (a != b) edges.emplace_back(a, b);
  std::vector<std::vector<AtomTag>> vals;
  vals.reserve(kripke.size());
  for (std::size_t w = 0; w < kripke.size(); ++w) vals.push_back(kripke.valuation(w));
  return KripkeModel::build_indexed(kripke.worlds(), std::move(edges), std::move(vals));
}

std::size_t projected_node_count(const SeedGraph& seed, std::size_t alpha) {
  std::vector<std::size_t> level(seed.nodes().size(), 0);
  level[seed.root_index()] = 1;
  std::size_t total = 1;
  for (std::size_t d = 0; d < alpha; ++d) {
    std::vector<std::size_t> next(level.size(), 0);
    bool any = false;
    for (std::size_t u = 0; u < level.size(); ++u) {
      if (level[u] == 0) continue;
      for (std::size_t v : seed.members(u)) {
        next[v] = sat_add(next[v], level[u]);
        total = sat_add(total, level[u]);
        any = true;
      }
    }
    if (!any) break;
    level = std::move(next);
  }
  return total;
}

StageModel unfold(const SeedGraph& seed, std::size_t alpha, const UnfoldLimits& limits) {
  if (alpha > limits.depth_cap)
    throw CapExceeded("unfolding depth " + std::to_string(alpha) + " exceeds depth cap " +
                          std::to_string(limits.depth_cap),
                      projected_node_count(seed, alpha));
  const std::size_t projected = projected_node_count(seed, alpha);
  if (projected > limits.node_cap)
    throw CapExceeded("unfolding would create " + std::to_string(projected) +
                          " nodes, node cap is " + std::to_string(limits.node_cap),
                      projected);

  std::vector<TreeNode> nodes;
  nodes.reserve(projected);
  {
    TreeNode root;
    root.walk_key = "*";
    root.seed_node = seed.root_index();
    root.atom = seed.is_atom(root.seed_node);
    nodes.push_back(std::move(root));
  }
  // Breadth-first: nodes are appended level by level in parent order.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].atom) continue;
    if (nodes[i].depth == alpha) {
      nodes[i].truncated = true;
      continue;
    }
    const auto& members = seed.members(nodes[i].seed_node);
    for (std::size_t k = 0; k < members.size(); ++k) {
      TreeNode child;
      child.walk_key = nodes[i].walk_key + "/" + std::to_string(k);
      child.depth = nodes[i].depth + 1;
      child.seed_node = members[k];
      child.parent = i;
      child.atom = seed.is_atom(members[k]);
      nodes[i].children.push_back(nodes.size());
      nodes.push_back(std::move(child));
    }
  }

  for (std::size_t i = nodes.size(); i-- > 0;) {
    TreeNode& n = nodes[i];
    if (n.atom || n.truncated) {
      n.label = Formula::atom(seed.nodes()[n.seed_node]);
    } else {
      std::vector<Formula> labels;
      labels.reserve(n.children.size());
      for (std::size_t c : n.children) labels.push_back(nodes[c].label);
      n.label = triangle(labels);
    }
  }

  std::vector<WorldId> worlds;
  std::vector<KripkeModel::Edge> access;
  std::vector<std::vector<AtomTag>> valuation;
  worlds.reserve(nodes.size());
  valuation.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    worlds.push_back(nodes[i].walk_key);
    access.emplace_back(i, i);
    for (std::size_t c : nodes[i].children) access.emplace_back(i, c);
    std::vector<AtomTag> tags{nodes[i].walk_key};
    if (nodes[i].atom) tags.push_back(seed.nodes()[nodes[i].seed_node]);
    valuation.push_back(std::move(tags));
  }

  StageModel m{UnfoldTree(alpha, std::move(nodes)),
               KripkeModel::build_indexed(std::move(worlds), std::move(access), std::move(valuation)),
               0};
  m.z_u = z_u(m);
  return m;
}

std::vector<std::vector<Formula>> children_sets(const StageModel& m) {
  std::vector<std::vector<Formula>> sets(m.tree.alpha() + 1);
  for (const auto& n : m.tree.nodes()) sets[n.depth].push_back(n.label);
  return sets;
}

std::size_t z_u(const StageModel& m) {
  auto sets = children_sets(m);
  std::size_t z = 1;
  for (std::size_t i = 1; i < sets.size(); ++i) z += sets[i].size();
  return z;
}

Formula formula_at(const StageModel& m, const WorldId& w) {
  auto i = m.tree.find(w);
  if (!i) throw Error("unknown world '" + w + "'");
  return m.tree.node(*i).label;
}

std::vector<bool> label_satisfaction(const StageModel& m) {
  KripkeModel tree_model = m.membership_model();
  // Opaque φ⁰ tags of truncated nodes are validated nowhere.
  std::vector<AtomTag> extra;
  for (const auto& n : m.tree.nodes())
    if (n.truncated) extra.push_back(n.label.tag());
  Evaluator ev(tree_model, extra);
  std::vector<bool> result;
  result.reserve(m.tree.size());
  for (std::size_t i = 0; i < m.tree.size(); ++i) result.push_back(ev.eval(i, m.tree.node(i).label));
  return result;
}

std::vector<bool> atom_terminated(const UnfoldTree& tree) {
  std::vector<bool> ok(tree.size(), true);
  for (std::size_t i = tree.size(); i-- > 0;) {
    const TreeNode& n = tree.node(i);
    if (n.truncated) ok[i] = false;
    for (std::size_t c : n.children) ok[i] = ok[i] && ok[c];
  }
  return ok;
}

}  // namespace qunfold
