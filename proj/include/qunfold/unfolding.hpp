// Structural unfolding of a seed pointed graph.
//
// The depth-α unfolding tree has one node per walk of length ≤ α from the
// root (children are per seed edge occurrence, never set-collapsed). Walks
// stop at atom nodes. Each tree node carries a hash-consed label:
//
//   atom node                    -> atom:<seed node id>    (φ⁰ of the atom)
//   non-atom node at depth α     -> atom:<seed node id>    (opaque φ⁰)
//   any other node               -> △{labels of its children}
//
// Walk keys: the root is "*"; a child's key is its parent's key followed by
// "/" and the ordinal of the seed edge (out-edges sorted by target id).
// Nodes are kept in breadth-first order, siblings by ordinal, so the node
// sequence of stage α is a prefix of the one of stage α+1.

#ifndef QUNFOLD_UNFOLDING_HPP
#define QUNFOLD_UNFOLDING_HPP

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qunfold/formula.hpp"
#include "qunfold/kripke.hpp"

namespace qunfold {

using NodeId = std::string;

/// Seed pointed graph. Edges point from a set to its members (∈⁻¹).
class SeedGraph {
 public:
  /// Validates: unique node ids usable as atom tags and not starting with
  /// '*', declared edge endpoints, no duplicate edges, root declared, atoms
  /// declared, atoms without out-edges other than a self-loop.
  static SeedGraph build(std::vector<NodeId> nodes, std::vector<std::pair<NodeId, NodeId>> edges,
                         NodeId root, std::set<NodeId> atoms);

  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  const std::vector<std::pair<NodeId, NodeId>>& edges() const noexcept { return edges_; }
  const NodeId& root() const noexcept { return nodes_[root_]; }
  std::size_t root_index() const noexcept { return root_; }
  const std::set<NodeId>& atoms() const noexcept { return atoms_; }

  std::size_t index_of(const NodeId& id) const;
  bool is_atom(std::size_t node) const { return atom_flags_.at(node); }
  /// Out-neighbours used for unfolding, sorted by target id. Empty for
  /// atoms (their optional self-loop is not unfolded).
  const std::vector<std::size_t>& members(std::size_t node) const { return members_.at(node); }

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::set<NodeId> atoms_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<bool> atom_flags_;
  std::vector<std::vector<std::size_t>> members_;
  std::size_t root_ = 0;
};

struct UnfoldLimits {
  std::size_t depth_cap = 12;
  std::size_t node_cap = 1'000'000;
};

struct TreeNode {
  std::string walk_key;
  std::size_t depth = 0;
  std::size_t seed_node = 0;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  Formula label;
  bool atom = false;       // walk reached an atom
  bool truncated = false;  // non-atom node cut off at depth α
};

class UnfoldTree {
 public:
  UnfoldTree(std::size_t alpha, std::vector<TreeNode> nodes);

  std::size_t alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
  std::optional<std::size_t> find(const std::string& walk_key) const;
  /// Parent index per node; the root maps to nullopt. Parents precede
  /// their children.
  std::vector<std::optional<std::size_t>> parents() const;

 private:
  std::size_t alpha_;
  std::vector<TreeNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// M_U^α: worlds are walk keys in tree order, R_U holds parent→child pairs
/// and a self-loop at every world, and each world validates its own walk
/// key (plus its seed node id when the walk reached an atom).
struct StageModel {
  UnfoldTree tree;
  KripkeModel kripke;
  std::size_t z_u = 0;

  /// Walk keys in world order; the SVA frame of `kripke`.
  std::vector<AtomTag> frame() const;
  /// Same worlds and valuation with only the parent→child pairs.
  KripkeModel membership_model() const;
};

/// Number of tree nodes unfold() would create, saturating at SIZE_MAX.
std::size_t projected_node_count(const SeedGraph& seed, std::size_t alpha);

/// Throws CapExceeded when alpha exceeds the depth cap or the projected node
/// count exceeds the node cap.
StageModel unfold(const SeedGraph& seed, std::size_t alpha, const UnfoldLimits& limits = {});

/// ch⁰ … ch^α: labels of the depth-i tree nodes, one entry per node.
std::vector<std::vector<Formula>> children_sets(const StageModel& m);

/// 1 + Σ_{i≥1} |ch^i|.
std::size_t z_u(const StageModel& m);

/// Label of the world with the given walk key; throws Error if unknown.
Formula formula_at(const StageModel& m, const WorldId& w);

/// Truth of each node's own label at that node, evaluated over the
/// membership model.
std::vector<bool> label_satisfaction(const StageModel& m);

/// True for nodes whose subtree holds no truncated node, i.e. every
/// maximal walk below them ends in an atom or a memberless set.
std::vector<bool> atom_terminated(const UnfoldTree& tree);

}  // namespace qunfold

#endif
