#ifndef QUNFOLD_BISIM_HPP
#define QUNFOLD_BISIM_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qunfold/kripke.hpp"
#include "qunfold/unfolding.hpp"

namespace qunfold {

/// Worlds and valuations of a model paired with the transition relation to
/// use for bisimulation (the model's own access, or a chosen sub-relation).
class TransitionSystem {
 public:
  explicit TransitionSystem(const KripkeModel& m);
  TransitionSystem(const KripkeModel& m, const std::vector<KripkeModel::Edge>& edges);

  const KripkeModel& model() const noexcept { return *model_; }
  std::size_t size() const noexcept { return succ_.size(); }
  /// Sorted, duplicate-free.
  const std::vector<std::size_t>& successors(std::size_t w) const { return succ_.at(w); }
  bool has_edge(std::size_t from, std::size_t to) const;

 private:
  const KripkeModel* model_;
  std::vector<std::vector<std::size_t>> succ_;
};

/// Literal: worlds agree on whether they validate some atom at all.
/// Strict: worlds validate exactly the same atoms.
enum class ValuationClause { Literal, Strict };

/// Greatest bisimulation between g and h as a partition of their disjoint
/// union: g-world i and h-world j are related iff they share a block.
class Bisimulation {
 public:
  Bisimulation(std::vector<std::size_t> block_g, std::vector<std::size_t> block_h,
               std::size_t block_count);

  bool related(std::size_t g_world, std::size_t h_world) const {
    return block_g_.at(g_world) == block_h_.at(h_world);
  }
  const std::vector<std::size_t>& blocks_g() const noexcept { return block_g_; }
  const std::vector<std::size_t>& blocks_h() const noexcept { return block_h_; }
  std::size_t block_count() const noexcept { return block_count_; }
  /// All related pairs, ordered by (g_world, h_world).
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;

 private:
  std::vector<std::size_t> block_g_;
  std::vector<std::size_t> block_h_;
  std::size_t block_count_;
};

/// Coarsest stable partition refinement over the disjoint union.
Bisimulation max_bisimulation(const TransitionSystem& g, const TransitionSystem& h,
                              ValuationClause clause = ValuationClause::Literal);

struct ClauseViolation {
  std::size_t g_world;
  std::size_t h_world;
  char clause;  // 'a', 'b' or 'c'
  std::string detail;
};

struct BisimulationReport {
  bool ok = true;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<ClauseViolation> violations;
};

/// Checks that {(i, pairing[i])} is itself a bisimulation. Throws Error if
/// the world counts differ or the pairing is not a bijection.
BisimulationReport verify_bijective_bisimulation(const TransitionSystem& g, const TransitionSystem& h,
                                                 const std::vector<std::size_t>& pairing,
                                                 ValuationClause clause = ValuationClause::Literal);

/// M_Σ mirrored from a stage model. World i of `kripke` is the mirror of
/// stage world i; its key is the walk key followed by "'" and it carries the
/// same valuation. `kripke.access()` is P_Σ = plus ∪ minus.
struct SigmaModel {
  KripkeModel kripke;
  std::vector<KripkeModel::Edge> plus;   // R_U image, reflexive pairs included
  std::vector<KripkeModel::Edge> minus;  // inverses of the non-reflexive plus pairs
  std::vector<std::size_t> pairing;      // stage world -> sigma world

  TransitionSystem plus_system() const { return TransitionSystem(kripke, plus); }
  TransitionSystem minus_system() const { return TransitionSystem(kripke, minus); }
};

SigmaModel build_sigma(const StageModel& m);

/// P_Σ contains (w,w) for all w and equals its inverse.
bool is_proximity_relation(const KripkeModel& m);

}  // namespace qunfold

#endif
