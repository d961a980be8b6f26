#ifndef QUNFOLD_KRIPKE_HPP
#define QUNFOLD_KRIPKE_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qunfold/formula.hpp"

namespace qunfold {

using WorldId = std::string;
using AtomTag = std::string;

/// Finite Kripke structure <W, R, V> with an optional weighting Ω.
///
/// Worlds keep the order they were declared in; every index-based accessor
/// refers to that order. The accessibility relation is stored sparsely as
/// sorted successor lists. Immutable once built.
class KripkeModel {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  /// Validating constructor over world keys. Throws Error on duplicate or
  /// undeclared worlds, invalid atom tags, weights outside [0,1], missing
  /// weights for a declared world, or a weight sum off 1 by more than 1e-12.
  static KripkeModel build(std::vector<WorldId> worlds,
                           const std::vector<std::pair<WorldId, WorldId>>& access,
                           const std::map<WorldId, std::vector<AtomTag>>& valuation,
                           const std::optional<std::map<WorldId, double>>& weights = std::nullopt);

  /// Same checks over world indices; `valuation[i]` belongs to world i.
  static KripkeModel build_indexed(std::vector<WorldId> worlds, std::vector<Edge> access,
                                   std::vector<std::vector<AtomTag>> valuation,
                                   std::optional<std::vector<double>> weights = std::nullopt);

  std::size_t size() const noexcept { return worlds_.size(); }
  const std::vector<WorldId>& worlds() const noexcept { return worlds_; }
  const WorldId& world(std::size_t i) const { return worlds_.at(i); }

  /// Throws Error for an unknown key.
  std::size_t index_of(std::string_view key) const;
  std::optional<std::size_t> find(std::string_view key) const;

  /// Sorted, duplicate-free pairs.
  const std::vector<Edge>& access() const noexcept { return access_; }
  std::span<const std::size_t> successors(std::size_t w) const { return succ_.at(w); }
  bool has_edge(std::size_t from, std::size_t to) const;

  /// Dense r_ij matrix, row-major, built on demand.
  std::vector<std::vector<int>> relation_matrix() const;

  /// Sorted tags true at world w.
  const std::vector<AtomTag>& valuation(std::size_t w) const { return valuation_.at(w); }
  bool validates(std::size_t w, std::string_view tag) const;
  /// Every tag that occurs in some valuation.
  const std::set<AtomTag, std::less<>>& vocabulary() const noexcept { return vocabulary_; }

  bool has_weights() const noexcept { return weights_.has_value(); }
  const std::optional<std::vector<double>>& weights() const noexcept { return weights_; }
  /// ω_w; uniform 1/|W| when the model carries no weights.
  double weight(std::size_t w) const;

  /// Copy with the given weights (validated as in build()).
  KripkeModel with_weights(std::vector<double> weights) const;

 private:
  KripkeModel() = default;
  void validate_weights() const;

  std::vector<WorldId> worlds_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> access_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::vector<AtomTag>> valuation_;
  std::set<AtomTag, std::less<>> vocabulary_;
  std::optional<std::vector<double>> weights_;
};

/// Singleton valuation assignment: every world validates exactly one tag of
/// `frame` (other tags are ignored).
bool check_sva(const KripkeModel& m, std::span<const AtomTag> frame);

/// φ_A = ⋁_{x∈A} x for non-empty A; φ_∅ = ⋀_{x∈frame} ¬x.
/// Throws Error if `subset` is not contained in `frame`.
Formula subset_formula(std::span<const AtomTag> subset, std::span<const AtomTag> frame);

/// Every world has at least one successor.
bool is_serial(const KripkeModel& m);

/// Frame tag validated by world w under SVA; throws Error if there is not
/// exactly one.
std::size_t sva_label(const KripkeModel& m, std::size_t w, std::span<const AtomTag> frame);

}  // namespace qunfold

#endif
