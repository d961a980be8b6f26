#ifndef QUNFOLD_EVIDENCE_HPP
#define QUNFOLD_EVIDENCE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qunfold/eval.hpp"
#include "qunfold/kripke.hpp"
#include "qunfold/proximity.hpp"

namespace qunfold {

/// Sorted, duplicate-free frame indices.
using Subset = std::vector<std::size_t>;

/// Basic probability assignment over an ordered frame, stored sparsely.
class BPA {
 public:
  /// Throws Error unless m(∅) = 0, masses are non-negative, sets lie in the
  /// frame and the total is 1 within 1e-12. Repeated sets accumulate.
  static BPA build(std::vector<std::string> frame,
                   const std::vector<std::pair<std::vector<std::string>, double>>& masses);
  static BPA build_indexed(std::vector<std::string> frame, std::map<Subset, double> masses);

  const std::vector<std::string>& frame() const noexcept { return frame_; }
  /// Entries with positive mass only.
  const std::map<Subset, double>& masses() const noexcept { return masses_; }
  double mass(const Subset& a) const;
  /// Frame indices of the tags; throws Error for tags outside the frame.
  Subset subset(std::span<const std::string> tags) const;

 private:
  std::vector<std::string> frame_;
  std::map<Subset, double> masses_;
};

/// Σ_{B ⊆ a} m(B).
double bel(const BPA& b, const Subset& a);
/// 1 − bel(complement of a).
double pl(const BPA& b, const Subset& a);

/// Bel over all 2^|X| subsets, indexed by bitmask (bit i = frame element i).
/// Throws CapExceeded for frames above 20 elements.
std::vector<double> bel_table(const BPA& b);

/// Modal reading of a weighted SVA model over a frame: Bel, Pl and m come
/// from evaluating □φ_A, ◇φ_A and □φ_A ∧ ⋀◇x at every world. The model must
/// carry weights, satisfy SVA over the frame and be serial.
class ModalEvidence {
 public:
  ModalEvidence(const KripkeModel& m, std::vector<AtomTag> frame);

  const std::vector<AtomTag>& frame() const noexcept { return frame_; }
  double bel(const Subset& a);
  double pl(const Subset& a);
  double mass(const Subset& a);
  /// Truth of the formula at each world; indexed like the model's worlds.
  std::vector<bool> truth(Formula f);

 private:
  double weighted(Formula f);
  Formula subset_formula_of(const Subset& a) const;

  const KripkeModel* model_;
  std::vector<AtomTag> frame_;
  Evaluator eval_;
};

/// m(A) = Σ ω_i over worlds whose successor labels are exactly A.
BPA bpa_from_model(const KripkeModel& m, std::span<const AtomTag> frame);

double bel_modal(const KripkeModel& m, std::span<const AtomTag> frame, std::span<const AtomTag> a);
double pl_modal(const KripkeModel& m, std::span<const AtomTag> frame, std::span<const AtomTag> a);

/// Per world n of a weighted stage model: Σ_j ω_j v_j(△{atom:w_m : n R m}),
/// where w_m ranges over the keys of n's successors. Frame = world keys.
std::vector<double> sentence_masses(const KripkeModel& m);

/// ω_n = ⟨u_n, ι(psi_prev)⟩², where u_n is column n of `basis` and ι pads
/// psi_prev with zeros. Throws Error unless the columns are orthonormal
/// within 1e-10 and ‖psi_prev‖ = 1 within 1e-10.
std::vector<double> born_weights(const Eigen::VectorXd& psi_prev, const Eigen::MatrixXd& basis);

/// Σ of weights over the union of all quanta that contain psi.
double generalized_born(const ProximitySpace& s, std::span<const double> weights, std::size_t psi);

/// The union of all quanta containing x.
ElementSet quanta_cover(const ProximitySpace& s, std::size_t x);

/// |⟨psi_next, ι(ψ_i)⟩|² for each old basis column ψ_i.
std::vector<double> transition_likelihoods(const Eigen::VectorXd& psi_next,
                                           const Eigen::MatrixXd& old_basis);

/// L_t p_t / (L_t p_t + (1 − p_t) Σ_{i≠t} L_i). Throws Error when the
/// denominator is ≤ tol.
double bayes_posterior(std::span<const double> prior, std::span<const double> likelihoods,
                       std::size_t target, double tol = 1e-300);

/// Σ of posteriors over the union of all quanta that contain target.
double belief_posterior(const ProximitySpace& s, std::span<const double> posteriors,
                        std::size_t target);

}  // namespace qunfold

#endif
