#ifndef QUNFOLD_PROXIMITY_HPP
#define QUNFOLD_PROXIMITY_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/dynamic_bitset.hpp>

#include "qunfold/kripke.hpp"

namespace qunfold {

/// Subset of a carrier; bit i is carrier element i.
using ElementSet = boost::dynamic_bitset<>;

/// Reflexive, symmetric relation P on an ordered carrier X. Elements are
/// addressed by carrier index.
class ProximitySpace {
 public:
  /// Pairs are unordered; reflexive pairs are implied. Throws Error on
  /// duplicate or unknown elements.
  static ProximitySpace build(std::vector<std::string> carrier,
                              const std::vector<std::pair<std::string, std::string>>& pairs);
  static ProximitySpace build_indexed(std::vector<std::string> carrier,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
  /// Symmetric closure of the model's access relation plus all reflexive
  /// pairs; the carrier is the world list.
  static ProximitySpace of_model(const KripkeModel& m);

  std::size_t size() const noexcept { return carrier_.size(); }
  const std::vector<std::string>& carrier() const noexcept { return carrier_; }
  std::size_t index_of(const std::string& x) const;
  bool related(std::size_t x, std::size_t y) const { return quanta_.at(x).test(y); }
  /// Neighbours other than x itself, ascending.
  const std::vector<std::size_t>& neighbours(std::size_t x) const { return adj_.at(x); }
  /// Q_x = {y : xPy}.
  const ElementSet& quantum(std::size_t x) const { return quanta_.at(x); }
  /// Unordered non-reflexive pairs (a < b), ascending.
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;

  ElementSet empty_set() const { return ElementSet(size()); }
  ElementSet full_set() const { return ~ElementSet(size()); }
  /// Throws Error on unknown elements.
  ElementSet make_set(std::span<const std::string> members) const;

 private:
  std::vector<std::string> carrier_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<ElementSet> quanta_;
};

/// members = ∪_{x ∈ witness} Q_x.
struct QuantumSet {
  ElementSet members;
  ElementSet witness;

  bool operator==(const QuantumSet& o) const { return members == o.members; }
};

const ElementSet& quantum_of(const ProximitySpace& s, std::size_t x);

/// {x ∈ a : Q_x ⊆ a}.
ElementSet inner_generators(const ProximitySpace& s, const ElementSet& a);

/// The set with its maximal witness if it is a union of quanta.
std::optional<QuantumSet> as_quantum_set(const ProximitySpace& s, const ElementSet& a);
bool is_quantum_set(const ProximitySpace& s, const ElementSet& a);

/// Union of the quanta of the given generators.
QuantumSet quantum_union(const ProximitySpace& s, const ElementSet& generators);

QuantumSet join_p(const ProximitySpace& s, const QuantumSet& a, const QuantumSet& b);
/// Union of all quanta inside a ∩ b.
QuantumSet meet_p(const ProximitySpace& s, const QuantumSet& a, const QuantumSet& b);
/// {y : ∃x ∉ q, xPy}.
QuantumSet ortho_p(const ProximitySpace& s, const QuantumSet& q);

/// a ∩ b = ∅ and Q_x ∩ b = ∅ for every x ∈ a.
bool separated(const ProximitySpace& s, const ElementSet& a, const ElementSet& b);

/// Shortest repetition-free P-chain from x to y (x itself when x == y).
std::optional<std::vector<std::size_t>> open_path(const ProximitySpace& s, std::size_t x,
                                                  std::size_t y);

/// Every pair of elements is joined by an open path.
bool is_connected(const ProximitySpace& s);

/// Path-length matrix; throws Error unless the non-reflexive part of P is a
/// tree.
std::vector<std::vector<std::size_t>> tree_metric(const ProximitySpace& s);

/// Carrier "1".."n"; xPy iff |λ_x − λ_y| ≤ epsilon.
ProximitySpace proximity_from_spectrum(std::span<const double> eigenvalues, double epsilon);

/// Carrier "1".."n"; sPt iff |⟨s,t⟩| > zero_tol. Throws Error on a zero
/// vector or mismatched dimensions.
ProximitySpace proximity_from_inner_products(const std::vector<Eigen::VectorXd>& vectors,
                                             double zero_tol = 1e-12);

/// Every quantum set of s, each with its maximal witness; throws CapExceeded when
/// |X| exceeds max_carrier.
std::vector<QuantumSet> enumerate_quantum_sets(const ProximitySpace& s, std::size_t max_carrier = 16);

}  // namespace qunfold

#endif
