#ifndef QUNFOLD_EMBEDDING_HPP
#define QUNFOLD_EMBEDDING_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/dynamic_bitset.hpp>

#include "qunfold/kripke.hpp"

namespace qunfold {

/// Root-path edge indicator. Bit k−1 stands for the edge from node k to its
/// parent, so a tree on N nodes yields words of length N−1.
using Codeword = boost::dynamic_bitset<>;

/// Parent index per node; node 0 is the root and the only node without a
/// parent. Throws Error for any other shape (several roots, cycles).
std::vector<Codeword> codewords(const std::vector<std::optional<std::size_t>>& parents);

std::size_t hamming(const Codeword& a, const Codeword& b);

struct CodeParams {
  std::size_t word_length = 0;
  std::size_t count = 0;
  std::size_t min_distance = 0;  // d_m
  std::size_t correction = 0;    // e = ⌊(d_m − 1)/2⌋, 0 when d_m = 0
  bool degenerate = false;       // two identical words
};

/// Throws Error for fewer than two words or unequal lengths.
CodeParams code_params(const std::vector<Codeword>& words);

/// (D_2)_ij = √hamming(C_i, C_j).
Eigen::MatrixXd distance_matrix_d2(const std::vector<Codeword>& words);

struct EighOptions {
  std::size_t max_sweeps = 100;
  double symmetry_tol = 1e-12;
  double degeneracy_rel = 1e-8;  // ε_deg = degeneracy_rel · spectral radius
};

/// Eigenpairs sorted by descending value. Column k of `vectors` belongs to
/// values(k). Each column has its first max-magnitude component positive.
/// Within an eigenvalue cluster (consecutive gaps ≤ ε_deg) the columns are
/// rebuilt from the canonical axes in index order by Gram-Schmidt and then
/// ordered lexicographically descending.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_pairs;  // |λ_i − λ_j| ≤ ε_deg, i < j
  double spectral_radius = 0.0;
  double degeneracy_eps = 0.0;
  std::size_t sweeps = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
  bool degenerate() const noexcept { return !degenerate_pairs.empty(); }
};

/// Cyclic Jacobi. Throws Error for non-square or non-symmetric input and
/// when the sweep limit is reached without convergence.
Spectrum eigh(const Eigen::MatrixXd& a, const EighOptions& options = {});

/// max_k ‖A u_k − λ_k u_k‖_∞.
double max_residual(const Eigen::MatrixXd& a, const Spectrum& s);
/// max |UᵀU − I|.
double orthonormality_error(const Spectrum& s);

struct SchoenbergCheck {
  std::size_t positive = 0;  // eigenvalues above rel · spectral radius
  bool applicable = false;   // N ≥ 2
  bool holds = false;        // applicable and positive == 1
};

SchoenbergCheck schoenberg_check(const Spectrum& s, double rel = 1e-9);

enum class PairingRule { Positional, MaxComponent };

/// World ↔ eigenvector bijection for one stage.
struct PreferredBasis {
  std::vector<WorldId> worlds;
  Spectrum spectrum;
  PairingRule rule = PairingRule::Positional;
  std::vector<std::size_t> vector_of_world;  // world n -> spectrum column

  /// Column n is the eigenvector paired with world n.
  Eigen::MatrixXd basis() const;
  Eigen::VectorXd vector_for(std::size_t world) const;
  double value_for(std::size_t world) const;
  /// u_k u_kᵀ for spectrum column k.
  Eigen::MatrixXd projector(std::size_t k) const;
  /// Σ_k λ_k u_k u_kᵀ.
  Eigen::MatrixXd reconstruct() const;
};

/// Positional: world n ↔ column n. MaxComponent: columns in order take the
/// unpaired world with the largest |component| (lowest index on ties).
/// Throws Error if the world count differs from the spectrum size.
PreferredBasis preferred_basis(std::vector<WorldId> worlds, Spectrum spectrum,
                               PairingRule rule = PairingRule::Positional);

const char* to_string(PairingRule r) noexcept;
/// Accepts "positional" and "max-component"; throws Error otherwise.
PairingRule parse_pairing_rule(const std::string& text);

}  // namespace qunfold

#endif
