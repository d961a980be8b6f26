// Stage engine. A run starts from the single-world base stage and repeatedly
// advances α → α+1: unfold the seed one level deeper, mirror the stage model
// into its proximity model, embed the tree, diagonalise D_2, pair worlds
// with eigenvectors, weight them by the previous state and select the
// eigenvector paired with the point world as the next state.

#ifndef QUNFOLD_UNIVERSE_HPP
#define QUNFOLD_UNIVERSE_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qunfold/bisim.hpp"
#include "qunfold/embedding.hpp"
#include "qunfold/proximity.hpp"
#include "qunfold/unfolding.hpp"

namespace qunfold {

struct UniverseConfig {
  UnfoldLimits limits;
  double eps_degenerate = 1e-8;  // relative to the spectral radius
  double eps_zero = 1e-12;
  PairingRule pairing = PairingRule::Positional;
  bool check_sentence_masses = true;
};

struct StageDiagnostics {
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_pairs;
  SchoenbergCheck schoenberg;
  bool bisimulation_ok = true;
  std::size_t bisimulation_violations = 0;
  bool proximity_ok = true;      // P_Σ reflexive and symmetric
  bool isometry_ok = true;       // Hamming(C_i, C_j) = d_T(i, j)
  bool prefix_ok = true;         // previous world keys are a prefix
  std::optional<CodeParams> code;
  double max_residual = 0.0;
  double orthonormality_error = 0.0;
  double born_sum = 1.0;
  /// max_n |m_n − ω_n| with m from the weighted stage model; absent when
  /// not computed.
  std::optional<double> sentence_mass_error;

  bool degenerate() const noexcept { return !degenerate_pairs.empty(); }
};

struct StageState {
  std::size_t alpha = 0;
  StageModel stage_model;
  SigmaModel sigma;
  ProximitySpace proximity;
  PreferredBasis basis;
  Eigen::VectorXd psi;          // Ψ_α
  std::size_t psi_world = 0;    // world paired with Ψ_α
  std::vector<double> born;     // ω per world
  StageDiagnostics diagnostics;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(psi.size()); }
};

/// α = 0: one world, basis {1}, Σ⁰ = id, Ψ₀ = (1), ω = (1).
StageState init_stage0(const SeedGraph& seed, const UniverseConfig& config = {});

/// Stage α+1 from stage α for the same seed.
StageState advance(const StageState& state, const SeedGraph& seed, const UniverseConfig& config = {});

/// Index of the unique world without a non-reflexive parent; throws Error
/// if there is not exactly one.
std::size_t point_world(const StageModel& m);

struct StageRecord {
  std::size_t alpha = 0;
  std::size_t n = 0;
  std::string selected_world;
  double selected_omega = 1.0;
  std::vector<double> omega;
  std::vector<double> eigenvalues;
  bool degenerate = false;
  bool schoenberg = false;
  bool bisimulation_ok = true;
  bool isometry_ok = true;
};

using RunTrace = std::vector<StageRecord>;

StageRecord record_of(const StageState& s);

/// k+1 records starting at the base stage. `on_stage` sees every state
/// before the next one is built.
RunTrace run(const SeedGraph& seed, std::size_t stages, const UniverseConfig& config = {},
             const std::function<void(const StageState&)>& on_stage = {});

struct Prediction {
  std::vector<double> omega;
  std::vector<double> generalized;  // P* per world
};

Prediction predict(const StageState& state);

struct Explanation {
  std::vector<double> likelihoods;  // |⟨Ψ_{α+1}, ι(ψ_i)⟩|² per old world
  double likelihood_sum = 0.0;
  std::vector<double> prior;
  std::vector<double> bayes;        // posterior per old world
  std::vector<double> belief;       // Bel(Q) per old world
};

/// `prior` defaults to uniform over the old basis; otherwise it must have
/// one entry per old world. Throws Error on a degenerate Bayes normalizer.
Explanation explain(const StageState& prev, const StageState& next,
                    std::optional<std::vector<double>> prior = std::nullopt);

}  // namespace qunfold

#endif
