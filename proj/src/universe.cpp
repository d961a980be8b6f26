#include "qunfold/universe.hpp"

#include <algorithm>
#include <cmath>

#include "qunfold/error.hpp"
#include "qunfold/evidence.hpp"

namespace qunfold {

namespace {

Spectrum identity_spectrum() {
  Spectrum s;
  s.values = Eigen::VectorXd::Ones(1);
  s.vectors = Eigen::MatrixXd::Identity(1, 1);
  s.spectral_radius = 1.0;
  return s;
}

double sentence_mass_error(const StageModel& m, const std::vector<double>& omega) {
  std::vector<double> w(omega);
  for (double& x : w) x = std::clamp(x, 0.0, 1.0);
  KripkeModel weighted = m.kripke.with_weights(w);
  std::vector<double> masses = sentence_masses(weighted);
  double worst = 0.0;
  for (std::size_t n = 0; n < masses.size(); ++n) worst = std::max(worst, std::abs(masses[n] - omega[n]));
  return worst;
}

}  // namespace

std::size_t point_world(const StageModel& m) {
  std::vector<bool> has_parent(m.kripke.size(), false);
  for (const auto& [a, b] : m.kripke.access())
    if (a != b) has_parent[b] = true;
  std::optional<std::size_t> point;
  for (std::size_t w = 0; w < has_parent.size(); ++w) {
    if (has_parent[w]) continue;
    if (point) throw Error("stage model has several point worlds");
    point = w;
  }
  if (!point) throw Error("stage model has no point world");
  return *point;
}

StageState init_stage0(const SeedGraph& seed, const UniverseConfig& config) {
  StageModel m = unfold(seed, 0, config.limits);
  SigmaModel sigma = build_sigma(m);
  ProximitySpace prox = ProximitySpace::of_model(sigma.kripke);
  PreferredBasis basis = preferred_basis(m.kripke.worlds(), identity_spectrum(), config.pairing);
  StageState s{0,
               std::move(m),
               std::move(sigma),
               std::move(prox),
               std::move(basis),
               Eigen::VectorXd::Ones(1),
               0,
               {1.0},
               {}};
  s.diagnostics.schoenberg = schoenberg_check(s.basis.spectrum);
  auto report = verify_bijective_bisimulation(TransitionSystem(s.stage_model.kripke),
                                              s.sigma.plus_system(), s.sigma.pairing);
  s.diagnostics.bisimulation_ok = report.ok;
  s.diagnostics.bisimulation_violations = report.violations.size();
  s.diagnostics.proximity_ok = is_proximity_relation(s.sigma.kripke);
  return s;
}

StageState advance(const StageState& state, const SeedGraph& seed, const UniverseConfig& config) {
  const std::size_t alpha = state.alpha + 1;
  StageModel m = unfold(seed, alpha, config.limits);
  const std::size_t n = m.kripke.size();
  StageDiagnostics diag;

  const auto& old_worlds = state.stage_model.kripke.worlds();
  diag.prefix_ok = old_worlds.size() <= n &&
                   std::equal(old_worlds.begin(), old_worlds.end(), m.kripke.worlds().begin());
  if (!diag.prefix_ok) throw Error("stage worlds do not extend the previous stage");

  SigmaModel sigma = build_sigma(m);
  auto report = verify_bijective_bisimulation(TransitionSystem(m.kripke), sigma.plus_system(), sigma.pairing);
  diag.bisimulation_ok = report.ok;
  diag.bisimulation_violations = report.violations.size();
  diag.proximity_ok = is_proximity_relation(sigma.kripke);

  ProximitySpace prox = ProximitySpace::of_model(sigma.kripke);
  const auto metric = tree_metric(prox);
  const auto words = codewords(m.tree.parents());
  for (std::size_t i = 0; i < n && diag.isometry_ok; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (hamming(words[i], words[j]) != metric[i][j]) {
        diag.isometry_ok = false;
        break;
      }
  if (n >= 2) diag.code = code_params(words);

  EighOptions eopt;
  eopt.degeneracy_rel = config.eps_degenerate;
  const Eigen::MatrixXd d2 = distance_matrix_d2(words);
  Spectrum spectrum = eigh(d2, eopt);
  diag.max_residual = max_residual(d2, spectrum);
  diag.orthonormality_error = orthonormality_error(spectrum);
  diag.schoenberg = schoenberg_check(spectrum);
  diag.degenerate_pairs = spectrum.degenerate_pairs;
  PreferredBasis basis = preferred_basis(m.kripke.worlds(), std::move(spectrum), config.pairing);

  std::vector<double> born = born_weights(state.psi, basis.basis());
  diag.born_sum = 0.0;
  for (double w : born) diag.born_sum += w;
  if (config.check_sentence_masses) diag.sentence_mass_error = sentence_mass_error(m, born);

  const std::size_t point = point_world(m);
  Eigen::VectorXd psi = basis.vector_for(point);

  return StageState{alpha,
                    std::move(m),
                    std::move(sigma),
                    std::move(prox),
                    std::move(basis),
                    std::move(psi),
                    point,
                    std::move(born),
                    std::move(diag)};
}

StageRecord record_of(const StageState& s) {
  StageRecord r;
  r.alpha = s.alpha;
  r.n = s.dim();
  r.selected_world = s.stage_model.kripke.world(s.psi_world);
  r.selected_omega = s.born.at(s.psi_world);
  r.omega = s.born;
  const auto& values = s.basis.spectrum.values;
  r.eigenvalues.assign(values.data(), values.data() + values.size());
  r.degenerate = s.diagnostics.degenerate();
  r.schoenberg = s.diagnostics.schoenberg.holds;
  r.bisimulation_ok = s.diagnostics.bisimulation_ok;
  r.isometry_ok = s.diagnostics.isometry_ok;
  return r;
}

RunTrace run(const SeedGraph& seed, std::size_t stages, const UniverseConfig& config,
             const std::function<void(const StageState&)>& on_stage) {
  RunTrace trace;
  trace.reserve(stages + 1);
  StageState s = init_stage0(seed, config);
  for (std::size_t k = 0;; ++k) {
    trace.push_back(record_of(s));
    if (on_stage) on_stage(s);
    if (k == stages) break;
    s = advance(s, seed, config);
  }
  return trace;
}

Prediction predict(const StageState& state) {
  Prediction p;
  p.omega = state.born;
  p.generalized.reserve(state.born.size());
  for (std::size_t w = 0; w < state.born.size(); ++w)
    p.generalized.push_back(generalized_born(state.proximity, state.born, w));
  return p;
}

Explanation explain(const StageState& prev, const StageState& next, std::optional<std::vector<double>> prior) {
  const std::size_t n_old = prev.dim();
  if (next.alpha != prev.alpha + 1) throw Error("explain needs consecutive stages");
  Explanation e;
  e.likelihoods = transition_likelihoods(next.psi, prev.basis.basis());
  for (double x : e.likelihoods) e.likelihood_sum += x;
  if (prior) {
    if (prior->size() != n_old) throw Error("prior length differs from the old basis size");
    e.prior = std::move(*prior);
  } else {
    e.prior.assign(n_old, 1.0 / static_cast<double>(n_old));
  }
  e.bayes.reserve(n_old);
  for (std::size_t i = 0; i < n_old; ++i) e.bayes.push_back(bayes_posterior(e.prior, e.likelihoods, i));
  e.belief.reserve(n_old);
  for (std::size_t i = 0; i < n_old; ++i) e.belief.push_back(belief_posterior(prev.proximity, e.bayes, i));
  return e;
}

}  // namespace qunfold
