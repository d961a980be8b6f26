#include "qunfold/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "qunfold/error.hpp"

namespace qunfold {

namespace {

constexpr double kMassSumTolerance = 1e-12;
constexpr double kUnitTolerance = 1e-10;
constexpr std::size_t kPowerSetCap = 20;

bool is_subset(const Subset& b, const Subset& a) {
  return std::includes(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

BPA BPA::build(std::vector<std::string> frame,
               const std::vector<std::pair<std::vector<std::string>, double>>& masses) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < frame.size(); ++i)
    if (!index.emplace(frame[i], i).second) throw Error("duplicate frame element '" + frame[i] + "'");
  std::map<Subset, double> m;
  for (const auto& [tags, x] : masses) {
    Subset s;
    for (const auto& t : tags) {
      auto it = index.find(t);
      if (it == index.end()) throw Error("mass set element '" + t + "' is not in the frame");
      s.push_back(it->second);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    m[s] += x;
  }
  return build_indexed(std::move(frame), std::move(m));
}

BPA BPA::build_indexed(std::vector<std::string> frame, std::map<Subset, double> masses) {
  BPA b;
  b.frame_ = std::move(frame);
  double total = 0.0;
  for (const auto& [s, x] : masses) {
    if (!(x >= 0.0)) throw Error("negative mass");
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] >= b.frame_.size()) throw Error("mass set outside the frame");
      if (k > 0 && s[k - 1] >= s[k]) throw Error("mass set not sorted");
    }
    if (s.empty() && x > 0.0) throw Error("mass on the empty set");
    total += x;
    if (x > 0.0) b.masses_.emplace(s, x);
  }
  if (std::abs(total - 1.0) > kMassSumTolerance)
    throw Error("masses sum to " + std::to_string(total) + ", expected 1");
  return b;
}

double BPA::mass(const Subset& a) const {
  auto it = masses_.find(a);
  return it == masses_.end() ? 0.0 : it->second;
}

Subset BPA::subset(std::span<const std::string> tags) const {
  Subset s;
  for (const auto& t : tags) {
    auto it = std::find(frame_.begin(), frame_.end(), t);
    if (it == frame_.end()) throw Error("'" + t + "' is not in the frame");
    s.push_back(static_cast<std::size_t>(it - frame_.begin()));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double bel(const BPA& b, const Subset& a) {
  for (std::size_t x : a)
    if (x >= b.frame().size()) throw Error("subset outside the frame");
  double sum = 0.0;
  for (const auto& [s, x] : b.masses())
    if (is_subset(s, a)) sum += x;
  return sum;
}

double pl(const BPA& b, const Subset& a) {
  Subset c;
  std::size_t k = 0;
  for (std::size_t i = 0; i < b.frame().size(); ++i) {
    if (k < a.size() && a[k] == i) {
      ++k;
      continue;
    }
    c.push_back(i);
  }
  if (k != a.size()) throw Error("subset outside the frame");
  return 1.0 - bel(b, c);
}

std::vector<double> bel_table(const BPA& b) {
  const std::size_t n = b.frame().size();
  if (n > kPowerSetCap)
    throw CapExceeded("power set of a " + std::to_string(n) + "-element frame exceeds the cap of " +
                          std::to_string(kPowerSetCap),
                      std::size_t{1} << std::min<std::size_t>(n, 63));
  std::vector<double> table(std::size_t{1} << n, 0.0);
  for (const auto& [s, x] : b.masses()) {
    std::uint64_t mask = 0;
    for (std::size_t i : s) mask |= std::uint64_t{1} << i;
    table[mask] += x;
  }
  // Zeta transform over subsets.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t mask = 0; mask < table.size(); ++mask)
      if (mask & (std::size_t{1} << i)) table[mask] += table[mask ^ (std::size_t{1} << i)];
  return table;
}

ModalEvidence::ModalEvidence(const KripkeModel& m, std::vector<AtomTag> frame)
    : model_(&m), frame_(std::move(frame)), eval_(m, frame_) {
  if (!m.has_weights()) throw Error("model carries no weights");
  if (!check_sva(m, frame_)) throw Error("model violates SVA over the frame");
  if (!is_serial(m)) throw Error("model is not serial");
}

Formula ModalEvidence::subset_formula_of(const Subset& a) const {
  std::vector<AtomTag> tags;
  tags.reserve(a.size());
  for (std::size_t i : a) tags.push_back(frame_.at(i));
  return subset_formula(tags, frame_);
}

std::vector<bool> ModalEvidence::truth(Formula f) {
  std::vector<bool> out(model_->size());
  for (std::size_t w = 0; w < model_->size(); ++w) out[w] = eval_.eval(w, f);
  return out;
}

double ModalEvidence::weighted(Formula f) {
  double sum = 0.0;
  for (std::size_t w = 0; w < model_->size(); ++w)
    if (eval_.eval(w, f)) sum += model_->weight(w);
  return sum;
}

double ModalEvidence::bel(const Subset& a) { return weighted(Formula::box(subset_formula_of(a))); }

double ModalEvidence::pl(const Subset& a) { return weighted(Formula::diamond(subset_formula_of(a))); }

double ModalEvidence::mass(const Subset& a) {
  std::vector<Formula> parts{Formula::box(subset_formula_of(a))};
  for (std::size_t i : a) parts.push_back(Formula::diamond(Formula::atom(frame_.at(i))));
  return weighted(Formula::conj(std::move(parts)));
}

BPA bpa_from_model(const KripkeModel& m, std::span<const AtomTag> frame) {
  if (!m.has_weights()) throw Error("model carries no weights");
  if (!is_serial(m)) throw Error("model is not serial");
  std::vector<std::size_t> label(m.size());
  for (std::size_t w = 0; w < m.size(); ++w) label[w] = sva_label(m, w, frame);
  std::map<Subset, double> masses;
  for (std::size_t w = 0; w < m.size(); ++w) {
    Subset a;
    for (std::size_t s : m.successors(w)) a.push_back(label[s]);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    masses[a] += m.weight(w);
  }
  return BPA::build_indexed(std::vector<std::string>(frame.begin(), frame.end()), std::move(masses));
}

namespace {

Subset frame_subset(std::span<const AtomTag> frame, std::span<const AtomTag> a) {
  Subset s;
  for (const auto& t : a) {
    auto it = std::find(frame.begin(), frame.end(), t);
    if (it == frame.end()) throw Error("'" + t + "' is not in the frame");
    s.push_back(static_cast<std::size_t>(it - frame.begin()));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

double bel_modal(const KripkeModel& m, std::span<const AtomTag> frame, std::span<const AtomTag> a) {
  ModalEvidence ev(m, std::vector<AtomTag>(frame.begin(), frame.end()));
  return ev.bel(frame_subset(frame, a));
}

double pl_modal(const KripkeModel& m, std::span<const AtomTag> frame, std::span<const AtomTag> a) {
  ModalEvidence ev(m, std::vector<AtomTag>(frame.begin(), frame.end()));
  return ev.pl(frame_subset(frame, a));
}

std::vector<double> sentence_masses(const KripkeModel& m) {
  if (!m.has_weights()) throw Error("model carries no weights");
  const std::vector<AtomTag>& frame = m.worlds();
  if (!check_sva(m, frame)) throw Error("model violates SVA over its world keys");
  Evaluator ev(m);
  std::vector<double> masses(m.size(), 0.0);
  for (std::size_t n = 0; n < m.size(); ++n) {
    std::vector<Formula> members;
    for (std::size_t s : m.successors(n)) members.push_back(Formula::atom(frame[s]));
    Formula f = triangle(members);
    for (std::size_t j = 0; j < m.size(); ++j)
      if (ev.eval(j, f)) masses[n] += m.weight(j);
  }
  return masses;
}

std::vector<double> born_weights(const Eigen::VectorXd& psi_prev, const Eigen::MatrixXd& basis) {
  const Eigen::Index n_new = basis.rows();
  if (basis.cols() != n_new) throw Error("basis matrix is not square");
  if (psi_prev.size() > n_new) throw Error("previous state has more components than the new basis");
  if (std::abs(psi_prev.norm() - 1.0) > kUnitTolerance) throw Error("previous state is not a unit vector");
  Eigen::MatrixXd gram = basis.transpose() * basis;
  if ((gram - Eigen::MatrixXd::Identity(n_new, n_new)).cwiseAbs().maxCoeff() > kUnitTolerance)
    throw Error("basis is not orthonormal");
  std::vector<double> w(static_cast<std::size_t>(n_new));
  for (Eigen::Index k = 0; k < n_new; ++k) {
    double dot = basis.col(k).head(psi_prev.size()).dot(psi_prev);
    w[static_cast<std::size_t>(k)] = dot * dot;
  }
  return w;
}

ElementSet quanta_cover(const ProximitySpace& s, std::size_t x) {
  ElementSet q = s.empty_set();
  const ElementSet& own = quantum_of(s, x);
  for (std::size_t y = own.find_first(); y != ElementSet::npos; y = own.find_next(y)) q |= s.quantum(y);
  return q;
}

double generalized_born(const ProximitySpace& s, std::span<const double> weights, std::size_t psi) {
  if (weights.size() != s.size()) throw Error("weight count differs from carrier size");
  ElementSet q = quanta_cover(s, psi);
  double sum = 0.0;
  for (std::size_t y = q.find_first(); y != ElementSet::npos; y = q.find_next(y)) sum += weights[y];
  return sum;
}

std::vector<double> transition_likelihoods(const Eigen::VectorXd& psi_next,
                                           const Eigen::MatrixXd& old_basis) {
  if (old_basis.rows() > psi_next.size())
    throw Error("old basis has more components than the new state");
  std::vector<double> out(static_cast<std::size_t>(old_basis.cols()));
  for (Eigen::Index i = 0; i < old_basis.cols(); ++i) {
    double dot = psi_next.head(old_basis.rows()).dot(old_basis.col(i));
    out[static_cast<std::size_t>(i)] = dot * dot;
  }
  return out;
}

double bayes_posterior(std::span<const double> prior, std::span<const double> likelihoods,
                       std::size_t target, double tol) {
  if (prior.size() != likelihoods.size()) throw Error("prior and likelihoods differ in length");
  if (target >= prior.size()) throw Error("target outside the old basis");
  double rest = 0.0;
  for (std::size_t i = 0; i < likelihoods.size(); ++i)
    if (i != target) rest += likelihoods[i];
  const double p = prior[target];
  const double numerator = likelihoods[target] * p;
  const double normalizer = numerator + (1.0 - p) * rest;
  if (!(normalizer > tol)) throw Error("degenerate Bayes normalizer");
  return numerator / normalizer;
}

double belief_posterior(const ProximitySpace& s, std::span<const double> posteriors,
                        std::size_t target) {
  return generalized_born(s, posteriors, target);
}

}  // namespace qunfold
