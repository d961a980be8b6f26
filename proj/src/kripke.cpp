#include "qunfold/kripke.hpp"

#include <algorithm>
#include <cmath>

#include "qunfold/error.hpp"

namespace qunfold {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

}  // namespace

KripkeModel KripkeModel::build(std::vector<WorldId> worlds,
                               const std::vector<std::pair<WorldId, WorldId>>& access,
                               const std::map<WorldId, std::vector<AtomTag>>& valuation,
                               const std::optional<std::map<WorldId, double>>& weights) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    if (!index.emplace(worlds[i], i).second) throw Error("duplicate world '" + worlds[i] + "'");
  }
  auto lookup = [&](const WorldId& w, const char* where) {
    auto it = index.find(w);
    if (it == index.end())
      throw Error(std::string("undeclared world '") + w + "' in " + where);
    return it->second;
  };

  std::vector<Edge> edges;
  edges.reserve(access.size());
  for (const auto& [from, to] : access) edges.emplace_back(lookup(from, "access"), lookup(to, "access"));

  std::vector<std::vector<AtomTag>> vals(worlds.size());
  for (const auto& [w, tags] : valuation) vals[lookup(w, "valuation")] = tags;

  std::optional<std::vector<double>> ws;
  if (weights) {
    ws.emplace(worlds.size(), 0.0);
    std::vector<bool> seen(worlds.size(), false);
    for (const auto& [w, x] : *weights) {
      std::size_t i = lookup(w, "weights");
      (*ws)[i] = x;
      seen[i] = true;
    }
    for (std::size_t i = 0; i < worlds.size(); ++i)
      if (!seen[i]) throw Error("missing weight for world '" + worlds[i] + "'");
  }
  return build_indexed(std::move(worlds), std::move(edges), std::move(vals), std::move(ws));
}

KripkeModel KripkeModel::build_indexed(std::vector<WorldId> worlds, std::vector<Edge> access,
                                       std::vector<std::vector<AtomTag>> valuation,
                                       std::optional<std::vector<double>> weights) {
  KripkeModel m;
  m.worlds_ = std::move(worlds);
  const std::size_t n = m.worlds_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (m.worlds_[i].empty()) throw Error("empty world id");
    if (!m.index_.emplace(m.worlds_[i], i).second)
      throw Error("duplicate world '" + m.worlds_[i] + "'");
  }
  for (const auto& [a, b] : access)
    if (a >= n || b >= n) throw Error("access pair refers to an undeclared world");
  std::sort(access.begin(), access.end());
  access.erase(std::unique(access.begin(), access.end()), access.end());
  m.access_ = std::move(access);
  m.succ_.assign(n, {});
  for (const auto& [a, b] : m.access_) m.succ_[a].push_back(b);

  if (valuation.size() > n) throw Error("valuation refers to an undeclared world");
  valuation.resize(n);
  for (auto& tags : valuation) {
    for (const auto& t : tags)
      if (!is_valid_atom_tag(t)) throw Error("invalid atom tag '" + t + "'");
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    m.vocabulary_.insert(tags.begin(), tags.end());
  }
  m.valuation_ = std::move(valuation);

  if (weights) {
    if (weights->size() != n) throw Error("weight vector length differs from world count");
    m.weights_ = std::move(weights);
    m.validate_weights();
  }
  return m;
}

void KripkeModel::validate_weights() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_->size(); ++i) {
    double w = (*weights_)[i];
    if (!(w >= 0.0 && w <= 1.0))
      throw Error("weight of world '" + worlds_[i] + "' outside [0,1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance)
    throw Error("weights sum to " + std::to_string(sum) + ", expected 1");
}

std::size_t KripkeModel::index_of(std::string_view key) const {
  auto i = find(key);
  if (!i) throw Error("unknown world '" + std::string(key) + "'");
  return *i;
}

std::optional<std::size_t> KripkeModel::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool KripkeModel::has_edge(std::size_t from, std::size_t to) const {
  const auto& s = succ_.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

std::vector<std::vector<int>> KripkeModel::relation_matrix() const {
  std::vector<std::vector<int>> r(size(), std::vector<int>(size(), 0));
  for (const auto& [a, b] : access_) r[a][b] = 1;
  return r;
}

bool KripkeModel::validates(std::size_t w, std::string_view tag) const {
  const auto& tags = valuation_.at(w);
  return std::binary_search(tags.begin(), tags.end(), tag,
                            [](std::string_view a, std::string_view b) { return a < b; });
}

double KripkeModel::weight(std::size_t w) const {
  if (w >= size()) throw Error("world index out of range");
  return weights_ ? (*weights_)[w] : 1.0 / static_cast<double>(size());
}

KripkeModel KripkeModel::with_weights(std::vector<double> weights) const {
  KripkeModel m = *this;
  if (weights.size() != size()) throw Error("weight vector length differs from world count");
  m.weights_ = std::move(weights);
  m.validate_weights();
  return m;
}

bool check_sva(const KripkeModel& m, std::span<const AtomTag> frame) {
  for (std::size_t w = 0; w < m.size(); ++w) {
    std::size_t hits = 0;
    for (const auto& x : frame)
      if (m.validates(w, x)) ++hits;
    if (hits != 1) return false;
  }
  return true;
}

std::size_t sva_label(const KripkeModel& m, std::size_t w, std::span<const AtomTag> frame) {
  std::optional<std::size_t> label;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    if (!m.validates(w, frame[k])) continue;
    if (label) throw Error("SVA violated: world '" + m.world(w) + "' validates several frame tags");
    label = k;
  }
  if (!label) throw Error("SVA violated: world '" + m.world(w) + "' validates no frame tag");
  return *label;
}

Formula subset_formula(std::span<const AtomTag> subset, std::span<const AtomTag> frame) {
  for (const auto& x : subset)
    if (std::find(frame.begin(), frame.end(), x) == frame.end())
      throw Error("subset element '" + x + "' is not in the frame");
  std::vector<Formula> members;
  if (subset.empty()) {
    for (const auto& x : frame) members.push_back(Formula::negation(Formula::atom(x)));
    return Formula::conj(std::move(members));
  }
  for (const auto& x : subset) members.push_back(Formula::atom(x));
  return Formula::disj(std::move(members));
}

bool is_serial(const KripkeModel& m) {
  for (std::size_t w = 0; w < m.size(); ++w)
    if (m.successors(w).empty()) return false;
  return true;
}

}  // namespace qunfold
