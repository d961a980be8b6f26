#include "qunfold/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "qunfold/error.hpp"

namespace qunfold {

ProximitySpace ProximitySpace::build(std::vector<std::string> carrier,
                                     const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < carrier.size(); ++i)
    if (!index.emplace(carrier[i], i).second) throw Error("duplicate element '" + carrier[i] + "'");
  std::vector<std::pair<std::size_t, std::size_t>> ip;
  ip.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end()) throw Error("unknown element '" + a + "'");
    if (ib == index.end()) throw Error("unknown element '" + b + "'");
    ip.emplace_back(ia->second, ib->second);
  }
  return build_indexed(std::move(carrier), ip);
}

ProximitySpace ProximitySpace::build_indexed(std::vector<std::string> carrier,
                                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  ProximitySpace s;
  const std::size_t n = carrier.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!s.index_.emplace(carrier[i], i).second) throw Error("duplicate element '" + carrier[i] + "'");
  s.carrier_ = std::move(carrier);
  s.quanta_.assign(n, ElementSet(n));
  for (std::size_t i = 0; i < n; ++i) s.quanta_[i].set(i);
  for (const auto& [a, b] : pairs) {
    if (a >= n || b >= n) throw Error("proximity pair refers to an unknown element");
    s.quanta_[a].set(b);
    s.quanta_[b].set(a);
  }
  s.adj_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = s.quanta_[i].find_first(); j != ElementSet::npos; j = s.quanta_[i].find_next(j))
      if (j != i) s.adj_[i].push_back(j);
  return s;
}

ProximitySpace ProximitySpace::of_model(const KripkeModel& m) {
  return build_indexed(m.worlds(), m.access());
}

std::size_t ProximitySpace::index_of(const std::string& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) throw Error("unknown element '" + x + "'");
  return it->second;
}

std::vector<std::pair<std::size_t, std::size_t>> ProximitySpace::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j : adj_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

ElementSet ProximitySpace::make_set(std::span<const std::string> members) const {
  ElementSet s = empty_set();
  for (const auto& x : members) s.set(index_of(x));
  return s;
}

const ElementSet& quantum_of(const ProximitySpace& s, std::size_t x) {
  if (x >= s.size()) throw Error("unknown element index " + std::to_string(x));
  return s.quantum(x);
}

ElementSet inner_generators(const ProximitySpace& s, const ElementSet& a) {
  ElementSet g = s.empty_set();
  for (std::size_t x = a.find_first(); x != ElementSet::npos; x = a.find_next(x))
    if (s.quantum(x).is_subset_of(a)) g.set(x);
  return g;
}

QuantumSet quantum_union(const ProximitySpace& s, const ElementSet& generators) {
  ElementSet members = s.empty_set();
  for (std::size_t x = generators.find_first(); x != ElementSet::npos; x = generators.find_next(x))
    members |= s.quantum(x);
  return {std::move(members), generators};
}

std::optional<QuantumSet> as_quantum_set(const ProximitySpace& s, const ElementSet& a) {
  QuantumSet q = quantum_union(s, inner_generators(s, a));
  if (q.members != a) return std::nullopt;
  return q;
}

bool is_quantum_set(const ProximitySpace& s, const ElementSet& a) {
  return as_quantum_set(s, a).has_value();
}

QuantumSet join_p(const ProximitySpace&, const QuantumSet& a, const QuantumSet& b) {
  return {a.members | b.members, a.witness | b.witness};
}

QuantumSet meet_p(const ProximitySpace& s, const QuantumSet& a, const QuantumSet& b) {
  return quantum_union(s, inner_generators(s, a.members & b.members));
}

QuantumSet ortho_p(const ProximitySpace& s, const QuantumSet& q) {
  return quantum_union(s, ~q.members);
}

bool separated(const ProximitySpace& s, const ElementSet& a, const ElementSet& b) {
  if (a.intersects(b)) return false;
  for (std::size_t x = a.find_first(); x != ElementSet::npos; x = a.find_next(x))
    if (s.quantum(x).intersects(b)) return false;
  return true;
}

std::optional<std::vector<std::size_t>> open_path(const ProximitySpace& s, std::size_t x,
                                                  std::size_t y) {
  const std::size_t n = s.size();
  if (x >= n || y >= n) throw Error("unknown element index");
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev(n, kUnseen);
  prev[x] = x;
  std::deque<std::size_t> queue{x};
  while (!queue.empty() && prev[y] == kUnseen) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : s.neighbours(u)) {
      if (prev[v] != kUnseen) continue;
      prev[v] = u;
      queue.push_back(v);
    }
  }
  if (prev[y] == kUnseen) return std::nullopt;
  std::vector<std::size_t> path{y};
  while (path.back() != x) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

bool is_connected(const ProximitySpace& s) {
  if (s.size() == 0) return true;
  std::vector<bool> seen(s.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : s.neighbours(u))
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
  }
  return count == s.size();
}

std::vector<std::vector<std::size_t>> tree_metric(const ProximitySpace& s) {
  const std::size_t n = s.size();
  if (n > 0 && s.pairs().size() != n - 1) throw Error("proximity relation is not a tree (cycle)");
  if (!is_connected(s)) throw Error("proximity relation is not a tree (disconnected)");
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, kUnseen));
  for (std::size_t src = 0; src < n; ++src) {
    auto& row = d[src];
    row[src] = 0;
    std::deque<std::size_t> queue{src};
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : s.neighbours(u))
        if (row[v] == kUnseen) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
    }
  }
  return d;
}

namespace {

std::vector<std::string> numbered_carrier(std::size_t n) {
  std::vector<std::string> c;
  c.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) c.push_back(std::to_string(i));
  return c;
}

}  // namespace

ProximitySpace proximity_from_spectrum(std::span<const double> eigenvalues, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error("epsilon must be non-negative");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    for (std::size_t j = i + 1; j < eigenvalues.size(); ++j)
      if (std::abs(eigenvalues[i] - eigenvalues[j]) <= epsilon) pairs.emplace_back(i, j);
  return ProximitySpace::build_indexed(numbered_carrier(eigenvalues.size()), pairs);
}

ProximitySpace proximity_from_inner_products(const std::vector<Eigen::VectorXd>& vectors,
                                             double zero_tol) {
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != vectors.front().size()) throw Error("vectors differ in dimension");
    if (vectors[i].cwiseAbs().maxCoeff() == 0.0)
      throw Error("vector " + std::to_string(i + 1) + " is zero");
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i + 1; j < vectors.size(); ++j)
      if (std::abs(vectors[i].dot(vectors[j])) > zero_tol) pairs.emplace_back(i, j);
  return ProximitySpace::build_indexed(numbered_carrier(vectors.size()), pairs);
}

std::vector<QuantumSet> enumerate_quantum_sets(const ProximitySpace& s, std::size_t max_carrier) {
  if (s.size() > max_carrier)
    throw CapExceeded("carrier of " + std::to_string(s.size()) + " elements exceeds lattice cap " +
                          std::to_string(max_carrier),
                      s.size());
  // Closure of {∅} under union with single quanta.
  std::set<ElementSet> seen{s.empty_set()};
  std::vector<ElementSet> frontier{s.empty_set()};
  while (!frontier.empty()) {
    std::vector<ElementSet> next;
    for (const auto& a : frontier)
      for (std::size_t x = 0; x < s.size(); ++x) {
        ElementSet b = a | s.quantum(x);
        if (seen.insert(b).second) next.push_back(std::move(b));
      }
    frontier = std::move(next);
  }
  std::vector<QuantumSet> out;
  out.reserve(seen.size());
  for (const auto& a : seen) out.push_back(*as_quantum_set(s, a));
  return out;
}

}  // namespace qunfold
