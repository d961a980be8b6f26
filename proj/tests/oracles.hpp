// Independent reference implementations used by the tests. Nothing here
// calls into the library under test.

#ifndef QUNFOLD_TESTS_ORACLES_HPP
#define QUNFOLD_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Parents = std::vector<std::optional<std::size_t>>;

// Random recursive tree: node i > 0 hangs below a uniform earlier node.
inline Parents random_tree(std::size_t n, std::mt19937_64& rng) {
  Parents p(n);
  for (std::size_t i = 1; i < n; ++i) p[i] = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
  return p;
}

inline std::vector<std::vector<std::size_t>> adjacency(const Parents& p) {
  std::vector<std::vector<std::size_t>> adj(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i]) {
      adj[i].push_back(*p[i]);
      adj[*p[i]].push_back(i);
    }
  return adj;
}

// All-pairs path lengths by BFS from every node.
inline std::vector<std::vector<std::size_t>> bfs_distances(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, SIZE_MAX));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<std::size_t> q;
    d[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t v : adj[u])
        if (d[s][v] == SIZE_MAX) {
          d[s][v] = d[s][u] + 1;
          q.push(v);
        }
    }
  }
  return d;
}

// AHU string of the subtree at `v` with `from` as its parent.
inline std::string ahu(const std::vector<std::vector<std::size_t>>& adj, std::size_t v, std::size_t from) {
  std::vector<std::string> kids;
  for (std::size_t u : adj[v])
    if (u != from) kids.push_back(ahu(adj, u, v));
  std::sort(kids.begin(), kids.end());
  std::string s = "(";
  for (const auto& k : kids) s += k;
  return s + ")";
}

// Canonical form of a free tree: AHU string rooted at the center, minimised
// over bicentres.
inline std::string free_tree_code(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  if (n == 1) return "()";
  std::vector<std::size_t> deg(n);
  std::vector<std::size_t> layer;
  for (std::size_t i = 0; i < n; ++i) {
    deg[i] = adj[i].size();
    if (deg[i] <= 1) layer.push_back(i);
  }
  std::size_t left = n;
  while (left > 2) {
    std::vector<std::size_t> next;
    for (std::size_t v : layer) {
      --left;
      for (std::size_t u : adj[v])
        if (--deg[u] == 1) next.push_back(u);
    }
    layer = std::move(next);
  }
  std::string best;
  for (std::size_t c : layer) {
    std::string code = ahu(adj, c, SIZE_MAX);
    if (best.empty() || code < best) best = code;
  }
  return best;
}

// One parent array per isomorphism class of free trees on n nodes.
inline std::vector<Parents> free_trees(std::size_t n) {
  std::vector<Parents> level{Parents{std::nullopt}};
  for (std::size_t size = 2; size <= n; ++size) {
    std::map<std::string, Parents> seen;
    for (const auto& t : level)
      for (std::size_t at = 0; at < t.size(); ++at) {
        Parents grown = t;
        grown.push_back(at);
        seen.emplace(free_tree_code(adjacency(grown)), grown);
      }
    level.clear();
    for (auto& [code, t] : seen) level.push_back(std::move(t));
  }
  return level;
}

// Characteristic polynomial det(λI − A) by Faddeev–LeVerrier; c[k] is the
// coefficient of λ^(n−k), c[0] = 1.
inline std::vector<double> char_poly(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{k-1} I, c_k = −tr(A M_k)/k
    std::vector<std::vector<double>> am(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) am[i][j] += a[i][l] * m[l][j];
    for (std::size_t i = 0; i < n; ++i) am[i][i] += c[k - 1];
    m = am;
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += a[i][l] * m[l][i];
    c[k] = -tr / static_cast<double>(k);
  }
  return c;
}

inline double poly_eval(const std::vector<double>& c, double x) {
  double y = 0.0;
  for (double ck : c) y = y * x + ck;
  return y;
}

// Frozen high-precision roots of det(λI − D_2) for the trees with at most
// four nodes, computed symbolically ahead of time.
struct FrozenSpectrum {
  Parents tree;
  std::vector<double> values;  // descending
};

inline std::vector<FrozenSpectrum> frozen_spectra() {
  return {
      {{std::nullopt, 0}, {1.0, -1.0}},
      {{std::nullopt, 0, 1}, {2.2882456112707371904, -0.87403204889764214160, -1.4142135623730950488}},
      {{std::nullopt, 0, 1, 2},
       {3.8078283690053738003, -0.81326191777132358037, -1.0757775614364965067, -1.9187888897975537132}},
      {{std::nullopt, 0, 0, 0}, {3.6502815398728847452, -0.82185441512669464761, -1.4142135623730950488,
                                 -1.4142135623730950488}},
  };
}

// Brute-force modal semantics over an explicit successor list. Formulas are
// plain trees so this shares no code with the hash-consed library type.
struct F {
  enum Kind { Atom, Top, Not, And, Or, Box, Dia } kind;
  std::string tag;
  std::vector<F> kids;
};

inline bool holds(const std::vector<std::vector<std::size_t>>& succ, const std::vector<std::set<std::string>>& val,
                  std::size_t w, const F& f) {
  switch (f.kind) {
    case F::Atom: return val[w].count(f.tag) > 0;
    case F::Top: return true;
    case F::Not: return !holds(succ, val, w, f.kids[0]);
    case F::And:
      return std::all_of(f.kids.begin(), f.kids.end(), [&](const F& k) { return holds(succ, val, w, k); });
    case F::Or:
      return std::any_of(f.kids.begin(), f.kids.end(), [&](const F& k) { return holds(succ, val, w, k); });
    case F::Box:
      return std::all_of(succ[w].begin(), succ[w].end(), [&](std::size_t v) { return holds(succ, val, v, f.kids[0]); });
    case F::Dia:
      return std::any_of(succ[w].begin(), succ[w].end(), [&](std::size_t v) { return holds(succ, val, v, f.kids[0]); });
  }
  return false;
}

inline std::string text(const F& f) {
  auto list = [&](const char* op) {
    std::string s = op;
    s += "{";
    for (std::size_t i = 0; i < f.kids.size(); ++i) s += (i ? "," : "") + text(f.kids[i]);
    return s + "}";
  };
  switch (f.kind) {
    case F::Atom: return "atom:" + f.tag;
    case F::Top: return "T";
    case F::Not: return "~" + text(f.kids[0]);
    case F::And: return list("/\\");
    case F::Or: return list("\\/");
    case F::Box: return "[]" + text(f.kids[0]);
    case F::Dia: return "<>" + text(f.kids[0]);
  }
  return "";
}

inline F random_formula(std::mt19937_64& rng, std::size_t depth, const std::vector<std::string>& tags) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  if (depth == 0 || pick(4) == 0) {
    if (pick(5) == 0) return {F::Top, "", {}};
    return {F::Atom, tags[pick(tags.size())], {}};
  }
  switch (pick(5)) {
    case 0: return {F::Not, "", {random_formula(rng, depth - 1, tags)}};
    case 1: return {F::Box, "", {random_formula(rng, depth - 1, tags)}};
    case 2: return {F::Dia, "", {random_formula(rng, depth - 1, tags)}};
    default: {
      F f{pick(2) ? F::And : F::Or, "", {}};
      std::size_t k = pick(4);
      for (std::size_t i = 0; i < k; ++i) f.kids.push_back(random_formula(rng, depth - 1, tags));
      return f;
    }
  }
}

}  // namespace oracle

#endif
