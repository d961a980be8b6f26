#include "qunfold/bisim.hpp"

#include <algorithm>
#include <map>

#include "qunfold/error.hpp"

namespace qunfold {

TransitionSystem::TransitionSystem(const KripkeModel& m) : TransitionSystem(m, m.access()) {}

TransitionSystem::TransitionSystem(const KripkeModel& m, const std::vector<KripkeModel::Edge>& edges)
    : model_(&m), succ_(m.size()) {
  for (const auto& [a, b] : edges) {
    if (a >= m.size() || b >= m.size()) throw Error("transition refers to an undeclared world");
    succ_[a].push_back(b);
  }
  for (auto& s : succ_) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

bool TransitionSystem::has_edge(std::size_t from, std::size_t to) const {
  const auto& s = succ_.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

Bisimulation::Bisimulation(std::vector<std::size_t> block_g, std::vector<std::size_t> block_h,
                           std::size_t block_count)
    : block_g_(std::move(block_g)), block_h_(std::move(block_h)), block_count_(block_count) {}

std::vector<std::pair<std::size_t, std::size_t>> Bisimulation::pairs() const {
  std::vector<std::vector<std::size_t>> members(block_count_);
  for (std::size_t j = 0; j < block_h_.size(); ++j) members[block_h_[j]].push_back(j);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < block_g_.size(); ++i)
    for (std::size_t j : members[block_g_[i]]) out.emplace_back(i, j);
  return out;
}

namespace {

// Paige-Tarjan relational coarsest partition. Q-blocks are contiguous
// ranges of `elems_`; X-blocks group Q-blocks. Invariant: Q is stable with
// respect to every X-block, so refinement ends once every X-block holds a
// single Q-block.
class Refiner {
 public:
  Refiner(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges,
          const std::vector<std::size_t>& initial_class)
      : n_(n), edges_(std::move(edges)), preds_(n), block_of_(n), pos_(n), marked_(n, false),
        count_b_(n, 0), new_rec_(n, kNone) {
    for (std::size_t e = 0; e < edges_.size(); ++e) preds_[edges_[e].second].push_back(e);

    // Initial Q: by class, then split off worlds without successors.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return initial_class[a] < initial_class[b];
    });
    elems_ = order;
    xblocks_.push_back({});
    for (std::size_t k = 0; k < n;) {
      std::size_t end = k;
      while (end < n && initial_class[order[end]] == initial_class[order[k]]) ++end;
      new_block(k, end, 0);
      k = end;
    }
    for (std::size_t k = 0; k < n; ++k) pos_[elems_[k]] = k;

    // One count record per source: |E(x) ∩ U|.
    std::vector<std::size_t> outdeg(n, 0);
    for (const auto& [a, b] : edges_) ++outdeg[a];
    std::vector<std::size_t> rec_of(n, kNone);
    edge_rec_.resize(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      std::size_t x = edges_[e].first;
      if (rec_of[x] == kNone) {
        rec_of[x] = counts_.size();
        counts_.push_back(outdeg[x]);
      }
      edge_rec_[e] = rec_of[x];
    }
    std::vector<std::size_t> with_succ;
    for (std::size_t x = 0; x < n; ++x)
      if (outdeg[x] > 0) with_succ.push_back(x);
    split_marked(with_succ);
    if (xblocks_[0].size() >= 2) compound_.push_back(0);
  }

  void run() {
    while (!compound_.empty()) {
      std::size_t s = compound_.back();
      compound_.pop_back();
      auto& members = xblocks_[s];
      if (members.size() < 2) continue;

      std::size_t b = members[0];
      if (block_size(members[1]) < block_size(b)) b = members[1];
      remove_from_xblock(b);
      if (xblocks_[s].size() >= 2) compound_.push_back(s);
      std::size_t sx = xblocks_.size();
      xblocks_.push_back({});
      add_to_xblock(b, sx);

      std::vector<std::size_t> b_elems(elems_.begin() + blocks_[b].begin,
                                       elems_.begin() + blocks_[b].end);

      // E⁻¹(B) with |E(x) ∩ B| and the record of |E(x) ∩ S|.
      std::vector<std::size_t> pre_b;
      for (std::size_t y : b_elems) {
        for (std::size_t e : preds_[y]) {
          std::size_t x = edges_[e].first;
          if (count_b_[x] == 0) {
            pre_b.push_back(x);
            s_rec_of_[x] = edge_rec_[e];
          }
          ++count_b_[x];
        }
      }
      split_marked(pre_b);

      std::vector<std::size_t> only_b;
      for (std::size_t x : pre_b)
        if (count_b_[x] == counts_[s_rec_of_[x]]) only_b.push_back(x);
      split_marked(only_b);

      for (std::size_t y : b_elems) {
        for (std::size_t e : preds_[y]) {
          std::size_t x = edges_[e].first;
          --counts_[edge_rec_[e]];
          if (new_rec_[x] == kNone) {
            new_rec_[x] = counts_.size();
            counts_.push_back(count_b_[x]);
          }
          edge_rec_[e] = new_rec_[x];
        }
      }
      for (std::size_t x : pre_b) {
        count_b_[x] = 0;
        new_rec_[x] = kNone;
      }
    }
  }

  /// Block index per element, renumbered by first occurrence in 0..n-1.
  std::vector<std::size_t> canonical_blocks(std::size_t* count) const {
    std::vector<std::size_t> renum(blocks_.size(), kNone);
    std::vector<std::size_t> out(n_);
    std::size_t next = 0;
    for (std::size_t x = 0; x < n_; ++x) {
      std::size_t b = block_of_[x];
      if (renum[b] == kNone) renum[b] = next++;
      out[x] = renum[b];
    }
    *count = next;
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Block {
    std::size_t begin;
    std::size_t end;
    std::size_t marked;
    std::size_t xblock;
    std::size_t xpos;
  };

  std::size_t block_size(std::size_t b) const { return blocks_[b].end - blocks_[b].begin; }

  std::size_t new_block(std::size_t begin, std::size_t end, std::size_t xblock) {
    std::size_t id = blocks_.size();
    blocks_.push_back({begin, end, 0, kNone, 0});
    for (std::size_t k = begin; k < end; ++k) block_of_[elems_[k]] = id;
    add_to_xblock(id, xblock);
    return id;
  }

  void add_to_xblock(std::size_t b, std::size_t x) {
    blocks_[b].xblock = x;
    blocks_[b].xpos = xblocks_[x].size();
    xblocks_[x].push_back(b);
  }

  void remove_from_xblock(std::size_t b) {
    auto& list = xblocks_[blocks_[b].xblock];
    std::size_t p = blocks_[b].xpos;
    list[p] = list.back();
    blocks_[list[p]].xpos = p;
    list.pop_back();
  }

  // Splits every Q-block D into D ∩ xs and D − xs.
  void split_marked(const std::vector<std::size_t>& xs) {
    std::vector<std::size_t> touched;
    for (std::size_t x : xs) {
      if (marked_[x]) continue;
      marked_[x] = true;
      Block& blk = blocks_[block_of_[x]];
      if (blk.marked == 0) touched.push_back(block_of_[x]);
      std::size_t target = blk.begin + blk.marked++;
      std::size_t other = elems_[target];
      std::swap(elems_[target], elems_[pos_[x]]);
      pos_[other] = pos_[x];
      pos_[x] = target;
    }
    for (std::size_t b : touched) {
      std::size_t m = blocks_[b].marked;
      blocks_[b].marked = 0;
      if (m == block_size(b)) continue;
      std::size_t begin = blocks_[b].begin;
      blocks_[b].begin += m;
      std::size_t x = blocks_[b].xblock;
      new_block(begin, begin + m, x);
      if (xblocks_[x].size() == 2) compound_.push_back(x);
    }
    for (std::size_t x : xs) marked_[x] = false;
  }

  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::size_t> elems_;
  std::vector<std::size_t> block_of_;
  std::vector<std::size_t> pos_;
  std::vector<bool> marked_;
  std::vector<Block> blocks_;
  std::vector<std::vector<std::size_t>> xblocks_;
  std::vector<std::size_t> compound_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> edge_rec_;
  std::vector<std::size_t> count_b_;
  std::vector<std::size_t> new_rec_;
  std::vector<std::size_t> s_rec_of_ = std::vector<std::size_t>(n_, kNone);
};

bool valuation_agrees(const KripkeModel& g, std::size_t i, const KripkeModel& h, std::size_t j,
                      ValuationClause clause) {
  if (clause == ValuationClause::Strict) return g.valuation(i) == h.valuation(j);
  return g.valuation(i).empty() == h.valuation(j).empty();
}

}  // namespace

Bisimulation max_bisimulation(const TransitionSystem& g, const TransitionSystem& h,
                              ValuationClause clause) {
  const std::size_t ng = g.size();
  const std::size_t n = ng + h.size();
  std::vector<std::size_t> initial(n);
  if (clause == ValuationClause::Strict) {
    std::map<std::vector<AtomTag>, std::size_t> ids;
    for (std::size_t x = 0; x < n; ++x) {
      const auto& v = x < ng ? g.model().valuation(x) : h.model().valuation(x - ng);
      initial[x] = ids.emplace(v, ids.size()).first->second;
    }
  } else {
    for (std::size_t x = 0; x < n; ++x) {
      bool any = x < ng ? !g.model().valuation(x).empty() : !h.model().valuation(x - ng).empty();
      initial[x] = any ? 1 : 0;
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < ng; ++a)
    for (std::size_t b : g.successors(a)) edges.emplace_back(a, b);
  for (std::size_t a = 0; a < h.size(); ++a)
    for (std::size_t b : h.successors(a)) edges.emplace_back(ng + a, ng + b);

  Refiner r(n, std::move(edges), initial);
  r.run();
  std::size_t count = 0;
  std::vector<std::size_t> blocks = r.canonical_blocks(&count);
  std::vector<std::size_t> bg(blocks.begin(), blocks.begin() + static_cast<std::ptrdiff_t>(ng));
  std::vector<std::size_t> bh(blocks.begin() + static_cast<std::ptrdiff_t>(ng), blocks.end());
  return Bisimulation(std::move(bg), std::move(bh), count);
}

BisimulationReport verify_bijective_bisimulation(const TransitionSystem& g, const TransitionSystem& h,
                                                 const std::vector<std::size_t>& pairing,
                                                 ValuationClause clause) {
  if (g.size() != h.size())
    throw Error("bisimulation check needs equal world counts, got " + std::to_string(g.size()) +
                " and " + std::to_string(h.size()));
  if (pairing.size() != g.size()) throw Error("pairing is not total");
  std::vector<std::size_t> inverse(h.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < pairing.size(); ++i) {
    std::size_t j = pairing[i];
    if (j >= h.size()) throw Error("pairing refers to an undeclared world");
    if (inverse[j] != static_cast<std::size_t>(-1)) throw Error("pairing is not injective");
    inverse[j] = i;
  }

  const KripkeModel& gm = g.model();
  const KripkeModel& hm = h.model();
  BisimulationReport report;
  for (std::size_t i = 0; i < pairing.size(); ++i) {
    const std::size_t j = pairing[i];
    report.pairs.emplace_back(i, j);
    if (!valuation_agrees(gm, i, hm, j, clause))
      report.violations.push_back({i, j, 'a', "valuations disagree"});
    for (std::size_t i2 : g.successors(i))
      if (!h.has_edge(j, pairing[i2]))
        report.violations.push_back(
            {i, j, 'b', gm.world(i) + " -> " + gm.world(i2) + " has no matching transition"});
    for (std::size_t j2 : h.successors(j))
      if (!g.has_edge(i, inverse[j2]))
        report.violations.push_back(
            {i, j, 'c', hm.world(j) + " -> " + hm.world(j2) + " has no matching transition"});
  }
  report.ok = report.violations.empty();
  return report;
}

SigmaModel build_sigma(const StageModel& m) {
  const KripkeModel& u = m.kripke;
  std::vector<WorldId> worlds;
  std::vector<std::vector<AtomTag>> valuation;
  worlds.reserve(u.size());
  valuation.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    worlds.push_back(u.world(i) + "'");
    valuation.push_back(u.valuation(i));
  }
  std::vector<KripkeModel::Edge> plus = u.access();
  std::vector<KripkeModel::Edge> minus;
  for (const auto& [a, b] : plus)
    if (a != b) minus.emplace_back(b, a);
  std::sort(minus.begin(), minus.end());
  std::vector<KripkeModel::Edge> all = plus;
  all.insert(all.end(), minus.begin(), minus.end());

  std::vector<std::size_t> pairing(u.size());
  for (std::size_t i = 0; i < pairing.size(); ++i) pairing[i] = i;
  return SigmaModel{KripkeModel::build_indexed(std::move(worlds), std::move(all), std::move(valuation)),
                    std::move(plus), std::move(minus), std::move(pairing)};
}

bool is_proximity_relation(const KripkeModel& m) {
  for (std::size_t w = 0; w < m.size(); ++w)
    if (!m.has_edge(w, w)) return false;
  for (const auto& [a, b] : m.access())
    if (!m.has_edge(b, a)) return false;
  return true;
}

}  // namespace qunfold
