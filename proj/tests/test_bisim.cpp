#include "doctest.h"

#include <random>
#include <set>

#include "corpus.hpp"
#include "qunfold/bisim.hpp"
#include "qunfold/error.hpp"

using namespace qunfold;

namespace {

// Greatest bisimulation by iterated pair deletion.
std::vector<std::vector<bool>> naive_bisim(const TransitionSystem& g, const TransitionSystem& h,
                                           ValuationClause clause) {
  const std::size_t n = g.size(), m = h.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(m));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) {
      const auto& vx = g.model().valuation(x);
      const auto& vy = h.model().valuation(y);
      r[x][y] = clause == ValuationClause::Strict ? (std::set(vx.begin(), vx.end()) == std::set(vy.begin(), vy.end()))
                                                  : (vx.empty() == vy.empty());
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < m; ++y) {
        if (!r[x][y]) continue;
        bool ok = true;
        for (std::size_t xs : g.successors(x)) {
          bool found = false;
          for (std::size_t ys : h.successors(y)) found = found || r[xs][ys];
          ok = ok && found;
        }
        for (std::size_t ys : h.successors(y)) {
          bool found = false;
          for (std::size_t xs : g.successors(x)) found = found || r[xs][ys];
          ok = ok && found;
        }
        if (!ok) {
          r[x][y] = false;
          changed = true;
        }
      }
  }
  return r;
}

KripkeModel random_model(std::mt19937_64& rng, std::size_t n, double p_edge, std::size_t tags, const char* prefix) {
  std::bernoulli_distribution edge(p_edge);
  std::uniform_int_distribution<std::size_t> tag(0, tags);
  std::vector<WorldId> worlds;
  std::vector<KripkeModel::Edge> edges;
  std::vector<std::vector<AtomTag>> val(n);
  for (std::size_t i = 0; i < n; ++i) {
    worlds.push_back(prefix + std::to_string(i));
    std::size_t t = tag(rng);
    if (t < tags) val[i].push_back("t" + std::to_string(t));
    for (std::size_t j = 0; j < n; ++j)
      if (edge(rng)) edges.emplace_back(i, j);
  }
  return KripkeModel::build_indexed(worlds, edges, val);
}

}  // namespace

TEST_CASE("a model is bisimilar to itself through the identity") {
  auto m = unfold(corpus::seed("fig1"), 3);
  TransitionSystem t(m.kripke);
  auto b = max_bisimulation(t, t);
  for (std::size_t w = 0; w < m.kripke.size(); ++w) CHECK(b.related(w, w));
}

TEST_CASE("two looped singletons") {
  auto a = KripkeModel::build({"x"}, {{"x", "x"}}, {});
  auto b = KripkeModel::build({"y"}, {{"y", "y"}}, {});
  auto r = max_bisimulation(TransitionSystem(a), TransitionSystem(b));
  CHECK(r.pairs() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});
}

TEST_CASE("von Neumann three: leaves of different branches are bisimilar") {
  auto m = unfold(corpus::seed("vn3"), 3);
  auto mem = m.membership_model();
  TransitionSystem t(mem);
  auto b = max_bisimulation(t, t);
  auto at = [&](const char* k) { return mem.index_of(k); };
  CHECK(b.related(at("*/1/0"), at("*/2/0")));
  CHECK(b.related(at("*/0"), at("*/2/0")));
  CHECK(b.related(at("*/1"), at("*/2/1")));
  CHECK_FALSE(b.related(at("*/1/0"), at("*/1")));
  CHECK_FALSE(b.related(at("*"), at("*/2")));

  TransitionSystem full(m.kripke);
  CHECK(max_bisimulation(full, full).related(m.kripke.index_of("*/1/0"), m.kripke.index_of("*/2/0")));
  auto strict = max_bisimulation(full, full, ValuationClause::Strict);
  CHECK_FALSE(strict.related(m.kripke.index_of("*/1/0"), m.kripke.index_of("*/2/0")));
}

TEST_CASE("partition refinement equals the naive greatest fixpoint") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    auto g = random_model(rng, 1 + trial % 7, 0.3, 2, "g");
    auto h = random_model(rng, 1 + (trial / 7) % 6, 0.3, 2, "h");
    for (auto clause : {ValuationClause::Literal, ValuationClause::Strict}) {
      TransitionSystem tg(g), th(h);
      auto fast = max_bisimulation(tg, th, clause);
      auto slow = naive_bisim(tg, th, clause);
      for (std::size_t x = 0; x < g.size(); ++x)
        for (std::size_t y = 0; y < h.size(); ++y) REQUIRE(fast.related(x, y) == slow[x][y]);
    }
  }
}

TEST_CASE("refinement output is stable under one more refinement step") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_model(rng, 12, 0.2, 1, "g");
    TransitionSystem t(g);
    auto b = max_bisimulation(t, t);
    for (auto [x, y] : b.pairs())
      for (std::size_t xs : t.successors(x)) {
        bool found = false;
        for (std::size_t ys : t.successors(y)) found = found || b.related(xs, ys);
        REQUIRE(found);
      }
  }
}

TEST_CASE("verify reports violations of a non-bisimilar pairing") {
  auto chain = KripkeModel::build({"0", "1", "2"}, {{"0", "1"}, {"1", "2"}}, {});
  auto fork = KripkeModel::build({"0", "1", "2"}, {{"0", "1"}, {"0", "2"}}, {});
  auto r = verify_bijective_bisimulation(TransitionSystem(chain), TransitionSystem(fork), {0, 1, 2});
  CHECK_FALSE(r.ok);
  bool has_b = false, has_c = false;
  for (const auto& v : r.violations) {
    has_b = has_b || v.clause == 'b';
    has_c = has_c || v.clause == 'c';
  }
  CHECK(has_b);
  CHECK(has_c);

  auto copy = verify_bijective_bisimulation(TransitionSystem(chain), TransitionSystem(chain), {0, 1, 2});
  CHECK(copy.ok);
  CHECK(copy.violations.empty());

  auto swapped = verify_bijective_bisimulation(TransitionSystem(chain), TransitionSystem(chain), {0, 2, 1});
  CHECK_FALSE(swapped.ok);

  CHECK_THROWS_AS(verify_bijective_bisimulation(TransitionSystem(chain), TransitionSystem(fork), {0, 0, 2}), Error);
  auto small = KripkeModel::build({"0"}, {}, {});
  CHECK_THROWS_AS(verify_bijective_bisimulation(TransitionSystem(chain), TransitionSystem(small), {0}), Error);
}

TEST_CASE("build_sigma on small stages") {
  auto one = build_sigma(unfold(corpus::seed("empty_root"), 0));
  CHECK(one.kripke.access() == std::vector<KripkeModel::Edge>{{0, 0}});

  auto two = build_sigma(unfold(corpus::seed("single_atom"), 1));
  std::set<KripkeModel::Edge> acc(two.kripke.access().begin(), two.kripke.access().end());
  CHECK(acc == std::set<KripkeModel::Edge>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(two.kripke.world(1) == "*/0'");
}

TEST_CASE("fig1 seed: plus mirrors R_U, minus inverts it, loops everywhere") {
  auto m = unfold(corpus::seed("fig1"), 3);
  auto s = build_sigma(m);
  std::set<KripkeModel::Edge> plus(s.plus.begin(), s.plus.end());
  std::set<KripkeModel::Edge> ru(m.kripke.access().begin(), m.kripke.access().end());
  CHECK(plus == ru);
  for (auto [a, b] : s.minus) {
    CHECK(a != b);
    CHECK(ru.count({b, a}) == 1);
  }
  CHECK(s.minus.size() == 7);
  auto r = verify_bijective_bisimulation(TransitionSystem(m.kripke), s.plus_system(), s.pairing);
  CHECK(r.ok);
}

TEST_CASE("corpus: sigma is a proximity relation and the pairing verifies") {
  for (const auto& [name, seed] : corpus::all())
    for (std::size_t a = 0; a <= 6; ++a) {
      INFO(name << " alpha " << a);
      auto m = unfold(seed, a);
      auto s = build_sigma(m);
      CHECK(is_proximity_relation(s.kripke));
      std::set<KripkeModel::Edge> all(s.plus.begin(), s.plus.end());
      all.insert(s.minus.begin(), s.minus.end());
      std::set<KripkeModel::Edge> acc(s.kripke.access().begin(), s.kripke.access().end());
      CHECK(all == acc);
      for (auto [x, y] : acc) CHECK(acc.count({y, x}) == 1);
      for (auto clause : {ValuationClause::Literal, ValuationClause::Strict})
        CHECK(verify_bijective_bisimulation(TransitionSystem(m.kripke), s.plus_system(), s.pairing, clause).ok);
    }
}
