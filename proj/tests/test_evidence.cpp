#include "doctest.h"

#include <cmath>
#include <random>

#include "qunfold/error.hpp"
#include "qunfold/evidence.hpp"
#include "qunfold/kripke.hpp"
#include "qunfold/proximity.hpp"

using namespace qunfold;

namespace {

// Subset-sum belief straight from the mass map.
double bel_sum(const BPA& b, const Subset& a) {
  double s = 0.0;
  for (const auto& [set, m] : b.masses())
    if (std::includes(a.begin(), a.end(), set.begin(), set.end())) s += m;
  return s;
}

Subset complement(const Subset& a, std::size_t n) {
  Subset c;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(a.begin(), a.end(), i)) c.push_back(i);
  return c;
}

Subset bits(std::size_t mask, std::size_t n) {
  Subset s;
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1) s.push_back(i);
  return s;
}

KripkeModel worked_model() {
  return KripkeModel::build({"w1", "w2"}, {{"w1", "w1"}, {"w1", "w2"}, {"w2", "w2"}},
                            {{"w1", {"x1"}}, {"w2", {"x2"}}}, std::map<WorldId, double>{{"w1", 0.6}, {"w2", 0.4}});
}

ProximitySpace path(std::size_t n) {
  std::vector<std::string> c;
  std::vector<std::pair<std::size_t, std::size_t>> p;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(std::to_string(i + 1));
    if (i) p.emplace_back(i - 1, i);
  }
  return ProximitySpace::build_indexed(c, p);
}

}  // namespace

TEST_CASE("bel and pl on a two-element frame") {
  auto b = BPA::build({"x1", "x2"}, {{{"x2"}, 0.4}, {{"x1", "x2"}, 0.6}});
  CHECK(bel(b, {}) == 0.0);
  CHECK(bel(b, {0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bel(b, {0}) == 0.0);
  CHECK(bel(b, {1}) == 0.4);
  CHECK(pl(b, {0}) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(pl(b, {0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t m = 0; m < 4; ++m) CHECK(pl(b, bits(m, 2)) >= bel(b, bits(m, 2)));
  CHECK_THROWS_AS(bel(b, {2}), Error);
}

TEST_CASE("BPA validation") {
  CHECK_THROWS_AS(BPA::build({"a"}, {{{"a"}, 0.5}}), Error);
  CHECK_THROWS_AS(BPA::build({"a"}, {{{}, 1.0}}), Error);
  CHECK_THROWS_AS(BPA::build({"a", "b"}, {{{"a"}, 1.5}, {{"b"}, -0.5}}), Error);
  CHECK_THROWS_AS(BPA::build({"a"}, {{{"z"}, 1.0}}), Error);
}

TEST_CASE("super-additivity and Pl sub-additivity on random BPAs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 1; n <= 5; ++n)
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::string> frame;
      for (std::size_t i = 0; i < n; ++i) frame.push_back("x" + std::to_string(i));
      std::map<Subset, double> masses;
      double total = 0.0;
      for (std::size_t m = 1; m < (std::size_t{1} << n); ++m)
        if (u(rng) < 0.4) total += masses[bits(m, n)] = u(rng);
      if (masses.empty()) total += masses[bits((std::size_t{1} << n) - 1, n)] = 1.0;
      for (auto& [s, m] : masses) m /= total;
      auto b = BPA::build_indexed(frame, masses);
      auto table = bel_table(b);
      const std::size_t full = (std::size_t{1} << n) - 1;
      for (std::size_t x = 0; x <= full; ++x) {
        REQUIRE(std::abs(table[x] - bel_sum(b, bits(x, n))) <= 1e-12);
        REQUIRE(std::abs(bel(b, bits(x, n)) - table[x]) <= 1e-12);
        for (std::size_t y = 0; y <= full; ++y) {
          const double bu = table[x | y], bi = table[x & y];
          REQUIRE(bu >= table[x] + table[y] - bi - 1e-12);
          const double pu = 1.0 - table[full & ~(x | y)], pi = 1.0 - table[full & ~(x & y)];
          REQUIRE(pu <= (1.0 - table[full & ~x]) + (1.0 - table[full & ~y]) - pi + 1e-12);
        }
      }
    }
}

TEST_CASE("bpa_from_model on the worked two-world model") {
  auto m = worked_model();
  const std::vector<AtomTag> frame{"x1", "x2"};
  auto b = bpa_from_model(m, frame);
  CHECK(b.mass({0, 1}) == 0.6);
  CHECK(b.mass({1}) == 0.4);
  CHECK(b.mass({0}) == 0.0);
  const std::vector<AtomTag> a1{"x1"}, all{"x1", "x2"};
  CHECK(bel_modal(m, frame, a1) == 0.0);
  CHECK(pl_modal(m, frame, a1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(bel_modal(m, frame, all) == doctest::Approx(1.0).epsilon(1e-15));
  ModalEvidence me(m, frame);
  for (std::size_t x = 0; x < 4; ++x) {
    auto s = bits(x, 2);
    CHECK(std::abs(me.bel(s) - bel(b, s)) <= 1e-12);
    CHECK(std::abs(me.pl(s) - pl(b, s)) <= 1e-12);
    CHECK(std::abs(me.pl(s) - (1.0 - me.bel(complement(s, 2)))) <= 1e-12);
    CHECK(std::abs(me.mass(s) - b.mass(s)) <= 1e-12);
  }
}

TEST_CASE("self-loop models give point masses") {
  auto m = KripkeModel::build({"a", "b", "c"}, {{"a", "a"}, {"b", "b"}, {"c", "c"}},
                              {{"a", {"x"}}, {"b", {"y"}}, {"c", {"z"}}},
                              std::map<WorldId, double>{{"a", 0.2}, {"b", 0.3}, {"c", 0.5}});
  const std::vector<AtomTag> frame{"x", "y", "z"};
  auto b = bpa_from_model(m, frame);
  CHECK(b.mass({0}) == 0.2);
  CHECK(b.mass({1}) == 0.3);
  CHECK(b.mass({2}) == 0.5);
  CHECK(b.masses().size() == 3);
}

TEST_CASE("modal evidence preconditions") {
  const std::vector<AtomTag> frame{"x1", "x2"};
  auto unweighted = KripkeModel::build({"w1", "w2"}, {{"w1", "w1"}, {"w2", "w2"}}, {{"w1", {"x1"}}, {"w2", {"x2"}}});
  CHECK_THROWS_AS(bpa_from_model(unweighted, frame), Error);
  auto dead = KripkeModel::build({"w1", "w2"}, {{"w1", "w1"}}, {{"w1", {"x1"}}, {"w2", {"x2"}}},
                                 std::map<WorldId, double>{{"w1", 0.5}, {"w2", 0.5}});
  CHECK_THROWS_AS(bpa_from_model(dead, frame), Error);
  auto non_sva = KripkeModel::build({"w1", "w2"}, {{"w1", "w1"}, {"w2", "w2"}}, {{"w1", {"x1", "x2"}}, {"w2", {"x2"}}},
                                    std::map<WorldId, double>{{"w1", 0.5}, {"w2", 0.5}});
  CHECK_THROWS_AS(bpa_from_model(non_sva, frame), Error);
}

TEST_CASE("born weights") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 1);
  auto w = born_weights(e1, id);
  CHECK(w == std::vector<double>{0.0, 1.0, 0.0});
  Eigen::VectorXd half(2);
  half << std::sqrt(0.5), std::sqrt(0.5);
  auto h = born_weights(half, Eigen::MatrixXd::Identity(2, 2));
  CHECK(h[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx(0.5).epsilon(1e-15));
  // zero padding into a larger space
  Eigen::MatrixXd rot(3, 3);
  const double c = std::sqrt(0.5);
  rot << c, c, 0, c, -c, 0, 0, 0, 1;
  auto p = born_weights(half, rot);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p[1]) <= 1e-15);
  CHECK(p[2] == 0.0);
  Eigen::VectorXd longer = Eigen::VectorXd::Unit(4, 0);
  CHECK_THROWS_AS(born_weights(longer, id), Error);
  CHECK_THROWS_AS(born_weights(2.0 * e1, id), Error);
  CHECK_THROWS_AS(born_weights(e1, 2.0 * id), Error);
}

TEST_CASE("generalized Born rule") {
  auto discrete = ProximitySpace::build({"a", "b", "c"}, {});
  const std::vector<double> w{0.2, 0.3, 0.5};
  for (std::size_t i = 0; i < 3; ++i) CHECK(generalized_born(discrete, w, i) == w[i]);
  CHECK(generalized_born(path(3), w, 0) == doctest::Approx(1.0).epsilon(1e-15));
  auto star = ProximitySpace::build({"c", "x", "y"}, {{"c", "x"}, {"c", "y"}});
  const std::vector<double> ws{0.5, 0.25, 0.25};
  CHECK(generalized_born(star, ws, 1) == 1.0);
  const std::vector<double> w4{0.1, 0.2, 0.3, 0.4};
  CHECK(generalized_born(path(4), w4, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(quanta_cover(path(4), 0) == path(4).make_set(std::vector<std::string>{"1", "2", "3"}));
  CHECK_THROWS_AS(generalized_born(path(4), w4, 4), Error);

  // P* is Bel(Q) for the point-mass BPA
  auto b = BPA::build({"1", "2", "3", "4"}, {{{"1"}, 0.1}, {{"2"}, 0.2}, {{"3"}, 0.3}, {{"4"}, 0.4}});
  CHECK(std::abs(generalized_born(path(4), w4, 0) - bel(b, {0, 1, 2})) <= 1e-15);
}

TEST_CASE("enlarging the proximity relation never decreases P*") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 7;
    std::vector<std::string> c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(std::to_string(i));
    std::vector<std::pair<std::size_t, std::size_t>> small, big;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double r = u(rng);
        if (r < 0.2) small.emplace_back(i, j);
        if (r < 0.5) big.emplace_back(i, j);
      }
    std::vector<double> w(n);
    double t = 0.0;
    for (auto& x : w) t += x = u(rng);
    for (auto& x : w) x /= t;
    auto s = ProximitySpace::build_indexed(c, small), l = ProximitySpace::build_indexed(c, big);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(generalized_born(s, w, i) <= generalized_born(l, w, i) + 1e-15);
  }
}

TEST_CASE("Bayes posterior") {
  const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
  const std::vector<double> exact{0.0, 1.0, 0.0, 0.0};
  CHECK(bayes_posterior(uniform, exact, 1) == 1.0);
  CHECK(bayes_posterior(uniform, exact, 0) == 0.0);
  const std::vector<double> l{0.1, 0.2, 0.3, 0.4};
  for (std::size_t t = 0; t < 4; ++t) {
    double others = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      if (i != t) others += l[i];
    const double want = l[t] * 0.25 / (l[t] * 0.25 + 0.75 * others);
    CHECK(std::abs(bayes_posterior(uniform, l, t) - want) <= 1e-15);
  }
  const std::vector<double> zero{0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(bayes_posterior(uniform, zero, 0), Error);
}

TEST_CASE("likelihoods are sub-normalized when the state leaves the old subspace") {
  Eigen::MatrixXd old = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd next(3);
  next << 0.6, 0.0, 0.8;
  auto l = transition_likelihoods(next, old);
  CHECK(l[0] == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(l[1] == 0.0);
  CHECK(l[0] + l[1] < 1.0 - 1e-12);
  Eigen::VectorXd inside(3);
  inside << 0.6, 0.8, 0.0;
  auto e = transition_likelihoods(inside, old);
  CHECK(std::abs(e[0] + e[1] - 1.0) <= 1e-15);
}

TEST_CASE("belief posterior") {
  auto discrete = ProximitySpace::build({"a", "b", "c"}, {});
  const std::vector<double> post{0.2, 0.3, 0.1};
  for (std::size_t i = 0; i < 3; ++i) CHECK(belief_posterior(discrete, post, i) == post[i]);
  const std::vector<double> p4{0.1, 0.2, 0.3, 0.1};
  CHECK(belief_posterior(path(4), p4, 0) == doctest::Approx(0.6).epsilon(1e-15));
  auto complete = ProximitySpace::build({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}});
  CHECK(belief_posterior(complete, post, 2) == doctest::Approx(0.6).epsilon(1e-15));
}
