#include "doctest.h"

#include "qunfold/error.hpp"
#include "qunfold/eval.hpp"
#include "qunfold/io.hpp"
#include "qunfold/kripke.hpp"

using namespace qunfold;

TEST_CASE("model validation") {
  CHECK_NOTHROW(KripkeModel::build({"w"}, {}, {}));
  CHECK_THROWS_AS(KripkeModel::build({"w1"}, {{"w1", "w2"}}, {}), Error);
  CHECK_THROWS_AS(KripkeModel::build({"w", "w"}, {}, {}), Error);
  CHECK_THROWS_AS(KripkeModel::build({"w1", "w2"}, {}, {}, std::map<WorldId, double>{{"w1", 0.6}, {"w2", 0.5}}),
                  Error);
  CHECK_THROWS_AS(KripkeModel::build({"w1", "w2"}, {}, {}, std::map<WorldId, double>{{"w1", 1.2}, {"w2", -0.2}}),
                  Error);
  auto m = KripkeModel::build({"w1", "w2"}, {}, {}, std::map<WorldId, double>{{"w1", 0.25}, {"w2", 0.75}});
  CHECK(m.weight(1) == 0.75);
}

TEST_CASE("check_sva") {
  const std::vector<AtomTag> frame{"p1", "p2"};
  auto ok = KripkeModel::build({"w1", "w2"}, {}, {{"w1", {"p1"}}, {"w2", {"p2"}}});
  auto both = KripkeModel::build({"w1", "w2"}, {}, {{"w1", {"p1", "p2"}}, {"w2", {"p2"}}});
  auto none = KripkeModel::build({"w1", "w2"}, {}, {{"w2", {"p2"}}});
  CHECK(check_sva(ok, frame));
  CHECK_FALSE(check_sva(both, frame));
  CHECK_FALSE(check_sva(none, frame));
  CHECK(sva_label(ok, 1, frame) == 1);
}

TEST_CASE("subset_formula") {
  const std::vector<AtomTag> frame{"x1", "x2"};
  const std::vector<AtomTag> one{"x1"}, all{"x1", "x2"}, empty{}, stray{"x9"};
  CHECK(subset_formula(one, frame) == Formula::atom("x1"));
  CHECK(subset_formula(empty, frame) ==
        Formula::conj({Formula::negation(Formula::atom("x1")), Formula::negation(Formula::atom("x2"))}));
  CHECK(subset_formula(all, frame) == Formula::disj({Formula::atom("x1"), Formula::atom("x2")}));
  CHECK_THROWS_AS(subset_formula(stray, frame), Error);
}

TEST_CASE("is_serial") {
  CHECK(is_serial(KripkeModel::build({"a", "b"}, {{"a", "a"}, {"b", "b"}}, {})));
  CHECK_FALSE(is_serial(KripkeModel::build({"a"}, {}, {})));
  CHECK(is_serial(KripkeModel::build({"w1", "w2"}, {{"w1", "w2"}, {"w2", "w2"}}, {})));
}

TEST_CASE("SVA worlds validate exactly one frame tag") {
  const std::vector<AtomTag> frame{"a", "b", "c"};
  auto m = KripkeModel::build({"u", "v", "w", "x"}, {{"u", "v"}},
                              {{"u", {"a"}}, {"v", {"c"}}, {"w", {"b"}}, {"x", {"a", "other"}}});
  REQUIRE(check_sva(m, frame));
  Evaluator ev(m, frame);
  for (std::size_t w = 0; w < m.size(); ++w) {
    int count = 0;
    for (const auto& x : frame) count += ev.eval(w, Formula::atom(x));
    CHECK(count == 1);
  }
}

TEST_CASE("world order survives a JSON round trip") {
  auto m = KripkeModel::build({"z", "a", "m"}, {{"z", "a"}, {"m", "m"}}, {{"a", {"p"}}},
                              std::map<WorldId, double>{{"z", 0.5}, {"a", 0.25}, {"m", 0.25}});
  auto back = io::model_from_json(io::parse_json(io::dump(io::model_to_json(m)), "t"));
  CHECK(back.worlds() == m.worlds());
  CHECK(back.access() == m.access());
  CHECK(back.weights() == m.weights());
  CHECK(back.valuation(1) == m.valuation(1));
}
