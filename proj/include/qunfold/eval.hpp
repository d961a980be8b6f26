#ifndef QUNFOLD_EVAL_HPP
#define QUNFOLD_EVAL_HPP

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "qunfold/formula.hpp"
#include "qunfold/kripke.hpp"

namespace qunfold {

/// Kripke-semantics evaluator with a (world, formula) memo.
///
/// Box holds iff every successor satisfies the operand, Diamond iff some
/// successor does. The memo lives as long as the evaluator, so reuse one
/// instance when evaluating many formulas over the same model.
///
/// Atom tags must occur in the model's vocabulary or in `extra_atoms`;
/// anything else throws Error.
class Evaluator {
 public:
  explicit Evaluator(const KripkeModel& model, std::span<const AtomTag> extra_atoms = {});

  bool eval(std::size_t world, Formula f);
  bool eval(std::string_view world, Formula f);

 private:
  bool eval_memo(std::size_t world, Formula f);
  bool eval_uncached(std::size_t world, Formula f);
  void check_atoms(Formula f);

  const KripkeModel& model_;
  std::set<AtomTag, std::less<>> extra_;
  std::unordered_map<std::uint64_t, bool> memo_;
  std::unordered_set<std::uint64_t> checked_;
};

/// One-shot evaluation; throws Error on an unknown world or atom tag.
bool eval(const KripkeModel& m, std::string_view world, Formula f);

}  // namespace qunfold

#endif
