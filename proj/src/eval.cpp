#include "qunfold/eval.hpp"

#include "qunfold/error.hpp"

namespace qunfold {

Evaluator::Evaluator(const KripkeModel& model, std::span<const AtomTag> extra_atoms)
    : model_(model), extra_(extra_atoms.begin(), extra_atoms.end()) {}

bool Evaluator::eval(std::string_view world, Formula f) {
  return eval(model_.index_of(world), f);
}

bool Evaluator::eval(std::size_t world, Formula f) {
  if (world >= model_.size()) throw Error("unknown world index " + std::to_string(world));
  check_atoms(f);
  return eval_memo(world, f);
}

bool Evaluator::eval_memo(std::size_t world, Formula f) {
  const std::uint64_t key = f.id() * model_.size() + world;
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  bool value = eval_uncached(world, f);
  memo_.emplace(key, value);
  return value;
}

void Evaluator::check_atoms(Formula f) {
  if (!checked_.insert(f.id()).second) return;
  if (f.kind() == FormulaKind::Atom) {
    if (!model_.vocabulary().contains(f.tag()) && !extra_.contains(f.tag())) {
      checked_.erase(f.id());
      throw Error("unknown atom tag '" + f.tag() + "'");
    }
    return;
  }
  for (Formula m : f.operands()) check_atoms(m);
}

bool Evaluator::eval_uncached(std::size_t world, Formula f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      return model_.validates(world, f.tag());
    case FormulaKind::Not:
      return !eval_memo(world, f.operand());
    case FormulaKind::Conj:
      for (Formula m : f.operands())
        if (!eval_memo(world, m)) return false;
      return true;
    case FormulaKind::Disj:
      for (Formula m : f.operands())
        if (eval_memo(world, m)) return true;
      return false;
    case FormulaKind::Box:
      for (std::size_t s : model_.successors(world))
        if (!eval_memo(s, f.operand())) return false;
      return true;
    case FormulaKind::Diamond:
      for (std::size_t s : model_.successors(world))
        if (eval_memo(s, f.operand())) return true;
      return false;
  }
  return false;
}

bool eval(const KripkeModel& m, std::string_view world, Formula f) {
  Evaluator ev(m);
  return ev.eval(world, f);
}

}  // namespace qunfold
