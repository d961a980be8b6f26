// Modal-logic formulas over the finite fragment: atoms, negation, finite
// conjunction/disjunction sets, necessity and possibility.
//
// Formulas are hash-consed: structurally equal formulas share one node, so
// equality is a pointer comparison and a formula DAG such as an unfolding
// label (which reuses every label of the previous stage) is stored once.
//
// Canonical form applied by the constructors:
//   - conjunction/disjunction members are deduplicated and sorted by the
//     canonical order (see compare());
//   - a one-member conjunction/disjunction is its member;
//   - the empty conjunction is Top; the empty disjunction is ~Top.
//
// Text grammar (ASCII, whitespace between tokens ignored):
//
//   F ::= atom:<id> | T | ~F | /\{F,...} | \/{F,...} | []F | <>F | (F)
//
// with U+25A1 (□) and U+25C7 (◇) accepted in place of [] and <>.
// render() never emits T or parentheses; Top prints as /\{}.

#ifndef QUNFOLD_FORMULA_HPP
#define QUNFOLD_FORMULA_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qunfold {

namespace detail {
struct FormulaNode;
}

/// Node kinds, declared in canonical order rank.
enum class FormulaKind : std::uint8_t { Conj, Diamond, Box, Disj, Atom, Not };

class Formula {
 public:
  /// Top (the empty conjunction).
  Formula();

  static Formula atom(std::string_view tag);
  static Formula top();
  static Formula bottom();  // ~Top, also the empty disjunction
  static Formula negation(Formula f);
  static Formula conj(std::vector<Formula> members);
  static Formula disj(std::vector<Formula> members);
  static Formula box(Formula f);
  static Formula diamond(Formula f);

  FormulaKind kind() const noexcept;
  bool is_top() const noexcept;

  /// Atom tag; empty for other kinds.
  const std::string& tag() const noexcept;
  /// Members of a conjunction/disjunction, or the single operand of
  /// ~, [] and <>. Empty for atoms and Top.
  std::span<const Formula> operands() const noexcept;
  Formula operand() const;

  /// Structural hash; identical across runs and platforms.
  std::uint64_t hash() const noexcept;
  /// Modal/boolean nesting depth (atoms and Top have depth 0).
  std::size_t depth() const noexcept;
  /// Length of render(*this), saturating at SIZE_MAX.
  std::size_t text_size() const noexcept;
  /// Address-free identity for memo keys; unique per interned node.
  std::uint64_t id() const noexcept;

  friend bool operator==(Formula a, Formula b) noexcept { return a.node_ == b.node_; }
  friend std::strong_ordering operator<=>(Formula a, Formula b) noexcept;

 private:
  explicit Formula(const detail::FormulaNode* node) : node_(node) {}
  friend struct detail::FormulaNode;
  friend class FormulaStore;

  const detail::FormulaNode* node_;
};

/// Three-way canonical comparison: kind rank first, then atom tag, then
/// operands lexicographically (shorter member lists first on a tie).
int compare(Formula a, Formula b) noexcept;

/// Parses the text grammar. Throws ParseError with the byte offset.
Formula parse(std::string_view text);

/// Canonical text; parse(render(f)) == f.
std::string render(Formula f);

/// △Φ = ⋀◇Φ ∧ □⋁Φ.
Formula triangle(std::span<const Formula> members);

/// Number of interned nodes; for diagnostics.
std::size_t interned_formula_count();

/// Atom tags must be non-empty and avoid whitespace and the grammar's
/// delimiters , { } ( ) [ ] < > ~ and backslash.
bool is_valid_atom_tag(std::string_view tag) noexcept;

}  // namespace qunfold

template <>
struct std::hash<qunfold::Formula> {
  std::size_t operator()(qunfold::Formula f) const noexcept {
    return static_cast<std::size_t>(f.hash());
  }
};

#endif
