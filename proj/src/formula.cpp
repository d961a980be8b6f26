#include "qunfold/formula.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <mutex>
#include <unordered_map>

#include "qunfold/error.hpp"

namespace qunfold {

namespace detail {

struct FormulaNode {
  FormulaKind kind;
  std::string tag;
  std::vector<Formula> children;
  std::uint64_t hash;
  std::uint64_t id;
  std::size_t depth;
  std::size_t text_size;
};

}  // namespace detail

namespace {

constexpr std::size_t kSizeMax = std::numeric_limits<std::size_t>::max();

std::size_t sat_add(std::size_t a, std::size_t b) {
  return a > kSizeMax - b ? kSizeMax : a + b;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running combination
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

class FormulaStore {
 public:
  static FormulaStore& instance() {
    static FormulaStore store;
    return store;
  }

  Formula intern(FormulaKind kind, std::string tag, std::vector<Formula> children) {
    std::uint64_t h = mix(0x51ed270b27c7d6a1ULL, static_cast<std::uint64_t>(kind));
    h = mix(h, fnv1a(tag));
    for (Formula c : children) h = mix(h, c.hash());

    std::lock_guard<std::mutex> lock(mu_);
    auto [lo, hi] = index_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      const detail::FormulaNode* n = it->second;
      if (n->kind == kind && n->tag == tag && n->children == children) return Formula(n);
    }

    std::size_t depth = 0;
    std::size_t size = 0;
    switch (kind) {
      case FormulaKind::Atom:
        size = 5 + tag.size();
        break;
      case FormulaKind::Not:
        depth = children[0].depth() + 1;
        size = sat_add(1, children[0].text_size());
        break;
      case FormulaKind::Box:
      case FormulaKind::Diamond:
        depth = children[0].depth() + 1;
        size = sat_add(2, children[0].text_size());
        break;
      case FormulaKind::Conj:
      case FormulaKind::Disj:
        size = 4 + (children.empty() ? 0 : children.size() - 1);
        for (Formula c : children) {
          depth = std::max(depth, c.depth() + 1);
          size = sat_add(size, c.text_size());
        }
        break;
    }

    nodes_.push_back(detail::FormulaNode{kind, std::move(tag), std::move(children), h,
                                         static_cast<std::uint64_t>(nodes_.size()), depth,
                                         size});
    const detail::FormulaNode* n = &nodes_.back();
    index_.emplace(h, n);
    return Formula(n);
  }

  std::size_t size() {
    std::lock_guard<std::mutex> lock(mu_);
    return nodes_.size();
  }

 private:
  std::mutex mu_;
  std::deque<detail::FormulaNode> nodes_;
  std::unordered_multimap<std::uint64_t, const detail::FormulaNode*> index_;
};

Formula::Formula() : Formula(top()) {}

Formula Formula::atom(std::string_view tag) {
  if (!is_valid_atom_tag(tag)) throw Error("invalid atom tag '" + std::string(tag) + "'");
  return FormulaStore::instance().intern(FormulaKind::Atom, std::string(tag), {});
}

Formula Formula::top() {
  static const Formula t = FormulaStore::instance().intern(FormulaKind::Conj, {}, {});
  return t;
}

Formula Formula::bottom() { return negation(top()); }

Formula Formula::negation(Formula f) {
  return FormulaStore::instance().intern(FormulaKind::Not, {}, {f});
}

namespace {

std::vector<Formula> canonical_members(std::vector<Formula> members) {
  std::sort(members.begin(), members.end(),
            [](Formula a, Formula b) { return compare(a, b) < 0; });
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return members;
}

}  // namespace

Formula Formula::conj(std::vector<Formula> members) {
  members = canonical_members(std::move(members));
  if (members.size() == 1) return members.front();
  return FormulaStore::instance().intern(FormulaKind::Conj, {}, std::move(members));
}

Formula Formula::disj(std::vector<Formula> members) {
  members = canonical_members(std::move(members));
  if (members.empty()) return bottom();
  if (members.size() == 1) return members.front();
  return FormulaStore::instance().intern(FormulaKind::Disj, {}, std::move(members));
}

Formula Formula::box(Formula f) {
  return FormulaStore::instance().intern(FormulaKind::Box, {}, {f});
}

Formula Formula::diamond(Formula f) {
  return FormulaStore::instance().intern(FormulaKind::Diamond, {}, {f});
}

FormulaKind Formula::kind() const noexcept { return node_->kind; }

bool Formula::is_top() const noexcept {
  return node_->kind == FormulaKind::Conj && node_->children.empty();
}

const std::string& Formula::tag() const noexcept { return node_->tag; }

std::span<const Formula> Formula::operands() const noexcept { return node_->children; }

Formula Formula::operand() const {
  if (node_->children.size() != 1) throw Error("formula has no single operand");
  return node_->children.front();
}

std::uint64_t Formula::hash() const noexcept { return node_->hash; }
std::size_t Formula::depth() const noexcept { return node_->depth; }
std::size_t Formula::text_size() const noexcept { return node_->text_size; }
std::uint64_t Formula::id() const noexcept { return node_->id; }

int compare(Formula a, Formula b) noexcept {
  while (true) {
    if (a == b) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    if (a.kind() == FormulaKind::Atom) {
      int c = a.tag().compare(b.tag());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    auto xs = a.operands();
    auto ys = b.operands();
    std::size_t n = std::min(xs.size(), ys.size());
    std::size_t i = 0;
    while (i < n && xs[i] == ys[i]) ++i;
    if (i == n) return xs.size() < ys.size() ? -1 : 1;
    a = xs[i];
    b = ys[i];
  }
}

std::strong_ordering operator<=>(Formula a, Formula b) noexcept {
  int c = compare(a, b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

bool is_valid_atom_tag(std::string_view tag) noexcept {
  if (tag.empty()) return false;
  for (unsigned char c : tag) {
    if (c <= 0x20 || c >= 0x7f) return false;
    switch (c) {
      case ',': case '{': case '}': case '(': case ')':
      case '[': case ']': case '<': case '>': case '~': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

namespace {

void render_into(Formula f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      out += "atom:";
      out += f.tag();
      return;
    case FormulaKind::Not:
      out += '~';
      render_into(f.operand(), out);
      return;
    case FormulaKind::Box:
      out += "[]";
      render_into(f.operand(), out);
      return;
    case FormulaKind::Diamond:
      out += "<>";
      render_into(f.operand(), out);
      return;
    case FormulaKind::Conj:
    case FormulaKind::Disj: {
      out += f.kind() == FormulaKind::Conj ? "/\\{" : "\\/{";
      bool first = true;
      for (Formula m : f.operands()) {
        if (!first) out += ',';
        first = false;
        render_into(m, out);
      }
      out += '}';
      return;
    }
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = parse_formula();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return f;
  }

 private:
  static constexpr std::string_view kBox = "\xE2\x96\xA1";
  static constexpr std::string_view kDiamond = "\xE2\x97\x87";

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(std::string_view token) {
    if (text_.substr(pos_).starts_with(token)) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  Formula parse_formula() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    if (accept("atom:")) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && is_valid_atom_tag(text_.substr(pos_, 1))) ++pos_;
      if (pos_ == start) throw ParseError("empty atom tag", pos_);
      return Formula::atom(text_.substr(start, pos_ - start));
    }
    if (accept("T")) return Formula::top();
    if (accept("~")) return Formula::negation(parse_formula());
    if (accept("/\\{")) return Formula::conj(parse_members());
    if (accept("\\/{")) return Formula::disj(parse_members());
    if (accept("[]") || accept(kBox)) return Formula::box(parse_formula());
    if (accept("<>") || accept(kDiamond)) return Formula::diamond(parse_formula());
    if (accept("(")) {
      Formula f = parse_formula();
      skip_ws();
      if (!accept(")")) throw ParseError("expected ')'", pos_);
      return f;
    }
    throw ParseError("unexpected character", pos_);
  }

  std::vector<Formula> parse_members() {
    std::vector<Formula> members;
    skip_ws();
    if (accept("}")) return members;
    while (true) {
      members.push_back(parse_formula());
      skip_ws();
      if (accept(",")) continue;
      if (accept("}")) return members;
      throw ParseError("expected ',' or '}'", pos_);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

std::string render(Formula f) {
  std::string out;
  if (f.text_size() != kSizeMax) out.reserve(f.text_size());
  render_into(f, out);
  return out;
}

Formula triangle(std::span<const Formula> members) {
  std::vector<Formula> diamonds;
  diamonds.reserve(members.size());
  for (Formula m : members) diamonds.push_back(Formula::diamond(m));
  std::vector<Formula> all(members.begin(), members.end());
  return Formula::conj({Formula::conj(std::move(diamonds)), Formula::box(Formula::disj(std::move(all)))});
}

std::size_t interned_formula_count() { return FormulaStore::instance().size(); }

}  // namespace qunfold
