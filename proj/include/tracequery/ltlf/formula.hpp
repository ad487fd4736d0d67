#pragma once

// LTLf abstract syntax over a vocabulary of named predicates.
//
// Formulas are immutable, reference-counted trees with structural equality
// and a structural total order, so they can be used directly as map keys
// (automaton states are keyed by their residual formula).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracequery::ltlf {

enum class Op : std::uint8_t {
  True,
  False,
  Pred,
  Not,
  And,
  Or,
  Next,
  Until,
  Eventually,
  Always,
};

class Formula {
 public:
  // Default-constructed formula is `true`.
  Formula();

  Op op() const noexcept;
  // Predicate name; empty for non-atoms.
  const std::string& name() const noexcept;
  // Operand of unary operators and left operand of binary ones.
  const Formula& lhs() const;
  const Formula& rhs() const;
  std::size_t hash() const noexcept;
  // Number of nodes in the tree.
  std::size_t size() const noexcept;

  bool is_constant() const noexcept { return op() == Op::True || op() == Op::False; }
  bool is_unary() const noexcept;
  bool is_binary() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept;

  static Formula make(Op op, std::string name, const Formula* lhs, const Formula* rhs);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  Op op;
  std::string name;
  Formula lhs;
  Formula rhs;
  std::size_t hash;
  std::size_t size;
  bool has_lhs;
  bool has_rhs;
};

namespace detail {

inline std::size_t hash_mix(std::size_t seed, std::size_t value) noexcept {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace detail

inline Formula Formula::make(Op op, std::string name, const Formula* lhs, const Formula* rhs) {
  std::size_t h = detail::hash_mix(0, static_cast<std::size_t>(op));
  std::size_t size = 1;
  if (!name.empty()) h = detail::hash_mix(h, std::hash<std::string>{}(name));
  if (lhs) {
    h = detail::hash_mix(h, lhs->hash());
    size += lhs->size();
  }
  if (rhs) {
    h = detail::hash_mix(h, rhs->hash());
    size += rhs->size();
  }
  // Leaf nodes hold placeholder children; they are never dereferenced because
  // has_lhs/has_rhs are false. The placeholder must not recurse into make().
  auto node = std::shared_ptr<Node>(new Node{op, std::move(name), Formula(nullptr), Formula(nullptr), h,
                                             size, lhs != nullptr, rhs != nullptr});
  if (lhs) node->lhs = *lhs;
  if (rhs) node->rhs = *rhs;
  return Formula(std::move(node));
}

inline Formula::Formula() {
  static const Formula truth = make(Op::True, {}, nullptr, nullptr);
  node_ = truth.node_;
}

inline Op Formula::op() const noexcept { return node_->op; }
inline const std::string& Formula::name() const noexcept { return node_->name; }
inline std::size_t Formula::hash() const noexcept { return node_->hash; }
inline std::size_t Formula::size() const noexcept { return node_->size; }

inline const Formula& Formula::lhs() const {
  if (!node_->has_lhs) throw std::logic_error("formula has no operand");
  return node_->lhs;
}

inline const Formula& Formula::rhs() const {
  if (!node_->has_rhs) throw std::logic_error("formula has no right operand");
  return node_->rhs;
}

inline bool Formula::is_unary() const noexcept {
  switch (op()) {
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return true;
    default:
      return false;
  }
}

inline bool Formula::is_binary() const noexcept {
  return op() == Op::And || op() == Op::Or || op() == Op::Until;
}

inline bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.op() != b.op()) return false;
  if (a.name() != b.name()) return false;
  if (a.node_->has_lhs && !(a.node_->lhs == b.node_->lhs)) return false;
  if (a.node_->has_rhs && !(a.node_->rhs == b.node_->rhs)) return false;
  return true;
}

// Orders by operator, then name, then operands. Predicates sort before
// compound formulas, which keeps canonical conjunctions readable.
inline std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.op() <=> b.op(); c != 0) return c;
  if (auto c = a.name() <=> b.name(); c != 0) return c;
  if (a.node_->has_lhs) {
    if (auto c = a.node_->lhs <=> b.node_->lhs; c != 0) return c;
  }
  if (a.node_->has_rhs) {
    if (auto c = a.node_->rhs <=> b.node_->rhs; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// --- builders ---------------------------------------------------------------

inline Formula top() { return Formula(); }
inline Formula bottom() {
  static const Formula falsity = Formula::make(Op::False, {}, nullptr, nullptr);
  return falsity;
}
inline Formula pred(std::string name) { return Formula::make(Op::Pred, std::move(name), nullptr, nullptr); }
inline Formula lnot(const Formula& f) { return Formula::make(Op::Not, {}, &f, nullptr); }
inline Formula land(const Formula& a, const Formula& b) { return Formula::make(Op::And, {}, &a, &b); }
inline Formula lor(const Formula& a, const Formula& b) { return Formula::make(Op::Or, {}, &a, &b); }
inline Formula next(const Formula& f) { return Formula::make(Op::Next, {}, &f, nullptr); }
inline Formula until(const Formula& a, const Formula& b) { return Formula::make(Op::Until, {}, &a, &b); }
inline Formula eventually(const Formula& f) { return Formula::make(Op::Eventually, {}, &f, nullptr); }
inline Formula always(const Formula& f) { return Formula::make(Op::Always, {}, &f, nullptr); }

// Left-nested conjunction of all operands; `true` for an empty list.
inline Formula conjunction(const std::vector<Formula>& operands) {
  if (operands.empty()) return top();
  Formula acc = operands.front();
  for (std::size_t i = 1; i < operands.size(); ++i) acc = land(acc, operands[i]);
  return acc;
}

// Left-nested disjunction of all operands; `false` for an empty list.
inline Formula disjunction(const std::vector<Formula>& operands) {
  if (operands.empty()) return bottom();
  Formula acc = operands.front();
  for (std::size_t i = 1; i < operands.size(); ++i) acc = lor(acc, operands[i]);
  return acc;
}

// Sorted set of predicate names occurring in `f`.
inline std::vector<std::string> predicates_of(const Formula& f) {
  std::set<std::string> out;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (g.op() == Op::Pred) out.insert(g.name());
    if (g.is_unary() || g.is_binary()) stack.push_back(g.lhs());
    if (g.is_binary()) stack.push_back(g.rhs());
  }
  return {out.begin(), out.end()};
}

// Rewrites F, G and | into the core connectives:
//   F g  = true U g,   G g = !F !g,   a | b = !(!a & !b).
inline Formula expand_sugar(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Pred:
      return f;
    case Op::Not:
      return lnot(expand_sugar(f.lhs()));
    case Op::And:
      return land(expand_sugar(f.lhs()), expand_sugar(f.rhs()));
    case Op::Or:
      return lnot(land(lnot(expand_sugar(f.lhs())), lnot(expand_sugar(f.rhs()))));
    case Op::Next:
      return next(expand_sugar(f.lhs()));
    case Op::Until:
      return until(expand_sugar(f.lhs()), expand_sugar(f.rhs()));
    case Op::Eventually:
      return until(top(), expand_sugar(f.lhs()));
    case Op::Always:
      return lnot(until(top(), lnot(expand_sugar(f.lhs()))));
  }
  return f;
}

// --- letters and traces -----------------------------------------------------

// The set of predicates holding at one position of a trace.
class Letter {
 public:
  Letter() = default;
  Letter(std::initializer_list<std::string> names) : names_(names) { canonicalize(); }
  explicit Letter(std::vector<std::string> names) : names_(std::move(names)) { canonicalize(); }

  bool contains(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name,
                               [](const std::string& a, std::string_view b) { return a < b; });
    return it != names_.end() && *it == name;
  }

  bool empty() const noexcept { return names_.empty(); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  auto begin() const noexcept { return names_.begin(); }
  auto end() const noexcept { return names_.end(); }

  friend bool operator==(const Letter&, const Letter&) = default;

 private:
  void canonicalize() {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  }

  std::vector<std::string> names_;
};

// A finite sequence of letters. Semantics are only defined on nonempty traces.
using AbstractTrace = std::vector<Letter>;

}  // namespace tracequery::ltlf

template <>
struct std::hash<tracequery::ltlf::Formula> {
  std::size_t operator()(const tracequery::ltlf::Formula& f) const noexcept { return f.hash(); }
};
