#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace opal {

// Symbol index into an alphabet; the delimiter # is kHash.
using Symbol = int;
using Word = std::vector<Symbol>;
inline constexpr Symbol kHash = -1;

enum class Relation : std::uint8_t { lt, eq, gt };

std::string_view relation_name(Relation r);
Relation parse_relation(std::string_view s);

class Opm {
 public:
  Opm() = default;
  explicit Opm(std::vector<std::string> alphabet);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int size() const { return static_cast<int>(alphabet_.size()); }

  // "#" maps to kHash. Throws InputError on unknown names.
  Symbol symbol(std::string_view name) const;
  std::optional<Symbol> find(std::string_view name) const;
  const std::string& name(Symbol s) const;

  std::optional<Relation> get(Symbol a, Symbol b) const {
    auto v = cells_[index(a, b)];
    if (v < 0) return std::nullopt;
    return static_cast<Relation>(v);
  }
  // Throws CompatibilityError when the cell already holds another relation,
  // InputError for a # row entry other than lt.
  void set(Symbol a, Symbol b, Relation r);
  void erase(Symbol a, Symbol b);
  std::size_t cell_count() const;

  bool operator==(const Opm& o) const { return alphabet_ == o.alphabet_ && cells_ == o.cells_; }

 private:
  std::size_t index(Symbol a, Symbol b) const {
    return static_cast<std::size_t>(a == kHash ? size() : a) * alphabet_.size() + b;
  }
  std::vector<std::string> alphabet_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::int8_t> cells_;
};

// Relation on the full (Σ∪{#}) × (Σ∪{#}) domain: a ⋗ # for every a, # ≐ #.
inline std::optional<Relation> relation_ext(const Opm& m, Symbol a, Symbol b) {
  if (b == kHash) return a == kHash ? Relation::eq : Relation::gt;
  return m.get(a, b);
}

std::optional<Relation> relation_of(const Opm& m, std::string_view a, std::string_view b);

// Re-express m over a larger alphabet (same names, possibly reordered).
Opm embed(const Opm& m, const std::vector<std::string>& alphabet);
std::vector<std::string> merge_alphabets(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b);

Opm opm_union(const Opm& m1, const Opm& m2);
// Cells stored in both (they must agree).
Opm opm_intersection(const Opm& m1, const Opm& m2);
bool opm_includes(const Opm& m1, const Opm& m2);

struct EqAcyclicity {
  bool acyclic = true;
  std::vector<Symbol> cycle;  // c1 ≐ c2 ≐ ... ≐ ck ≐ c1 when not acyclic
};
EqAcyclicity is_eq_acyclic(const Opm& m);

// Empty Σ×Σ cells become gt, empty # row cells become lt.
Opm complete_opm(const Opm& m);
bool is_complete(const Opm& m);

bool compatible_finite(const Opm& m, const Word& w);

// Longest prefix of w (no closing #) that the reduction accepts without hitting an empty cell.
std::size_t compatible_prefix_length(const Opm& m, const Word& w);

bool is_chain(const Opm& m, Symbol a0, const Word& x, Symbol a1);

struct FactorItem {
  enum class Kind { pending, body };
  Kind kind;
  Word word;          // one letter for pending items
  Symbol context;     // last pending letter before a body (kHash at the start)
  bool operator==(const FactorItem&) const = default;
};
using ChainFactorization = std::vector<FactorItem>;

// Factor a (prefix of an) ω-word into chain bodies and pending letters.
// Letters still on the stack at the end count as pending. Throws ParseError.
ChainFactorization factorize(const Opm& m, const Word& w);

// Whitespace separated tokens. Throws InputError on unknown symbols.
Word parse_word(const Opm& m, std::string_view text);
std::string format_word(const Opm& m, const Word& w);

}  // namespace opal
