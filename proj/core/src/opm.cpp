#include "opal/opm.hpp"

#include <algorithm>
#include <sstream>

#include "opal/error.hpp"

namespace opal {

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::lt: return "lt";
    case Relation::eq: return "eq";
    case Relation::gt: return "gt";
  }
  return "?";
}

Relation parse_relation(std::string_view s) {
  if (s == "lt") return Relation::lt;
  if (s == "eq") return Relation::eq;
  if (s == "gt") return Relation::gt;
  throw InputError("unknown relation '" + std::string(s) + "' (expected lt, eq or gt)");
}

Opm::Opm(std::vector<std::string> alphabet) : alphabet_(std::move(alphabet)) {
  for (int i = 0; i < size(); ++i) {
    const auto& s = alphabet_[i];
    if (s.empty() || s == "#" || s.find_first_of(" \t\n;") != std::string::npos)
      throw InputError("invalid symbol name '" + s + "'");
    if (!index_.emplace(s, i).second) throw InputError("duplicate symbol '" + s + "'");
  }
  cells_.assign(static_cast<std::size_t>(size() + 1) * size(), -1);
}

Symbol Opm::symbol(std::string_view name) const {
  if (name == "#") return kHash;
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw InputError("unknown symbol '" + std::string(name) + "'");
  return it->second;
}

std::optional<Symbol> Opm::find(std::string_view name) const {
  if (name == "#") return kHash;
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Opm::name(Symbol s) const {
  static const std::string hash = "#";
  return s == kHash ? hash : alphabet_.at(s);
}

void Opm::set(Symbol a, Symbol b, Relation r) {
  if (b == kHash) throw InputError("the ending # column is implicit and cannot be stored");
  if (a == kHash && r != Relation::lt)
    throw InputError("# row may only hold lt (cell #," + name(b) + ")");
  auto& c = cells_[index(a, b)];
  if (c >= 0 && c != static_cast<std::int8_t>(r)) {
    throw CompatibilityError(name(a), name(b),
                             "conflicting relations in cell (" + name(a) + "," + name(b) + "): " +
                                 std::string(relation_name(static_cast<Relation>(c))) + " vs " +
                                 std::string(relation_name(r)));
  }
  c = static_cast<std::int8_t>(r);
}

void Opm::erase(Symbol a, Symbol b) { cells_[index(a, b)] = -1; }

std::size_t Opm::cell_count() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](auto v) { return v >= 0; }));
}

std::optional<Relation> relation_of(const Opm& m, std::string_view a, std::string_view b) {
  Symbol sa = m.symbol(a);
  Symbol sb = m.symbol(b);
  if (sb == kHash) return relation_ext(m, sa, sb);
  return m.get(sa, sb);
}

std::vector<std::string> merge_alphabets(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (const auto& s : b)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  return out;
}

Opm embed(const Opm& m, const std::vector<std::string>& alphabet) {
  Opm out(alphabet);
  std::vector<Symbol> map(m.size());
  for (int i = 0; i < m.size(); ++i) {
    auto s = out.find(m.alphabet()[i]);
    if (!s) throw InputError("cannot embed: symbol '" + m.alphabet()[i] + "' missing from target alphabet");
    map[i] = *s;
  }
  for (Symbol a = kHash; a < m.size(); ++a)
    for (Symbol b = 0; b < m.size(); ++b)
      if (auto r = m.get(a, b)) out.set(a == kHash ? kHash : map[a], map[b], *r);
  return out;
}

namespace {

void check_same_alphabet(const Opm& m1, const Opm& m2) {
  if (m1.alphabet() != m2.alphabet())
    throw InputError("precedence matrices are over different alphabets; embed them first");
}

}  // namespace

Opm opm_union(const Opm& m1, const Opm& m2) {
  check_same_alphabet(m1, m2);
  Opm out = m1;
  for (Symbol a = kHash; a < m2.size(); ++a)
    for (Symbol b = 0; b < m2.size(); ++b)
      if (auto r = m2.get(a, b)) out.set(a, b, *r);
  return out;
}

Opm opm_intersection(const Opm& m1, const Opm& m2) {
  check_same_alphabet(m1, m2);
  Opm out(m1.alphabet());
  for (Symbol a = kHash; a < m1.size(); ++a)
    for (Symbol b = 0; b < m1.size(); ++b) {
      auto r1 = m1.get(a, b), r2 = m2.get(a, b);
      if (r1 && r2 && *r1 != *r2)
        throw CompatibilityError(m1.name(a), m1.name(b),
                                 "conflicting relations in cell (" + m1.name(a) + "," + m1.name(b) + ")");
      if (r1 && r2) out.set(a, b, *r1);
    }
  return out;
}

bool opm_includes(const Opm& m1, const Opm& m2) {
  check_same_alphabet(m1, m2);
  for (Symbol a = kHash; a < m1.size(); ++a)
    for (Symbol b = 0; b < m1.size(); ++b)
      if (auto r = m1.get(a, b); r && m2.get(a, b) != r) return false;
  return true;
}

EqAcyclicity is_eq_acyclic(const Opm& m) {
  const int n = m.size();
  std::vector<int> color(n, 0), parent(n, -1);
  EqAcyclicity out;
  // iterative DFS over the ≐ graph
  for (int root = 0; root < n && out.acyclic; ++root) {
    if (color[root]) continue;
    std::vector<std::pair<int, int>> st{{root, 0}};
    color[root] = 1;
    while (!st.empty() && out.acyclic) {
      auto& [v, next] = st.back();
      if (next == n) {
        color[v] = 2;
        st.pop_back();
        continue;
      }
      int w = next++;
      if (m.get(v, w) != Relation::eq) continue;
      if (color[w] == 1) {
        out.acyclic = false;
        for (int u = v; u != w; u = parent[u]) out.cycle.push_back(u);
        out.cycle.push_back(w);
        std::reverse(out.cycle.begin(), out.cycle.end());
      } else if (color[w] == 0) {
        color[w] = 1;
        parent[w] = v;
        st.push_back({w, 0});
      }
    }
  }
  return out;
}

Opm complete_opm(const Opm& m) {
  Opm out = m;
  for (Symbol a = kHash; a < m.size(); ++a)
    for (Symbol b = 0; b < m.size(); ++b)
      if (!m.get(a, b)) out.set(a, b, a == kHash ? Relation::lt : Relation::gt);
  return out;
}

bool is_complete(const Opm& m) {
  return m.cell_count() == static_cast<std::size_t>(m.size() + 1) * m.size();
}

namespace {

struct Cell {
  Symbol sym;
  bool marked;
};

// Single-state reduction. Returns the number of letters consumed before getting stuck,
// or w.size() + 1 when #w# reduces completely (closing only if close_with_hash).
std::size_t reduce(const Opm& m, const Word& w, bool close_with_hash) {
  std::vector<Cell> st{{kHash, false}};
  std::size_t i = 0;
  for (;;) {
    if (i == w.size() && !close_with_hash) return i;
    Symbol la = i < w.size() ? w[i] : kHash;
    Symbol top = st.back().sym;
    if (top == kHash && la == kHash) return w.size() + 1;
    auto r = relation_ext(m, top, la);
    if (!r) return i;
    if (*r == Relation::gt) {
      if (st.size() == 1) return i;
      while (st.size() > 1) {
        bool mk = st.back().marked;
        st.pop_back();
        if (mk) break;
      }
    } else {
      st.push_back({la, *r == Relation::lt});
      ++i;
    }
  }
}

}  // namespace

bool compatible_finite(const Opm& m, const Word& w) { return reduce(m, w, true) == w.size() + 1; }

std::size_t compatible_prefix_length(const Opm& m, const Word& w) {
  return std::min(reduce(m, w, false), w.size());
}

bool is_chain(const Opm& m, Symbol a0, const Word& x, Symbol a1) {
  if (x.empty()) return false;
  // a0 sits at the base and must never be popped
  std::vector<Cell> st{{a0, false}};
  std::size_t i = 0;
  for (;;) {
    bool done = i == x.size();
    Symbol la = done ? a1 : x[i];
    if (done && st.size() == 1) return true;
    auto r = relation_ext(m, st.back().sym, la);
    if (st.size() == 1) {
      // a new (sub)chain must open with a0 ⋖ ...
      if (r != Relation::lt || done) return false;
      st.push_back({la, true});
      ++i;
      continue;
    }
    if (!r) return false;
    if (*r == Relation::gt) {
      while (st.size() > 1) {
        bool mk = st.back().marked;
        st.pop_back();
        if (mk) break;
      }
    } else {
      if (done) return false;  // a1 would be pushed inside the chain
      st.push_back({la, *r == Relation::lt});
      ++i;
    }
  }
}

ChainFactorization factorize(const Opm& m, const Word& w) {
  struct Entry {
    Symbol sym;
    bool marked;
    std::size_t pos;
  };
  // pass 1: which positions are popped by a flush within w
  std::vector<bool> popped(w.size(), false);
  {
    std::vector<Entry> st{{kHash, false, 0}};
    std::size_t i = 0;
    while (i < w.size()) {
      Symbol la = w[i];
      auto r = relation_ext(m, st.back().sym, la);
      if (!r || (*r == Relation::gt && st.size() == 1)) {
        throw ParseError(i, "word is not compatible with the precedence matrix at position " +
                                std::to_string(i) + " (" + m.name(st.back().sym) + "," + m.name(la) + ")");
      }
      if (*r == Relation::gt) {
        while (st.size() > 1) {
          auto e = st.back();
          st.pop_back();
          popped[e.pos] = true;
          if (e.marked) break;
        }
      } else {
        st.push_back({la, *r == Relation::lt, i});
        ++i;
      }
    }
  }
  // pass 2: cut a body whenever a flush exposes a pending letter (or #)
  ChainFactorization out;
  std::vector<Entry> st{{kHash, false, 0}};
  std::size_t i = 0, body_start = 0;
  bool in_body = false;
  auto top_is_base = [&] { return st.size() == 1 || !popped[st.back().pos]; };
  while (i < w.size()) {
    Symbol la = w[i];
    auto r = *relation_ext(m, st.back().sym, la);
    if (r == Relation::gt) {
      while (st.size() > 1) {
        auto e = st.back();
        st.pop_back();
        if (e.marked) break;
      }
      if (in_body && top_is_base()) {
        out.push_back({FactorItem::Kind::body, Word(w.begin() + body_start, w.begin() + i),
                       st.back().sym});
        in_body = false;
      }
      continue;
    }
    if (!popped[i]) {
      out.push_back({FactorItem::Kind::pending, Word{la}, kHash});
    } else if (!in_body) {
      in_body = true;
      body_start = i;
    }
    st.push_back({la, r == Relation::lt, i});
    ++i;
  }
  // pending items carry the previous pending letter as context too
  Symbol last = kHash;
  for (auto& it : out) {
    if (it.kind == FactorItem::Kind::pending) {
      it.context = last;
      last = it.word[0];
    }
  }
  return out;
}

Word parse_word(const Opm& m, std::string_view text) {
  Word w;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    Symbol s = m.symbol(tok);
    if (s == kHash) throw InputError("'#' cannot appear inside a word");
    w.push_back(s);
  }
  return w;
}

std::string format_word(const Opm& m, const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += m.name(w[i]);
  }
  return out;
}

}  // namespace opal
