#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "opal/closures.hpp"
#include "opal/corpus.hpp"

namespace opal::test {

inline Fixture fixture(const std::string& name) { return load_fixture(name); }
inline OmegaOpa omega_of(const std::string& name) { return load_fixture(name).automaton->a; }

// Complete matrix; eq cells only go from a lower to a higher index, so the
// eq graph is acyclic.
inline Opm random_opm(std::mt19937& rng, int letters) {
  std::vector<std::string> alpha;
  for (int i = 0; i < letters; ++i) alpha.push_back(std::string(1, static_cast<char>('a' + i)));
  Opm m(alpha);
  std::uniform_int_distribution<int> rel(0, 2);
  for (Symbol a = 0; a < letters; ++a)
    for (Symbol b = 0; b < letters; ++b) {
      int r = rel(rng);
      if (r == 1 && a >= b) r = 2;
      m.set(a, b, static_cast<Relation>(r));
    }
  for (Symbol b = 0; b < letters; ++b) m.set(kHash, b, Relation::lt);
  return m;
}

// n states, one initial, each push/flush target present with probability p.
template <class A>
A random_automaton(std::mt19937& rng, const Opm& m, int n, double p) {
  A a(m);
  for (int i = 0; i < n; ++i) a.add_state("s" + std::to_string(i));
  a.add_initial(0);
  std::bernoulli_distribution coin(p), half(0.4);
  for (State q = 0; q < n; ++q) {
    if (half(rng)) a.add_final(q);
    for (Symbol b = 0; b < m.size(); ++b)
      for (State t = 0; t < n; ++t)
        if (coin(rng)) a.add_push(q, b, t);
    for (State r = 0; r < n; ++r)
      for (State t = 0; t < n; ++t)
        if (coin(rng)) a.add_flush(q, r, t);
  }
  if (a.final().empty()) a.add_final(n - 1);
  return a;
}

inline Word random_word(std::mt19937& rng, const Opm& m, int len) {
  std::uniform_int_distribution<int> sym(0, m.size() - 1);
  Word w;
  for (int i = 0; i < len; ++i) w.push_back(sym(rng));
  return w;
}

// Distinct lassos compatible with m, |u| <= 4, 1 <= |v| <= 4.
inline std::vector<Lasso> sample_lassos(std::mt19937& rng, const Opm& m, std::size_t count) {
  std::set<std::pair<Word, Word>> seen;
  std::vector<Lasso> out;
  std::uniform_int_distribution<int> ulen(0, 4), vlen(1, 4);
  for (int tries = 0; out.size() < count && tries < 200000; ++tries) {
    Lasso l{random_word(rng, m, ulen(rng)), random_word(rng, m, vlen(rng))};
    if (!lasso_compatible(m, l) || !seen.insert({l.prefix, l.period}).second) continue;
    out.push_back(l);
  }
  return out;
}

// Brute-force semisupports of the chain left[x]right: every (q, p, f) such that
// starting in q above a bottom entry for `left`, the automaton reads x and, with
// `right` ahead, flushes back down to that entry with state p. f records a final
// state entered along the way (the start state is not counted).
inline TripleSet semisupports(const Opa& a, Symbol left, const Word& x, Symbol right) {
  const Opm& m = a.opm();
  struct Entry {
    Symbol s;
    bool marked;
    State q;
  };
  struct Node {
    std::vector<Entry> stack;
    std::size_t pos;
    bool f;
  };
  auto rel = [&](Symbol s, Symbol b) { return relation_ext(m, s, b); };
  std::set<Triple> out;
  for (State q0 = 0; q0 < a.num_states(); ++q0) {
    std::vector<Node> todo{{{{left, false, q0}}, 0, false}};
    while (!todo.empty()) {
      Node n = todo.back();
      todo.pop_back();
      Symbol look = n.pos < x.size() ? x[n.pos] : right;
      auto r = rel(n.stack.back().s, look);
      if (!r) continue;
      if (*r == Relation::gt) {
        if (n.stack.size() == 1) continue;
        std::size_t i = n.stack.size() - 1;
        while (i > 0 && !n.stack[i].marked) --i;
        if (i == 0) continue;
        State top = n.stack.back().q, below = n.stack[i - 1].q;
        for (State p : a.flush_targets(top, below)) {
          Node k = n;
          k.stack.resize(i);
          k.stack.back().q = p;
          k.f = k.f || a.is_final(p);
          if (k.stack.size() == 1 && k.pos == x.size())
            out.insert({q0, p, k.f});
          else
            todo.push_back(k);
        }
      } else if (n.pos < x.size()) {
        for (State p : a.push_targets(n.stack.back().q, look)) {
          Node k = n;
          k.stack.push_back({look, *r == Relation::lt, p});
          k.pos++;
          k.f = k.f || a.is_final(p);
          todo.push_back(k);
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

inline std::vector<std::string> output_strings(const Transducer& t, const Word& out) {
  std::vector<std::string> s;
  for (Symbol o : out) s.push_back(t.output_alphabet.at(o));
  return s;
}

}  // namespace opal::test
