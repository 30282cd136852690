#include <functional>
#include <map>
#include <random>
#include <tuple>

#include "doctest.h"
#include "opal/error.hpp"
#include "opal/opm.hpp"
#include "support.hpp"

using namespace opal;
using namespace opal::test;

namespace {

Opm m_db() { return fixture("db_queries").automaton->a.opm(); }
Opm m_int() { return fixture("interrupts").automaton->a.opm(); }
Opm m_fact() { return fixture("factorization_example").automaton->a.opm(); }

Opm tiny(std::initializer_list<std::tuple<const char*, const char*, Relation>> cells) {
  Opm m({"a", "b", "c"});
  for (auto [x, y, r] : cells) m.set(m.symbol(x), m.symbol(y), r);
  return m;
}

// Straight from the recursive definition: a spine c1..cl with l ⋖ c1 ≐ ... ≐ cl ⋗ r
// whose gaps are empty or chains between their neighbours.
class ChainOracle {
 public:
  ChainOracle(const Opm& m, const Word& x) : m_(m), x_(x) {}

  bool chain(Symbol l, std::size_t i, std::size_t j, Symbol r) {
    if (i >= j) return false;
    auto key = std::make_tuple(l, i, j, r);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool ok = false;
    for (std::size_t p = i; p < j && !ok; ++p)
      ok = rel(l, x_[p]) == Relation::lt && gap(l, i, p, x_[p]) && tail(p, j, r);
    memo_[key] = ok;
    return ok;
  }

 private:
  std::optional<Relation> rel(Symbol a, Symbol b) { return relation_ext(m_, a, b); }
  bool gap(Symbol l, std::size_t i, std::size_t j, Symbol r) { return i == j || chain(l, i, j, r); }
  // spine at k; finish it inside x[k+1, j) and close against r
  bool tail(std::size_t k, std::size_t j, Symbol r) {
    Symbol c = x_[k];
    if (rel(c, r) == Relation::gt && gap(c, k + 1, j, r)) return true;
    for (std::size_t p = k + 1; p < j; ++p)
      if (rel(c, x_[p]) == Relation::eq && gap(c, k + 1, p, x_[p]) && tail(p, j, r)) return true;
    return false;
  }

  const Opm& m_;
  const Word& x_;
  std::map<std::tuple<Symbol, std::size_t, std::size_t, Symbol>, bool> memo_;
};

void all_words(int letters, int len, Word& cur, const std::function<void(const Word&)>& f) {
  f(cur);
  if (static_cast<int>(cur.size()) == len) return;
  for (Symbol s = 0; s < letters; ++s) {
    cur.push_back(s);
    all_words(letters, len, cur, f);
    cur.pop_back();
  }
}

}  // namespace

TEST_CASE("relation_of reads stored cells") {
  Opm db = m_db();
  CHECK(relation_of(db, "join", "cup") == Relation::gt);
  CHECK(!relation_of(db, "R", "R"));
  CHECK(relation_of(m_int(), "int1", "int2") == Relation::lt);
  CHECK(relation_of(m_int(), "#", "call_a") == Relation::lt);
  CHECK_THROWS_AS(relation_of(db, "nope", "R"), InputError);
}

TEST_CASE("relation names round-trip") {
  for (Relation r : {Relation::lt, Relation::eq, Relation::gt}) CHECK(parse_relation(relation_name(r)) == r);
  CHECK_THROWS(parse_relation("le"));
}

TEST_CASE("opm_union") {
  Opm db = m_db();
  CHECK(opm_union(db, db) == db);
  Opm u = opm_union(tiny({{"a", "b", Relation::lt}}), tiny({{"b", "a", Relation::gt}}));
  CHECK(u == tiny({{"a", "b", Relation::lt}, {"b", "a", Relation::gt}}));
  try {
    opm_union(tiny({{"a", "b", Relation::lt}}), tiny({{"a", "b", Relation::gt}}));
    FAIL("expected a conflict");
  } catch (const CompatibilityError& e) {
    CHECK(e.row() == "a");
    CHECK(e.col() == "b");
  }
}

TEST_CASE("opm_union is commutative, associative and extends its operands") {
  std::mt19937 rng(7);
  std::bernoulli_distribution keep(0.3);
  int unions = 0;
  for (int round = 0; round < 200; ++round) {
    Opm base = random_opm(rng, 3);
    auto sparse = [&] {
      Opm m(base.alphabet());
      for (Symbol a = kHash; a < 3; ++a)
        for (Symbol b = 0; b < 3; ++b)
          if (auto r = base.get(a, b); r && keep(rng)) m.set(a, b, *r);
      return m;
    };
    Opm x = sparse(), y = sparse(), z = sparse();
    CHECK(opm_union(x, y) == opm_union(y, x));
    CHECK(opm_union(opm_union(x, y), z) == opm_union(x, opm_union(y, z)));
    CHECK(opm_includes(x, opm_union(x, y)));
    ++unions;
  }
  CHECK(unions == 200);
}

TEST_CASE("opm_includes") {
  Opm db = m_db(), in = m_int();
  CHECK(opm_includes(db, db));
  CHECK(opm_includes(Opm(db.alphabet()), db));
  auto alpha = merge_alphabets(db.alphabet(), in.alphabet());
  CHECK_FALSE(opm_includes(embed(db, alpha), embed(in, alpha)));
}

TEST_CASE("eq acyclicity") {
  auto self = is_eq_acyclic(tiny({{"a", "a", Relation::eq}}));
  CHECK_FALSE(self.acyclic);
  CHECK(self.cycle == Word{0});
  CHECK(is_eq_acyclic(m_int()).acyclic);
  auto tri = is_eq_acyclic(tiny({{"a", "b", Relation::eq}, {"b", "c", Relation::eq}, {"c", "a", Relation::eq}}));
  CHECK_FALSE(tri.acyclic);
  CHECK(tri.cycle.size() == 3);
}

TEST_CASE("complete_opm") {
  Opm db = m_db();
  Opm full = complete_opm(db);
  CHECK(is_complete(full));
  CHECK(full.get(db.symbol("R"), db.symbol("R")) == Relation::gt);
  CHECK(complete_opm(full) == full);
  CHECK(opm_includes(db, full));
  for (Symbol b = 0; b < full.size(); ++b) CHECK(full.get(kHash, b) == Relation::lt);
}

TEST_CASE("compatible_finite") {
  Opm db = m_db();
  CHECK(compatible_finite(db, parse_word(db, "A cup B join C join pi_expr D")));
  CHECK(compatible_finite(db, {}));
  CHECK_FALSE(compatible_finite(db, parse_word(db, "R R")));
  CHECK(compatible_prefix_length(db, parse_word(db, "A cup R R")) == 3);
}

TEST_CASE("is_chain examples") {
  Opm db = m_db();
  CHECK(is_chain(db, db.symbol("cup"), parse_word(db, "B"), db.symbol("join")));
  CHECK_FALSE(is_chain(db, db.symbol("cup"), {}, db.symbol("join")));
  Opm f = m_fact();
  CHECK(is_chain(f, kHash, parse_word(f, "a c"), f.symbol("b")));
  CHECK_FALSE(is_chain(f, kHash, parse_word(f, "a"), f.symbol("c")));
}

TEST_CASE("is_chain agrees with the recursive definition") {
  std::mt19937 rng(31);
  std::size_t checked = 0, chains = 0;
  for (int round = 0; round < 4; ++round) {
    Opm m = random_opm(rng, 3);
    // leave a few holes so stuck reductions are covered too
    if (round % 2) m.erase(1, 2);
    Word cur;
    all_words(3, 6, cur, [&](const Word& x) {
      ChainOracle o(m, x);
      for (Symbol l = kHash; l < 3; ++l)
        for (Symbol r = kHash; r < 3; ++r) {
          bool want = o.chain(l, 0, x.size(), r);
          if (is_chain(m, l, x, r) != want) {
            INFO("x=" << format_word(m, x) << " l=" << l << " r=" << r);
            CHECK(is_chain(m, l, x, r) == want);
          }
          chains += want;
          ++checked;
        }
    });
  }
  CHECK(checked > 10000);
  CHECK(chains > 100);
}

TEST_CASE("factorize the worked example") {
  Opm f = m_fact();
  Symbol a = f.symbol("a"), b = f.symbol("b"), c = f.symbol("c"), d = f.symbol("d");
  auto items = factorize(f, parse_word(f, "a c b a d b"));
  using K = FactorItem::Kind;
  ChainFactorization want{{K::body, {a, c}, kHash}, {K::pending, {b}, kHash}, {K::body, {a}, b},
                          {K::body, {d}, b},       {K::pending, {b}, b}};
  REQUIRE(items.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(items[i].kind == want[i].kind);
    CHECK(items[i].word == want[i].word);
    if (want[i].kind == K::body) CHECK(items[i].context == want[i].context);
  }
  auto single = factorize(f, parse_word(f, "b"));
  REQUIRE(single.size() == 1);
  CHECK(single[0].kind == K::pending);
  CHECK_THROWS_AS(factorize(m_db(), parse_word(m_db(), "R R")), ParseError);
}

TEST_CASE("factorize invariants on random words") {
  std::mt19937 rng(5);
  int words = 0;
  for (int round = 0; round < 10; ++round) {
    Opm m = random_opm(rng, 3);
    for (int k = 0; k < 30; ++k) {
      Word w = random_word(rng, m, 1 + k % 12);
      auto items = factorize(m, w);
      Word joined;
      for (const auto& it : items) joined.insert(joined.end(), it.word.begin(), it.word.end());
      CHECK(joined == w);
      std::size_t pos = 0;
      for (const auto& it : items) {
        std::size_t next = pos + it.word.size();
        if (it.kind == FactorItem::Kind::body) {
          if (next < w.size()) CHECK(is_chain(m, it.context, it.word, w[next]));
          for (std::size_t p = 1; p < it.word.size(); ++p) {
            Word pre(it.word.begin(), it.word.begin() + p);
            CHECK_FALSE(is_chain(m, it.context, pre, it.word[p]));
          }
        } else {
          CHECK(it.word.size() == 1);
        }
        pos = next;
      }
      ++words;
    }
  }
  CHECK(words == 300);
}

TEST_CASE("words parse and print") {
  Opm db = m_db();
  Word w = parse_word(db, "  A   cup B ");
  CHECK(format_word(db, w) == "A cup B");
  CHECK_THROWS_AS(parse_word(db, "A cupp B"), InputError);
}
