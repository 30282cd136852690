// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <functional>
#include <iostream>
#include <sstream>

#include "opal/pds.hpp"
#include "support.hpp"

using namespace opal;
using namespace opal::test;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void check(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      ok = false;
      detail << what;
    }
  }
};

// Golden traces replay exactly, also after glyph aliasing.
Outcome golden_traces() {
  Outcome o;
  const std::pair<const char*, std::size_t> expect[] = {{"db_queries", 17}, {"interrupts", 13}, {"versioning_N2", 19}};
  for (auto [name, lines] : expect) {
    auto f = fixture(name);
    const auto& t = f.traces.at(0);
    auto r = replay_trace(f.automaton->a, t);
    o.check(r.ok && r.matched == lines && t.lines.size() == lines,
            std::string(name) + " matched " + std::to_string(r.matched) + "/" + std::to_string(lines));
    // the word typed with glyphs replays to the same lines
    TraceExpectation u = t;
    u.word = unicode_line(t.word);
    o.check(replay_trace(f.automaton->a, u).ok, std::string(name) + " glyph form");
  }
  // the accepting run found by accepts_finite prints the same 17 lines
  auto f = fixture("db_queries");
  Word w = parse_word_aliased(f.automaton->a.opm(), "A ∪ B ⋈ C ⋈ π_expr D");
  auto run = accepts_finite(f.automaton->a, w);
  o.check(run.accepted && run.trace && format_trace(f.automaton->a, *run.trace, w) == f.traces[0].lines,
          "accepts_finite trace differs");
  if (o.ok) o.detail << "17, 13 and 19 lines string-equal";
  return o;
}

Outcome variant_equivalence() {
  Outcome o;
  std::vector<std::pair<std::string, Opa>> cases;
  cases.emplace_back("db_queries", fixture("db_queries").automaton->a);
  std::mt19937 rng(20260501);
  for (int i = 0; i < 2; ++i) {
    Opm m = random_opm(rng, 2);
    cases.emplace_back("random" + std::to_string(i), random_automaton<Opa>(rng, m, 3, 0.35));
  }
  std::size_t words = 0;
  for (const auto& [name, a] : cases) {
    auto v = classical_to_variant(a).automaton;
    auto back = variant_to_classical(v).automaton;
    for (const Word& w : compatible_words(a.opm(), 6)) {
      bool l = accepts_finite(a, w).accepted;
      bool lv = accepts_variant(v, w).accepted;
      bool lb = accepts_finite(back, w).accepted;
      o.check(l == lv, name + ": L(A) vs variant differs on '" + format_word(a.opm(), w) + "'");
      o.check(lv == lb, name + ": variant vs classical differs on '" + format_word(a.opm(), w) + "'");
      ++words;
      if (!o.ok) return o;
    }
  }
  o.detail << words << " compatible words of length <= 6 over 3 automata";
  return o;
}

Outcome state_budgets() {
  Outcome o;
  std::mt19937 rng(77);
  std::vector<Opa> as{fixture("db_queries").automaton->a, fixture("a_plus_opa").automaton->a,
                      fixture("sigma_star_opa").automaton->a};
  for (int i = 0; i < 3; ++i) as.push_back(random_automaton<Opa>(rng, random_opm(rng, 2), 3, 0.35));
  for (const auto& a : as) {
    auto n = static_cast<std::size_t>(a.num_states());
    auto v = classical_to_variant(a);
    o.check(v.unpruned_states == 3 * (a.opm().size() + 1) * n * n, "variant unpruned size");
  }
  struct Pair {
    Opa a1;
    OmegaOpa a2;
  };
  std::vector<Pair> pairs{{fixture("a_plus_opa").automaton->a, to_buchi_final(omega_of("dyck_bfae"))},
                          {fixture("sigma_star_opa").automaton->a, omega_of("b_omega_dopbea")}};
  for (int i = 0; i < 2; ++i) {
    Opm m = random_opm(rng, 2);
    pairs.push_back({random_automaton<Opa>(rng, m, 3, 0.4), random_automaton<OmegaOpa>(rng, m, 3, 0.4)});
  }
  std::ostringstream sizes;
  for (const auto& [a1, a2] : pairs) {
    auto c = concat(a1, a2);
    auto q1 = static_cast<std::size_t>(classical_to_variant(a1).automaton.num_states());
    auto q2 = static_cast<std::size_t>(a2.num_states());
    auto sigma = static_cast<std::size_t>(c.opm().size());
    std::size_t bound = q1 + (sigma + 1) * q2 * (q2 + 1);
    o.check(static_cast<std::size_t>(c.num_states()) <= bound, "concat exceeds bound");
    sizes << " " << c.num_states() << "<=" << bound;
  }
  if (o.ok) o.detail << "variant size exact on 6 automata; concat" << sizes.str();
  return o;
}

Outcome complementation() {
  Outcome o;
  std::mt19937 rng(4242);
  std::vector<std::pair<std::string, OmegaOpa>> cases;
  cases.emplace_back("L1", to_buchi_final(omega_of("L1_bfae")));
  cases.emplace_back("interrupts", omega_of("interrupts"));
  cases.emplace_back("random", random_automaton<OmegaOpa>(rng, random_opm(rng, 2), 3, 0.35));
  std::size_t total = 0;
  for (const auto& [name, a] : cases) {
    // lazy: the random case's product is too large to materialize
    auto c = complement_view(a);
    auto u = unite(make_view(to_buchi_final(a)), c);
    std::optional<OmegaOpa> mat;
    if (name != "random") mat = complement(a);
    auto lassos = sample_lassos(rng, a.opm(), 40);
    o.check(lassos.size() >= 30, name + ": too few lassos");
    for (const auto& l : lassos) {
      bool in = accepts_lasso(a, l), out = accepts_lasso(c, l);
      o.check(in != out, name + ": both or neither accept " + format_lasso(a.opm(), l));
      o.check(accepts_lasso(u, l), name + ": union misses " + format_lasso(a.opm(), l));
      if (mat) o.check(accepts_lasso(*mat, l) == out, name + ": materialized complement disagrees on " + format_lasso(a.opm(), l));
      ++total;
    }
  }
  auto univ = universe(omega_of("interrupts").opm());
  o.check(is_empty_omega(complement(univ)).empty, "complement of universe not empty");
  if (o.ok) o.detail << total << " lassos, 0 violations; complement(universe) empty";
  return o;
}

Outcome pseudorun() {
  Outcome o;
  auto a = prepare_for_complement(omega_of("factorization_example"));
  auto reg = std::make_shared<TripleRegistry>();
  auto t = build_pseudorun_transducer(a, reg);
  const Opm& m = a.opm();
  Word w = parse_word(m, "a c b a d b");
  Symbol A = m.symbol("a"), B = m.symbol("b"), C = m.symbol("c"), D = m.symbol("d");
  std::vector<std::string> expect{format_triple_set(a, semisupports(a, kHash, {A, C}, B)), "b",
                                  format_triple_set(a, semisupports(a, B, {A}, D)),
                                  format_triple_set(a, semisupports(a, B, {D}, B)), "b"};
  auto outs = transduce_finite(t, w);
  o.check(outs.size() == 1, "expected one output, got " + std::to_string(outs.size()));
  if (outs.size() == 1) o.check(output_strings(t, *outs.begin()) == expect, "output differs from T(a c) b T(a) T(d) b");

  std::mt19937 rng(99);
  int prefixes = 0;
  std::vector<OmegaOpa> autos{a};
  for (int i = 0; i < 2; ++i) autos.push_back(prepare_for_complement(random_automaton<OmegaOpa>(rng, random_opm(rng, 3), 3, 0.4)));
  for (const auto& x : autos) {
    auto tx = build_pseudorun_transducer(x, std::make_shared<TripleRegistry>());
    int got = 0;
    for (int tries = 0; got < 50 && tries < 5000; ++tries) {
      Word p = random_word(rng, x.opm(), 1 + tries % 8);
      if (compatible_prefix_length(x.opm(), p) != p.size()) continue;
      ++got;
      auto s = transduce_finite(tx, p);
      o.check(s.size() == 1, "prefix '" + format_word(x.opm(), p) + "' gives " + std::to_string(s.size()) + " outputs");
      if (!o.ok) return o;
    }
    prefixes += got;
  }
  if (o.ok) o.detail << "factorization output exact; " << prefixes << " prefixes with a unique output";
  return o;
}

Outcome emptiness_inclusion() {
  Outcome o;
  auto ints = omega_of("interrupts");
  auto e = is_empty_omega(ints);
  o.check(!e.empty && e.witness && accepts_lasso(ints, *e.witness), "interrupts witness");
  auto l1 = to_buchi_final(omega_of("L1_bfae"));
  auto infa = to_buchi_final(omega_of("inf_a_dopbea"));
  o.check(is_empty_omega(intersect(l1, infa)).empty, "L1 and infinitely-many-a intersect");
  auto restricted = omega_of("interrupts_restricted");
  o.check(includes(ints, restricted).included, "restricted not included");
  auto back = includes(restricted, ints);
  o.check(!back.included && back.counterexample, "converse inclusion holds");
  if (back.counterexample) {
    auto cx = *back.counterexample;
    Symbol i0 = back.opm.symbol("int0");
    bool has = false;
    for (Symbol s : cx.prefix) has = has || s == i0;
    for (Symbol s : cx.period) has = has || s == i0;
    auto text = format_lasso(back.opm, cx);
    o.check(has, "counterexample lacks int0");
    auto l = parse_lasso(ints.opm(), text);
    o.check(accepts_lasso(ints, l) && !accepts_lasso(restricted, l), "counterexample does not separate");
    if (o.ok) o.detail << "witness " << format_lasso(ints.opm(), *e.witness) << "; counterexample " << text;
  }
  return o;
}

Outcome hierarchy() {
  Outcome o;
  auto l2 = omega_of("L2_dbfa");
  auto lasso = [](const OmegaOpa& a, const char* u, const char* v) {
    return accepts_lasso(a, parse_lasso(a.opm(), std::string(u) + " ; " + v));
  };
  o.check(lasso(l2, "a a", "a b"), "L2 rejects (aa, ab)");
  o.check(lasso(l2, "a a", "a a b b"), "L2 rejects (aa, aabb)");
  o.check(!lasso(l2, "a", "a b"), "L2 accepts (a, ab)");
  auto l1 = empty_stack_to_final(omega_of("L1_bfae"));
  o.check(lasso(l1, "a", "b"), "L1 rejects (a, b)");
  o.check(!lasso(l1, "", "a b"), "L1 accepts ('', ab)");
  if (o.ok) o.detail << "5 verdicts";
  return o;
}

Outcome saturation() {
  Outcome o;
  int opas = 0, witnesses = 0;
  for (const auto& name : catalog()) {
    auto f = fixture(name);
    if (!f.automaton) continue;
    const Opa& a = f.automaton->a;
    Opa fin = a;
    fin.set_mode(Mode::classical);
    auto e = is_empty_finite(fin);
    bool enum_empty = enumerate_language(fin, 6).empty();
    o.check(e.empty == enum_empty, name + ": finite emptiness disagrees with enumeration");
    if (!e.empty) o.check(e.witness && accepts_finite(fin, *e.witness).accepted, name + ": finite witness rejected");
    ++opas;
    if (f.automaton->omega) {
      auto r = is_empty_omega(f.automaton->a);
      if (!r.empty) {
        o.check(r.witness && accepts_lasso(f.automaton->a, *r.witness), name + ": lasso witness rejected");
        ++witnesses;
      }
    }
  }
  if (o.ok) o.detail << opas << " corpus automata agree; " << witnesses << " lasso witnesses replay";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  // optional: run only the criteria whose numbers are given
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"golden traces", golden_traces},
      {"variant equivalence", variant_equivalence},
      {"state budgets", state_budgets},
      {"complementation XOR", complementation},
      {"pseudorun fidelity", pseudorun},
      {"emptiness and inclusion", emptiness_inclusion},
      {"hierarchy memberships", hierarchy},
      {"saturation soundness", saturation},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    if (!only.empty() && !only.count(n)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s (%.2fs)\n", r.ok ? "PASS" : "FAIL", n, name, r.detail.str().c_str(), secs);
    std::fflush(stdout);
    if (!r.ok) ++failed;
  }
  return failed ? 1 : 0;
}
