#include "opal/opa.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>

#include "opal/error.hpp"

namespace opal {

void insert_sorted(StateSet& s, State q) {
  auto it = std::lower_bound(s.begin(), s.end(), q);
  if (it == s.end() || *it != q) s.insert(it, q);
}

bool contains(const StateSet& s, State q) { return std::binary_search(s.begin(), s.end(), q); }

std::string_view move_name(MoveKind k) {
  switch (k) {
    case MoveKind::push: return "push";
    case MoveKind::mark: return "mark";
    case MoveKind::flush: return "flush";
  }
  return "?";
}

namespace {
const StateSet kNoStates;
}

Opa::Opa(Opm m) : opm_(std::move(m)) {}

State Opa::add_state(std::string name) {
  if (name.empty()) throw ValidationError("empty state name");
  State q = num_states();
  if (!index_.emplace(name, q).second) throw ValidationError("duplicate state '" + name + "'");
  names_.push_back(std::move(name));
  push_.emplace_back(opm_.size());
  flush_.emplace_back();
  return q;
}

State Opa::state(std::string_view name) const {
  auto q = find_state(name);
  if (!q) throw ValidationError("undeclared state '" + std::string(name) + "'");
  return *q;
}

std::optional<State> Opa::find_state(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {
void check_state(const Opa& a, State q) {
  if (q < 0 || q >= a.num_states()) throw ValidationError("state index out of range: " + std::to_string(q));
}
}  // namespace

void Opa::add_initial(State q) {
  check_state(*this, q);
  insert_sorted(initial_, q);
}

void Opa::add_final(State q) {
  check_state(*this, q);
  insert_sorted(final_, q);
}

void Opa::set_final(StateSet f) {
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  for (State q : f) check_state(*this, q);
  final_ = std::move(f);
}

void Opa::add_push(State q, Symbol a, State p) {
  check_state(*this, q);
  check_state(*this, p);
  if (a < 0 || a >= opm_.size()) throw ValidationError("push on a symbol outside the alphabet");
  insert_sorted(push_[q][a], p);
}

void Opa::add_flush(State top, State below, State p) {
  check_state(*this, top);
  check_state(*this, below);
  check_state(*this, p);
  insert_sorted(flush_[top][below], p);
}

const StateSet& Opa::push_targets(State q, Symbol a) const {
  if (a < 0) return kNoStates;
  return push_[q][a];
}

const StateSet& Opa::flush_targets(State top, State below) const {
  const auto& row = flush_[top];
  auto it = row.find(below);
  return it == row.end() ? kNoStates : it->second;
}

std::size_t Opa::push_edge_count() const {
  std::size_t n = 0;
  for (const auto& row : push_)
    for (const auto& t : row) n += t.size();
  return n;
}

std::size_t Opa::flush_edge_count() const {
  std::size_t n = 0;
  for (const auto& row : flush_)
    for (const auto& [below, t] : row) n += t.size();
  return n;
}

bool Opa::is_deterministic() const {
  if (initial_.size() != 1) return false;
  for (const auto& row : push_)
    for (const auto& t : row)
      if (t.size() > 1) return false;
  for (const auto& row : flush_)
    for (const auto& [below, t] : row)
      if (t.size() > 1) return false;
  return true;
}

namespace {

// Forward exploration over frames (state below the topmost marked entry, top state).
// Over-approximates reachability: lookahead and relations are ignored.
std::vector<bool> reachable_states(const Opa& a) {
  const int n = a.num_states();
  std::vector<bool> seen_state(n, false);
  std::set<std::pair<State, State>> frames;
  std::vector<std::set<State>> callers(n), flushed(n);
  std::deque<std::pair<State, State>> work;
  auto add = [&](State s, State q) {
    if (frames.insert({s, q}).second) work.push_back({s, q});
  };
  for (State q : a.initial()) add(-1, q);
  while (!work.empty()) {
    auto [s, q] = work.front();
    work.pop_front();
    seen_state[q] = true;
    for (Symbol b = 0; b < a.opm().size(); ++b) {
      for (State p : a.push_targets(q, b)) {
        add(q, p);
        if (callers[q].insert(s).second)
          for (State y : flushed[q]) add(s, y);
        add(s, p);
      }
    }
    if (s >= 0) {
      for (State y : a.flush_targets(q, s)) {
        if (flushed[s].insert(y).second)
          for (State c : callers[s]) add(c, y);
      }
    }
  }
  return seen_state;
}

}  // namespace

ValidationReport validate(const Opa& a) {
  ValidationReport r;
  auto eq = is_eq_acyclic(a.opm());
  r.eq_acyclic = eq.acyclic;
  r.eq_cycle = eq.cycle;
  r.deterministic = a.is_deterministic();
  auto seen = reachable_states(a);
  for (State q = 0; q < a.num_states(); ++q) (seen[q] ? r.reachable : r.unreachable).push_back(q);
  return r;
}

Opa prune_unreachable(const Opa& a) {
  auto seen = reachable_states(a);
  Opa out(a.opm());
  out.set_mode(a.mode());
  std::vector<State> map(a.num_states(), -1);
  for (State q = 0; q < a.num_states(); ++q)
    if (seen[q]) map[q] = out.add_state(a.state_name(q));
  for (State q : a.initial())
    if (map[q] >= 0) out.add_initial(map[q]);
  for (State q : a.final())
    if (map[q] >= 0) out.add_final(map[q]);
  for (State q = 0; q < a.num_states(); ++q) {
    if (map[q] < 0) continue;
    for (Symbol b = 0; b < a.opm().size(); ++b)
      for (State p : a.push_targets(q, b))
        if (map[p] >= 0) out.add_push(map[q], b, map[p]);
    for (const auto& [below, t] : a.flush_row(q))
      if (map[below] >= 0)
        for (State p : t)
          if (map[p] >= 0) out.add_flush(map[q], map[below], map[p]);
  }
  return out;
}

Configuration initial_configuration(State q) { return Configuration{{{kHash, false, q}}, 0}; }

namespace {

std::optional<Symbol> lookahead(const Word& w, std::size_t pos, bool terminated) {
  if (pos < w.size()) return w[pos];
  if (terminated) return kHash;
  return std::nullopt;
}

// Index of the topmost marked entry, 0 if none.
std::size_t topmost_marked(const std::vector<StackEntry>& st) {
  for (std::size_t i = st.size() - 1; i > 0; --i)
    if (st[i].marked) return i;
  return 0;
}

template <class F>
void for_each_flush(const Opa& a, const std::vector<StackEntry>& st, F&& f) {
  std::size_t i = topmost_marked(st);
  if (i == 0) return;
  for (State p : a.flush_targets(st.back().state, st[i - 1].state)) {
    std::vector<StackEntry> next(st.begin(), st.begin() + static_cast<std::ptrdiff_t>(i));
    next.back().state = p;
    f(std::move(next));
  }
}

}  // namespace

std::vector<Successor> step(const Opa& a, const Configuration& c, const Word& w, bool terminated) {
  std::vector<Successor> out;
  auto la = lookahead(w, c.pos, terminated);
  if (!la) return out;
  const auto& top = c.stack.back();
  if (top.symbol == kHash && *la == kHash) return out;
  auto r = relation_ext(a.opm(), top.symbol, *la);
  if (!r) return out;
  if (*r == Relation::gt) {
    if (a.mode() == Mode::variant && *la == kHash) return out;
    for_each_flush(a, c.stack, [&](std::vector<StackEntry> st) {
      out.push_back({MoveKind::flush, Configuration{std::move(st), c.pos}});
    });
    return out;
  }
  for (State p : a.push_targets(top.state, *la)) {
    Configuration n = c;
    n.stack.push_back({*la, *r == Relation::lt, p});
    ++n.pos;
    out.push_back({*r == Relation::lt ? MoveKind::mark : MoveKind::push, std::move(n)});
  }
  return out;
}

namespace {

template <class Goal>
RunResult search(const Opa& a, const Word& w, bool terminated, Goal&& goal) {
  struct Node {
    Configuration c;
    int parent;
    MoveKind kind;
  };
  std::vector<Node> nodes;
  std::set<Configuration> seen;
  std::deque<int> work;
  for (State q : a.initial()) {
    auto c = initial_configuration(q);
    if (seen.insert(c).second) {
      nodes.push_back({c, -1, MoveKind::push});
      work.push_back(static_cast<int>(nodes.size()) - 1);
    }
  }
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (goal(nodes[id].c)) {
      Trace t;
      std::vector<int> path;
      for (int k = id; k >= 0; k = nodes[k].parent) path.push_back(k);
      std::reverse(path.begin(), path.end());
      t.start = nodes[path[0]].c;
      for (std::size_t k = 1; k < path.size(); ++k) t.moves.push_back({nodes[path[k]].kind, nodes[path[k]].c});
      return {true, std::move(t)};
    }
    for (auto& s : step(a, nodes[id].c, w, terminated)) {
      if (!seen.insert(s.next).second) continue;
      nodes.push_back({std::move(s.next), id, s.kind});
      work.push_back(static_cast<int>(nodes.size()) - 1);
    }
  }
  return {false, std::nullopt};
}

}  // namespace

RunResult accepts_finite(const Opa& a, const Word& w) {
  return search(a, w, true, [&](const Configuration& c) {
    return c.pos == w.size() && c.stack.size() == 1 && a.is_final(c.state());
  });
}

RunResult accepts_variant(const Opa& a, const Word& w) {
  Opa v = a;
  v.set_mode(Mode::variant);
  return search(v, w, true, [&](const Configuration& c) { return c.pos == w.size() && v.is_final(c.state()); });
}

bool accepts(const Opa& a, const Word& w) {
  return a.mode() == Mode::variant ? accepts_variant(a, w).accepted : accepts_finite(a, w).accepted;
}

std::string format_configuration(const Opa& a, const Configuration& c, const Word& w,
                                 const TraceOptions& opt) {
  std::string s;
  for (const auto& e : c.stack) {
    s += '[';
    s += a.opm().name(e.symbol);
    if (e.marked) s += '*';
    s += ',';
    s += a.state_name(e.state);
    s += ']';
  }
  s += " |";
  std::size_t shown = 0;
  for (std::size_t i = c.pos; i < w.size() && shown < opt.lookahead; ++i, ++shown) s += " " + a.opm().name(w[i]);
  if (opt.terminated && shown < opt.lookahead) s += " #";
  return s;
}

std::vector<std::string> format_trace(const Opa& a, const Trace& t, const Word& w, const TraceOptions& opt) {
  std::vector<std::string> out;
  out.push_back("start | " + format_configuration(a, t.start, w, opt));
  for (const auto& m : t.moves)
    out.push_back(std::string(move_name(m.kind)) + " | " + format_configuration(a, m.next, w, opt));
  return out;
}

namespace {

using Stack = std::vector<StackEntry>;

// All stacks reachable by flushes with lookahead la (including the inputs).
std::set<Stack> flush_closure(const Opa& a, const std::set<Stack>& in, Symbol la) {
  std::set<Stack> out = in;
  std::vector<Stack> work(in.begin(), in.end());
  while (!work.empty()) {
    Stack st = std::move(work.back());
    work.pop_back();
    if (relation_ext(a.opm(), st.back().symbol, la) != Relation::gt) continue;
    for_each_flush(a, st, [&](Stack n) {
      if (out.insert(n).second) work.push_back(std::move(n));
    });
  }
  return out;
}

std::set<Stack> advance(const Opa& a, const std::set<Stack>& in, Symbol b) {
  std::set<Stack> out;
  for (const auto& st : flush_closure(a, in, b)) {
    auto r = relation_ext(a.opm(), st.back().symbol, b);
    if (!r || *r == Relation::gt) continue;
    for (State p : a.push_targets(st.back().state, b)) {
      Stack n = st;
      n.push_back({b, *r == Relation::lt, p});
      out.insert(std::move(n));
    }
  }
  return out;
}

bool accepting_now(const Opa& a, const std::set<Stack>& s) {
  if (a.mode() == Mode::variant) {
    for (const auto& st : s)
      if (a.is_final(st.back().state)) return true;
    return false;
  }
  for (const auto& st : flush_closure(a, s, kHash))
    if (st.size() == 1 && a.is_final(st.back().state)) return true;
  return false;
}

void enumerate_rec(const Opa& a, Word& prefix, const std::set<Stack>& s, int n, std::set<Word>& out) {
  if (accepting_now(a, s)) out.insert(prefix);
  if (static_cast<int>(prefix.size()) == n) return;
  for (Symbol b = 0; b < a.opm().size(); ++b) {
    auto next = advance(a, s, b);
    if (next.empty()) continue;
    prefix.push_back(b);
    enumerate_rec(a, prefix, next, n, out);
    prefix.pop_back();
  }
}

void compatible_rec(const Opm& m, Word& prefix, int n, std::vector<Word>& out) {
  if (compatible_finite(m, prefix)) out.push_back(prefix);
  if (static_cast<int>(prefix.size()) == n) return;
  for (Symbol b = 0; b < m.size(); ++b) {
    prefix.push_back(b);
    if (compatible_prefix_length(m, prefix) == prefix.size()) compatible_rec(m, prefix, n, out);
    prefix.pop_back();
  }
}

}  // namespace

int default_enum_cap() {
  if (const char* v = std::getenv("OPAL_MAX_ENUM")) {
    char* end = nullptr;
    long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n > 0 && n < 64) return static_cast<int>(n);
  }
  return 8;
}

std::set<Word> enumerate_language(const Opa& a, int n, int cap) {
  if (n > cap)
    throw InputError("enumeration bound " + std::to_string(n) + " exceeds the cap " + std::to_string(cap));
  std::set<Stack> init;
  for (State q : a.initial()) init.insert(Stack{{kHash, false, q}});
  std::set<Word> out;
  Word prefix;
  enumerate_rec(a, prefix, init, n, out);
  return out;
}

std::vector<Word> compatible_words(const Opm& m, int n) {
  std::vector<Word> out;
  Word prefix;
  compatible_rec(m, prefix, n, out);
  return out;
}

std::set<Word> transduce_finite(const Transducer& t, const Word& w) {
  const Opa& a = t.base;
  bool variant = a.mode() == Mode::variant;
  std::set<std::pair<Configuration, Word>> seen;
  std::deque<std::pair<Configuration, Word>> work;
  std::set<Word> out;
  for (State q : a.initial()) {
    std::pair<Configuration, Word> n{initial_configuration(q), {}};
    if (seen.insert(n).second) work.push_back(n);
  }
  auto emit = [](Word& o, const auto& table, const auto& key) {
    auto it = table.find(key);
    if (it != table.end()) o.insert(o.end(), it->second.begin(), it->second.end());
  };
  while (!work.empty()) {
    auto [c, o] = std::move(work.front());
    work.pop_front();
    bool done = c.pos == w.size() && a.is_final(c.state()) && (variant || c.stack.size() == 1);
    if (done) out.insert(o);
    for (auto& s : step(a, c, w, true)) {
      Word o2 = o;
      if (s.kind == MoveKind::flush) {
        State below = c.stack[s.next.stack.size() - 1].state;
        emit(o2, t.flush_output, std::make_tuple(c.state(), below, s.next.state()));
      } else {
        emit(o2, t.push_output, std::make_tuple(c.state(), s.next.stack.back().symbol, s.next.state()));
      }
      std::pair<Configuration, Word> n{std::move(s.next), std::move(o2)};
      if (seen.insert(n).second) work.push_back(std::move(n));
    }
  }
  return out;
}

VariantConstruction classical_to_variant(const Opa& a1) {
  const Opm& m = a1.opm();
  const int n = m.size();
  const int s = a1.num_states();
  Opa a2(m);
  a2.set_mode(Mode::variant);
  static const char* kind_name[3] = {"B", "Z", "U"};
  enum { B = 0, Z = 1, U = 2 };
  // state id = ((x * (n+1) + (a+1)) * s + q) * s + p
  auto id = [&](int x, Symbol a, State q, State p) { return ((x * (n + 1) + (a + 1)) * s + q) * s + p; };
  for (int x = 0; x < 3; ++x)
    for (Symbol a = kHash; a < n; ++a)
      for (State q = 0; q < s; ++q)
        for (State p = 0; p < s; ++p)
          a2.add_state(std::string("<") + kind_name[x] + "," + m.name(a) + "," + a1.state_name(q) + "," +
                       a1.state_name(p) + ">");
  for (State q : a1.initial())
    for (State f : a1.final()) {
      a2.add_initial(id(Z, kHash, q, f));
      a2.add_initial(id(B, kHash, q, f));
    }
  for (Symbol a = kHash; a < n; ++a)
    for (State q = 0; q < s; ++q) a2.add_final(id(Z, a, q, q));

  // flush_into[q][p]: states s with p in delta_flush(s, q)
  std::vector<std::vector<StateSet>> flush_into(s, std::vector<StateSet>(s));
  for (State top = 0; top < s; ++top)
    for (const auto& [below, t] : a1.flush_row(top))
      for (State p : t) insert_sorted(flush_into[below][p], top);

  for (Symbol a = kHash; a < n; ++a)
    for (State q = 0; q < s; ++q)
      for (State p = 0; p < s; ++p)
        for (Symbol b = 0; b < n; ++b) {
          const auto& rs = a1.push_targets(q, b);
          if (rs.empty()) continue;
          auto rel = relation_ext(m, a, b);
          for (State r : rs) {
            if (rel == Relation::lt)
              for (State t : flush_into[q][p])
                for (int x = 0; x < 3; ++x) a2.add_push(id(Z, a, q, p), b, id(x, b, r, t));
            if (rel == Relation::eq)
              for (int x = 0; x < 3; ++x) a2.add_push(id(U, a, q, p), b, id(x, b, r, p));
            a2.add_push(id(B, a, q, p), b, id(B, b, r, p));
          }
        }
  for (State q = 0; q < s; ++q)
    for (const auto& [p, rs] : a1.flush_row(q))
      for (State r : rs)
        for (Symbol b = kHash; b < n; ++b)
          for (Symbol c = kHash; c < n; ++c)
            for (State t = 0; t < s; ++t)
              for (int x = 0; x < 3; ++x) a2.add_flush(id(B, b, q, t), id(B, c, p, t), id(x, c, r, t));
  VariantConstruction out;
  out.unpruned_states = static_cast<std::size_t>(a2.num_states());
  out.automaton = prune_unreachable(a2);
  return out;
}

VariantConstruction variant_to_classical(const Opa& a2) {
  const Opm& m = a2.opm();
  const int n = m.size();
  const int s = a2.num_states();
  Opa a1(m);
  a1.set_mode(Mode::classical);
  auto id = [&](Symbol a, State q, Symbol c) { return ((a + 1) * s + q) * (n + 1) + (c + 1); };
  for (Symbol a = kHash; a < n; ++a)
    for (State q = 0; q < s; ++q)
      for (Symbol c = kHash; c < n; ++c)
        a1.add_state("<" + m.name(a) + "," + a2.state_name(q) + "," + m.name(c) + ">");
  const State acc = a1.add_state("q_accept");
  a1.add_final(acc);
  bool eps = false;
  for (State q : a2.initial())
    for (Symbol c = kHash; c < n; ++c)
      if (relation_ext(m, kHash, c)) {
        a1.add_initial(id(kHash, q, c));
        if (c == kHash && a2.is_final(q)) eps = true;
      }
  if (eps) a1.add_initial(acc);

  for (Symbol a = kHash; a < n; ++a)
    for (State q = 0; q < s; ++q)
      for (Symbol b = 0; b < n; ++b) {
        auto r = relation_ext(m, a, b);
        if (!r || *r == Relation::gt) continue;
        for (State p : a2.push_targets(q, b))
          for (Symbol c = kHash; c < n; ++c)
            if (relation_ext(m, b, c)) a1.add_push(id(a, q, b), b, id(b, p, c));
      }
  for (State q1 = 0; q1 < s; ++q1)
    for (const auto& [q2, t] : a2.flush_row(q1))
      for (State q3 : t)
        for (Symbol a1s = 0; a1s < n; ++a1s)
          for (Symbol a2s = 0; a2s < n; ++a2s) {
            if (m.get(a1s, a2s) != Relation::gt) continue;
            for (Symbol b1 = kHash; b1 < n; ++b1) {
              if (!relation_ext(m, b1, a2s)) continue;
              for (Symbol b2 = 0; b2 < n; ++b2)
                a1.add_flush(id(a1s, q1, a2s), id(b1, q2, b2), id(b1, q3, a2s));
            }
          }
  // final states of the enriched automaton, and q_accept, flush into q_accept
  std::vector<State> finals{acc};
  for (Symbol a = kHash; a < n; ++a)
    for (State q : a2.final()) finals.push_back(id(a, q, kHash));
  for (State f : finals)
    for (State p = 0; p < acc; ++p) a1.add_flush(f, p, acc);
  VariantConstruction out;
  out.unpruned_states = static_cast<std::size_t>(a1.num_states());
  out.automaton = prune_unreachable(a1);
  return out;
}

}  // namespace opal
