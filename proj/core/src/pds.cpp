#include "opal/pds.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <unordered_map>

#include "graph.hpp"
#include "opal/error.hpp"

namespace opal {

namespace {

struct Encoding {
  int n, s;
  int fresh(State q) const { return q; }
  int normal(State q, Symbol c) const { return n + q * (s + 1) + (c + 1); }
  int flushing(State q, Symbol c) const { return n + n * (s + 1) + q * (s + 1) + (c + 1); }
  int controls() const { return n + 2 * n * (s + 1); }
  int entry(Symbol a, bool marked, State saved) const { return 1 + a * (n + 1) + (marked ? 1 + saved : 0); }
  int gammas() const { return 1 + s * (n + 1); }
};

}  // namespace

Pds opa_to_pds(const Opa& a, bool finite) {
  const Opm& m = a.opm();
  Encoding e{a.num_states(), m.size()};
  Pds p;
  p.controls.resize(e.controls());
  p.accepting.assign(e.controls(), false);
  auto cname = [&](Symbol c) { return c == kHash ? std::string("#") : m.name(c); };
  for (State q = 0; q < e.n; ++q) {
    p.controls[e.fresh(q)] = a.state_name(q) + "?";
    p.accepting[e.fresh(q)] = a.is_final(q);
    for (Symbol c = kHash; c < e.s; ++c) {
      p.controls[e.normal(q, c)] = a.state_name(q) + "/" + cname(c);
      p.controls[e.flushing(q, c)] = a.state_name(q) + "!" + cname(c);
      p.accepting[e.normal(q, c)] = a.is_final(q);
    }
  }
  p.gammas.resize(e.gammas());
  p.gammas[0] = "#";
  for (Symbol b = 0; b < e.s; ++b) {
    p.gammas[e.entry(b, false, 0)] = m.name(b);
    for (State q = 0; q < e.n; ++q) p.gammas[e.entry(b, true, q)] = m.name(b) + "*" + a.state_name(q);
  }
  p.bottom = 0;
  p.initial_controls.assign(a.initial().begin(), a.initial().end());
  if (finite)
    for (State q : a.final()) p.goal_controls.push_back(e.normal(q, kHash));

  struct Top {
    int gamma;
    Symbol sym;
    bool marked;
    State saved;
  };
  std::vector<Top> tops{{0, kHash, false, -1}};
  for (Symbol b = 0; b < e.s; ++b) {
    tops.push_back({e.entry(b, false, 0), b, false, -1});
    for (State q = 0; q < e.n; ++q) tops.push_back({e.entry(b, true, q), b, true, q});
  }
  const Symbol first = finite ? kHash : 0;
  for (State q = 0; q < e.n; ++q) {
    for (const auto& t : tops) {
      for (Symbol c = first; c < e.s; ++c) p.rules.push_back({e.fresh(q), t.gamma, e.normal(q, c), {t.gamma}, -1});
      for (Symbol c = first; c < e.s; ++c) {
        if (t.sym == kHash && c == kHash) continue;
        auto r = relation_ext(m, t.sym, c);
        if (!r) continue;
        if (*r == Relation::gt) {
          if (t.marked) {
            for (State y : a.flush_targets(q, t.saved)) p.rules.push_back({e.normal(q, c), t.gamma, e.normal(y, c), {}, -1});
          } else if (t.sym != kHash) {
            p.rules.push_back({e.normal(q, c), t.gamma, e.flushing(q, c), {}, -1});
          }
        } else {
          const bool mark = *r == Relation::lt;
          for (State y : a.push_targets(q, c))
            p.rules.push_back({e.normal(q, c), t.gamma, e.fresh(y), {e.entry(c, mark, mark ? q : 0), t.gamma}, c});
        }
        if (t.sym == kHash) continue;
        if (t.marked) {
          for (State y : a.flush_targets(q, t.saved)) p.rules.push_back({e.flushing(q, c), t.gamma, e.normal(y, c), {}, -1});
        } else {
          p.rules.push_back({e.flushing(q, c), t.gamma, e.flushing(q, c), {}, -1});
        }
      }
    }
  }
  return p;
}

bool PAutomaton::accepts(int control, const std::vector<int>& stack) const {
  StateSet cur{control};
  for (int g : stack) {
    StateSet next;
    for (const auto& t : trans)
      if (t.gamma == g && contains(cur, t.from)) insert_sorted(next, t.to);
    cur = std::move(next);
  }
  for (int q : cur)
    if (final[q]) return true;
  return false;
}

PreStar pre_star(const Pds& p, const PAutomaton& target) {
  PreStar out;
  out.automaton.num_states = std::max(target.num_states, p.num_controls());
  out.automaton.final = target.final;
  out.automaton.final.resize(out.automaton.num_states, false);
  for (const auto& r : p.rules) out.labels.push_back(r.label);

  // rules by right-hand side head
  std::map<std::pair<int, int>, std::vector<int>> by_rhs;
  for (int i = 0; i < static_cast<int>(p.rules.size()); ++i)
    if (!p.rules[i].push.empty()) by_rhs[{p.rules[i].to, p.rules[i].push[0]}].push_back(i);

  std::map<PAutomaton::Trans, int> index;
  std::map<std::pair<int, int>, std::vector<int>> from;  // (state, gamma) -> transitions already in rel
  // derived rules (p1, g1) -> (q', g2), keyed by rhs, with the push rule and its first transition
  struct Derived {
    int p1, g1, rule, t1;
  };
  std::map<std::pair<int, int>, std::vector<Derived>> derived;
  std::deque<int> work;
  auto add = [&](PAutomaton::Trans t, PreStar::Why why) {
    if (index.count(t)) return;
    int id = static_cast<int>(out.automaton.trans.size());
    index.emplace(t, id);
    out.automaton.trans.push_back(t);
    out.why.push_back(why);
    work.push_back(id);
  };
  for (const auto& t : target.trans) add(t, {0});
  for (int i = 0; i < static_cast<int>(p.rules.size()); ++i)
    if (p.rules[i].push.empty()) add({p.rules[i].from, p.rules[i].gamma, p.rules[i].to}, {1, i});

  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    const auto t = out.automaton.trans[id];
    from[{t.from, t.gamma}].push_back(id);
    auto it = by_rhs.find({t.from, t.gamma});
    if (it != by_rhs.end()) {
      for (int ri : it->second) {
        const auto& r = p.rules[ri];
        if (r.push.size() == 1) {
          add({r.from, r.gamma, t.to}, {2, ri, id});
        } else {
          derived[{t.to, r.push[1]}].push_back({r.from, r.gamma, ri, id});
          auto f = from.find({t.to, r.push[1]});
          if (f != from.end())
            for (int t2 : std::vector<int>(f->second))
              add({r.from, r.gamma, out.automaton.trans[t2].to}, {3, ri, id, t2});
        }
      }
    }
    auto d = derived.find({t.from, t.gamma});
    if (d != derived.end())
      for (const auto& dr : std::vector<Derived>(d->second)) add({dr.p1, dr.g1, t.to}, {3, dr.rule, dr.t1, id});
  }
  return out;
}

std::optional<Word> PreStar::witness(int control, const std::vector<int>& stack) const {
  // path through the automaton reading stack
  const auto& A = automaton;
  std::map<std::pair<int, std::size_t>, std::pair<int, int>> parent;  // -> (prev state, trans)
  std::deque<std::pair<int, std::size_t>> work{{control, 0}};
  parent[{control, 0}] = {-1, -1};
  std::optional<std::pair<int, std::size_t>> end;
  while (!work.empty()) {
    auto [q, i] = work.front();
    work.pop_front();
    if (i == stack.size()) {
      if (A.final[q]) {
        end = std::make_pair(q, i);
        break;
      }
      continue;
    }
    for (int ti = 0; ti < static_cast<int>(A.trans.size()); ++ti) {
      const auto& t = A.trans[ti];
      if (t.from != q || t.gamma != stack[i]) continue;
      auto key = std::make_pair(t.to, i + 1);
      if (parent.emplace(key, std::make_pair(q, ti)).second) work.push_back(key);
    }
  }
  if (!end) return std::nullopt;
  std::vector<int> path;
  for (auto cur = *end; parent[cur].second >= 0; cur = {parent[cur].first, cur.second - 1})
    path.push_back(parent[cur].second);
  std::reverse(path.begin(), path.end());
  Word w;
  std::vector<int> todo(path.rbegin(), path.rend());
  while (!todo.empty()) {
    int ti = todo.back();
    todo.pop_back();
    const auto& y = why[ti];
    if (y.kind == 0) continue;
    if (labels[y.rule] >= 0) w.push_back(labels[y.rule]);
    if (y.t2 >= 0) todo.push_back(y.t2);
    if (y.t1 >= 0) todo.push_back(y.t1);
  }
  return w;
}

namespace {

struct HRule {
  int to;
  int g1 = -1;  // -1: pop
  int g2 = -1;  // -1: rewrite
  int label = -1;
};

class RuleSource {
 public:
  virtual ~RuleSource() = default;
  virtual void rules(int ctrl, int gamma, std::vector<HRule>& out) = 0;
  virtual bool accepting(int ctrl, int gamma) = 0;
};

class PdsSource : public RuleSource {
 public:
  PdsSource(const Pds& p, bool empty_stack) : p_(p), empty_stack_(empty_stack) {
    by_head_.resize(static_cast<std::size_t>(p.num_controls()) * p.num_gammas());
    for (int i = 0; i < static_cast<int>(p.rules.size()); ++i)
      by_head_[static_cast<std::size_t>(p.rules[i].from) * p.num_gammas() + p.rules[i].gamma].push_back(i);
  }
  void rules(int ctrl, int gamma, std::vector<HRule>& out) override {
    out.clear();
    for (int i : by_head_[static_cast<std::size_t>(ctrl) * p_.num_gammas() + gamma]) {
      const auto& r = p_.rules[i];
      HRule h{r.to};
      if (!r.push.empty()) h.g1 = r.push[0];
      if (r.push.size() == 2) h.g2 = r.push[1];
      h.label = r.label;
      out.push_back(h);
    }
  }
  bool accepting(int ctrl, int gamma) override {
    return p_.accepting[ctrl] && (!empty_stack_ || gamma == p_.bottom);
  }

 private:
  const Pds& p_;
  bool empty_stack_;
  std::vector<std::vector<int>> by_head_;
};

// Same encoding as opa_to_pds (infinite words), over a lazily explored view.
class ViewSource : public RuleSource {
 public:
  explicit ViewSource(OmegaView& v) : v_(v) { gammas_.push_back({kHash, false, -1}); }

  int control(int kind, State q, Symbol c) {
    auto key = std::make_tuple(kind, q, c);
    auto [it, fresh] = ctrl_index_.emplace(key, static_cast<int>(ctrls_.size()));
    if (fresh) ctrls_.push_back(key);
    return it->second;
  }
  int gamma(Symbol a, bool marked, State saved) {
    auto key = std::make_tuple(a, marked, saved);
    auto [it, fresh] = gamma_index_.emplace(key, static_cast<int>(gammas_.size()));
    if (fresh) gammas_.push_back(key);
    return it->second;
  }

  void rules(int ctrl, int g, std::vector<HRule>& out) override {
    out.clear();
    auto [kind, q, c] = ctrls_[ctrl];
    auto [sym, marked, saved] = gammas_[g];
    const Opm& m = v_.opm();
    if (kind == 0) {
      for (Symbol b = 0; b < m.size(); ++b) out.push_back({control(1, q, b), g, -1, -1});
      return;
    }
    if (kind == 1) {
      auto r = m.get(sym, c);
      if (!r) return;
      if (*r != Relation::gt) {
        const bool mark = *r == Relation::lt;
        v_.push_targets(q, c, buf_);
        int e = gamma(c, mark, mark ? q : -1);
        for (State y : buf_) out.push_back({control(0, y, 0), e, g, c});
        return;
      }
    }
    if (sym == kHash) return;
    if (marked) {
      v_.flush_targets(q, saved, buf_);
      for (State y : buf_) out.push_back({control(1, y, c)});
    } else {
      out.push_back({control(2, q, c)});
    }
  }

  bool accepting(int ctrl, int) override {
    auto [kind, q, c] = ctrls_[ctrl];
    return kind != 2 && v_.is_final(q);
  }

 private:
  OmegaView& v_;
  // fresh controls always use c = 0
  std::map<std::tuple<int, State, Symbol>, int> ctrl_index_;
  std::vector<std::tuple<int, State, Symbol>> ctrls_;
  std::map<std::tuple<Symbol, bool, State>, int> gamma_index_;
  std::vector<std::tuple<Symbol, bool, State>> gammas_;
  StateSet buf_;
};

// Head graph of a pushdown system: nodes are heads (control, top symbol), an edge
// h -> h' when <h> reaches <h' w>, flagged when an accepting head is passed.
class HeadGraph {
 public:
  explicit HeadGraph(RuleSource& src) : src_(src) {}

  int head(int ctrl, int gamma) {
    auto key = (static_cast<long long>(ctrl) << 32) | static_cast<unsigned>(gamma);
    auto [it, fresh] = head_index_.emplace(key, static_cast<int>(heads_.size()));
    if (fresh) {
      heads_.push_back({ctrl, gamma});
      summaries_.emplace_back();
      listeners_.emplace_back();
      succ_.emplace_back();
      pending_heads_.push_back(it->second);
    }
    return it->second;
  }

  void run() {
    std::vector<HRule> rules;
    while (!pending_heads_.empty() || !pending_sums_.empty()) {
      if (!pending_sums_.empty()) {
        int s = pending_sums_.front();
        pending_sums_.pop_front();
        int h = sums_[s].head;
        for (std::size_t i = 0; i < listeners_[h].size(); ++i) fire(listeners_[h][i], s);
        continue;
      }
      int h = pending_heads_.front();
      pending_heads_.pop_front();
      auto [ctrl, gamma] = heads_[h];
      const bool acc = src_.accepting(ctrl, gamma);
      src_.rules(ctrl, gamma, rules);
      for (const auto& r : rules) {
        if (r.g1 < 0) {
          add_summary(h, r.to, acc, {Reason::pop, r.label, -1, -1});
          continue;
        }
        int y = head(r.to, r.g1);
        add_edge(h, y, acc, r.label, -1);
        listen(y, Listener{r.g2 < 0 ? Listener::rew : Listener::push1, h, acc, r.label, r.g2, -1});
      }
    }
  }

  int num_heads() const { return static_cast<int>(heads_.size()); }
  std::pair<int, int> head_at(int h) const { return heads_[h]; }
  const std::vector<int>& successors(int h) const { return succ_[h]; }
  bool edge_bit(int u, int v, bool bit) const {
    auto it = edges_.find({u, v});
    return it != edges_.end() && it->second[bit].present;
  }

  // Heads in a strongly connected component with an internal flagged edge.
  std::vector<bool> repeating(std::vector<int>* comp_out = nullptr) const {
    int count = 0;
    auto comp = detail::scc_ids(num_heads(), [&](int v) -> const std::vector<int>& { return succ_[v]; }, count);
    std::vector<bool> good(count, false);
    for (const auto& [uv, reasons] : edges_)
      if (reasons[1].present && comp[uv.first] == comp[uv.second]) good[comp[uv.first]] = true;
    std::vector<bool> out(num_heads());
    for (int h = 0; h < num_heads(); ++h) out[h] = good[comp[h]];
    if (comp_out) *comp_out = comp;
    return out;
  }

  // Letters consumed along the edge u -> v (with the given flag).
  void edge_word(int u, int v, bool bit, Word& w) const {
    const auto& r = edges_.at({u, v})[bit];
    if (r.label >= 0) w.push_back(r.label);
    if (r.sum >= 0) summary_word(r.sum, w);
  }

 private:
  struct Reason {
    enum Kind { pop, rew, push } kind;
    int label;
    int s1, s2;
  };
  struct Summary {
    int head;
    int ctrl;
    bool bit;
    Reason why;
  };
  struct Listener {
    enum Kind { rew, push1, push2 } kind;
    int src;
    bool bit;
    int label;
    int g2;
    int s1;
  };
  struct EdgeReason {
    bool present = false;
    int label = -1;
    int sum = -1;
  };

  void summary_word(int s, Word& w) const {
    std::vector<int> todo{s};
    while (!todo.empty()) {
      int x = todo.back();
      todo.pop_back();
      const auto& r = sums_[x].why;
      if (r.label >= 0) w.push_back(r.label);
      if (r.s2 >= 0) todo.push_back(r.s2);
      if (r.s1 >= 0) todo.push_back(r.s1);
    }
  }

  void add_summary(int h, int ctrl, bool bit, Reason why) {
    auto key = [&](bool b) { return (static_cast<long long>(h) << 32) | (static_cast<long long>(ctrl) << 1) | b; };
    if (sum_index_.count(key(true))) return;
    if (!bit && sum_index_.count(key(false))) return;
    int s = static_cast<int>(sums_.size());
    sum_index_.emplace(key(bit), s);
    sums_.push_back({h, ctrl, bit, why});
    summaries_[h].push_back(s);
    pending_sums_.push_back(s);
  }

  void add_edge(int u, int v, bool bit, int label, int sum) {
    auto [it, fresh] = edges_.try_emplace({u, v});
    if (fresh) succ_[u].push_back(v);
    auto& r = it->second[bit];
    if (!r.present) r = {true, label, sum};
  }

  void listen(int h, Listener l) {
    listeners_[h].push_back(l);
    for (std::size_t i = 0; i < summaries_[h].size(); ++i) fire(l, summaries_[h][i]);
  }

  void fire(Listener l, int s) {
    const Summary sm = sums_[s];
    switch (l.kind) {
      case Listener::rew:
        add_summary(l.src, sm.ctrl, l.bit || sm.bit, {Reason::rew, l.label, s, -1});
        break;
      case Listener::push1: {
        int y = head(sm.ctrl, l.g2);
        add_edge(l.src, y, l.bit || sm.bit, l.label, s);
        listen(y, Listener{Listener::push2, l.src, l.bit || sm.bit, l.label, -1, s});
        break;
      }
      case Listener::push2:
        add_summary(l.src, sm.ctrl, l.bit || sm.bit, {Reason::push, l.label, l.s1, s});
        break;
    }
  }

  RuleSource& src_;
  std::unordered_map<long long, int> head_index_;
  std::vector<std::pair<int, int>> heads_;
  std::vector<std::vector<int>> summaries_;
  std::vector<std::vector<Listener>> listeners_;
  std::vector<std::vector<int>> succ_;
  std::unordered_map<long long, int> sum_index_;
  std::vector<Summary> sums_;
  std::map<std::pair<int, int>, std::array<EdgeReason, 2>> edges_;
  std::deque<int> pending_heads_, pending_sums_;
};

// Lasso through an accepting cycle, with the stem found breadth-first from the roots.
std::optional<Lasso> find_lasso(const HeadGraph& g, const std::vector<int>& roots) {
  std::vector<int> comp;
  auto rep = g.repeating(&comp);
  const int n = g.num_heads();
  std::vector<int> parent(n, -2);
  std::deque<int> work;
  for (int r : roots)
    if (parent[r] == -2) {
      parent[r] = -1;
      work.push_back(r);
    }
  auto bit_of = [&](int u, int v) { return g.edge_bit(u, v, false) ? false : true; };
  int u = -1, v = -1;
  while (!work.empty() && u < 0) {
    int x = work.front();
    work.pop_front();
    if (rep[x])
      for (int y : g.successors(x))
        if (comp[y] == comp[x] && g.edge_bit(x, y, true)) {
          u = x;
          v = y;
          break;
        }
    if (u >= 0) break;
    for (int y : g.successors(x))
      if (parent[y] == -2) {
        parent[y] = x;
        work.push_back(y);
      }
  }
  if (u < 0) return std::nullopt;
  Lasso l;
  std::vector<int> stem;
  for (int x = u; x >= 0; x = parent[x]) stem.push_back(x);
  std::reverse(stem.begin(), stem.end());
  for (std::size_t i = 0; i + 1 < stem.size(); ++i) g.edge_word(stem[i], stem[i + 1], bit_of(stem[i], stem[i + 1]), l.prefix);
  g.edge_word(u, v, true, l.period);
  // back from v to u inside the component
  std::map<int, int> back{{v, -1}};
  std::deque<int> q{v};
  while (!q.empty() && !back.count(u)) {
    int x = q.front();
    q.pop_front();
    for (int y : g.successors(x))
      if (comp[y] == comp[u] && back.emplace(y, x).second) q.push_back(y);
  }
  std::vector<int> path;
  if (u != v) {
    for (int x = u; x >= 0; x = back[x]) path.push_back(x);
    std::reverse(path.begin(), path.end());
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      g.edge_word(path[i], path[i + 1], bit_of(path[i], path[i + 1]), l.period);
  }
  return l;
}

}  // namespace

std::vector<std::pair<int, int>> repeating_heads(const Pds& p, bool empty_stack) {
  PdsSource src(p, empty_stack);
  HeadGraph g(src);
  for (int c = 0; c < p.num_controls(); ++c)
    for (int gm = 0; gm < p.num_gammas(); ++gm) g.head(c, gm);
  g.run();
  auto rep = g.repeating();
  std::vector<std::pair<int, int>> out;
  for (int h = 0; h < g.num_heads(); ++h)
    if (rep[h]) out.push_back(g.head_at(h));
  std::sort(out.begin(), out.end());
  return out;
}

EmptinessResult is_empty_omega(OmegaView& v) {
  ViewSource src(v);
  HeadGraph g(src);
  std::vector<int> roots;
  for (State q : v.initial()) roots.push_back(g.head(src.control(0, q, 0), 0));
  g.run();
  EmptinessResult r;
  r.heads = static_cast<std::size_t>(g.num_heads());
  r.witness = find_lasso(g, roots);
  r.empty = !r.witness.has_value();
  return r;
}

EmptinessResult is_empty_omega(const OmegaOpa& a) {
  auto v = make_view(a);
  return is_empty_omega(*v);
}

bool is_empty_omega_prestar(const OmegaOpa& a) {
  OmegaOpa b = a.acceptance() == AcceptKind::muller ? muller_to_buchi(a) : a;
  Pds p = opa_to_pds(b, false);
  auto heads = repeating_heads(p, b.acceptance() == AcceptKind::buchi_empty_stack);
  PAutomaton target;
  const int sink = p.num_controls();
  target.num_states = sink + 1;
  target.final.assign(target.num_states, false);
  target.final[sink] = true;
  for (auto [c, g] : heads) target.trans.push_back({c, g, sink});
  for (int g = 0; g < p.num_gammas(); ++g) target.trans.push_back({sink, g, sink});
  auto pre = pre_star(p, target);
  for (int c : p.initial_controls)
    if (pre.automaton.accepts(c, {p.bottom})) return false;
  return true;
}

FiniteEmptiness is_empty_finite(const Opa& a) {
  Pds p = opa_to_pds(a, true);
  PAutomaton target;
  const int acc = p.num_controls();
  target.num_states = acc + 1;
  target.final.assign(target.num_states, false);
  target.final[acc] = true;
  for (int c : p.goal_controls) target.trans.push_back({c, p.bottom, acc});
  auto pre = pre_star(p, target);
  FiniteEmptiness r;
  for (int c : p.initial_controls) {
    auto w = pre.witness(c, {p.bottom});
    if (w) {
      r.empty = false;
      r.witness = std::move(w);
      break;
    }
  }
  return r;
}

}  // namespace opal
