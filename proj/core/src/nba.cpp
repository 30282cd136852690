#include "opal/nba.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "graph.hpp"
#include "opal/error.hpp"

namespace opal {

namespace {
const StateSet kNone;
}

int Nba::add_state(std::string name, bool is_final) {
  states.push_back(std::move(name));
  final.push_back(is_final);
  delta.emplace_back();
  return num_states() - 1;
}

void Nba::add_edge(int q, int sym, int p) {
  if (sym < 0 || sym >= num_symbols) throw ValidationError("NBA edge on an unknown symbol");
  insert_sorted(delta.at(q)[sym], p);
}

const StateSet& Nba::targets(int q, int sym) const {
  auto it = delta.at(q).find(sym);
  return it == delta[q].end() ? kNone : it->second;
}

namespace {

class ExplicitNba : public LazyNba {
 public:
  explicit ExplicitNba(std::shared_ptr<const Nba> n) : n_(std::move(n)) {}
  StateSet initial() override { return n_->initial; }
  bool is_final(int q) override { return n_->final[q]; }
  void successors(int q, int sym, StateSet& out) override { out = n_->targets(q, sym); }
  std::string state_name(int q) override { return n_->states[q]; }

 private:
  std::shared_ptr<const Nba> n_;
};

}  // namespace

NbaPtr as_lazy(std::shared_ptr<const Nba> n) { return std::make_shared<ExplicitNba>(std::move(n)); }

Nba explore(LazyNba& n, int num_symbols, std::vector<std::string> symbol_names) {
  Nba out;
  out.num_symbols = num_symbols;
  out.symbol_names = std::move(symbol_names);
  std::map<int, int> local;
  std::deque<int> work;
  auto id = [&](int q) {
    auto it = local.find(q);
    if (it != local.end()) return it->second;
    int s = out.add_state(n.state_name(q), n.is_final(q));
    local.emplace(q, s);
    work.push_back(q);
    return s;
  };
  for (int q : n.initial()) insert_sorted(out.initial, id(q));
  StateSet buf;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    int lq = local[q];
    for (int a = 0; a < num_symbols; ++a) {
      n.successors(q, a, buf);
      for (int p : StateSet(buf)) out.add_edge(lq, a, id(p));
    }
  }
  return out;
}

Nba nba_product(const Nba& a, const Nba& b) {
  if (a.num_symbols != b.num_symbols) throw InputError("NBA product over different alphabets");
  Nba out;
  out.num_symbols = a.num_symbols;
  out.symbol_names = a.symbol_names;
  std::map<std::tuple<int, int, int>, int> index;
  std::deque<std::tuple<int, int, int>> work;
  auto id = [&](int x, int y, int f) {
    auto key = std::make_tuple(x, y, f);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int s = out.add_state("(" + a.states[x] + "," + b.states[y] + "," + std::to_string(f) + ")",
                          f == 0 && a.final[x]);
    index.emplace(key, s);
    work.push_back(key);
    return s;
  };
  for (int x : a.initial)
    for (int y : b.initial) insert_sorted(out.initial, id(x, y, 0));
  while (!work.empty()) {
    auto [x, y, f] = work.front();
    work.pop_front();
    int from = index[{x, y, f}];
    int nf = (f == 0 && a.final[x]) ? 1 : (f == 1 && b.final[y]) ? 0 : f;
    for (const auto& [sym, tx] : a.delta[x]) {
      const auto& ty = b.targets(y, sym);
      for (int x2 : tx)
        for (int y2 : ty) out.add_edge(from, sym, id(x2, y2, nf));
    }
  }
  return out;
}

namespace {

// Complement states are interned keys:
//   phase one: {0, s1, s2, ...}
//   phase two: {1, r, q1, g1, o1, q2, g2, o2, ...}; {1, -1} is the empty ranking
class RankComplement : public LazyNba {
 public:
  explicit RankComplement(NbaPtr src) : src_(std::move(src)) {}

  StateSet initial() override {
    StateSet init = src_->initial();
    std::vector<int> key{0};
    key.insert(key.end(), init.begin(), init.end());
    if (init.empty()) key = {1, -1};
    return {id(std::move(key))};
  }

  bool is_final(int q) override {
    const auto& k = keys_[q];
    if (k[0] == 0) return false;
    for (std::size_t i = 4; i < k.size(); i += 3)
      if (k[i]) return false;
    return true;
  }

  std::string state_name(int q) override {
    const auto& k = keys_[q];
    std::string s;
    if (k[0] == 0) {
      s = "{";
      for (std::size_t i = 1; i < k.size(); ++i) s += (i > 1 ? "," : "") + src_->state_name(k[i]);
      return s + "}";
    }
    if (k[1] < 0) return "[]";
    s = "[";
    for (std::size_t i = 2; i < k.size(); i += 3)
      s += (i > 2 ? "," : "") + src_->state_name(k[i]) + ":" + std::to_string(k[i + 1]) + (k[i + 2] ? "o" : "");
    return s + "]";
  }

  void successors(int q, int sym, StateSet& out) override {
    out.clear();
    const std::vector<int> k = keys_[q];
    if (k[0] == 1 && k[1] < 0) {
      out.push_back(q);
      return;
    }
    // predecessors and rank bounds of the successor set
    std::map<int, int> bound;   // p -> min rank of a predecessor (phase two) or unbounded
    std::map<int, bool> in_o;   // p reached from O
    StateSet buf;
    if (k[0] == 0) {
      for (std::size_t i = 1; i < k.size(); ++i) {
        src_->successors(k[i], sym, buf);
        for (int p : buf) bound.emplace(p, 1 << 20);
      }
    } else {
      for (std::size_t i = 2; i < k.size(); i += 3) {
        src_->successors(k[i], sym, buf);
        for (int p : buf) {
          auto [it, fresh] = bound.emplace(p, k[i + 1]);
          if (!fresh) it->second = std::min(it->second, k[i + 1]);
          if (k[i + 2]) in_o[p] = true;
        }
      }
    }
    if (bound.empty()) {
      insert_sorted(out, id({1, -1}));
      return;
    }
    std::vector<int> states;
    std::vector<int> bounds;
    std::vector<bool> fin;
    for (const auto& [p, b] : bound) {
      states.push_back(p);
      bounds.push_back(b);
      fin.push_back(src_->is_final(p));
    }
    const bool o_empty = k[0] == 1 && [&] {
      for (std::size_t i = 4; i < k.size(); i += 3)
        if (k[i]) return false;
      return true;
    }();
    auto emit = [&](int r, const std::vector<int>& g, bool breakpoint_reset) {
      std::vector<int> key{1, r};
      for (std::size_t i = 0; i < states.size(); ++i) {
        bool even = g[i] % 2 == 0;
        bool o = breakpoint_reset ? false : (o_empty ? even : (even && in_o.count(states[i]) > 0));
        key.push_back(states[i]);
        key.push_back(g[i]);
        key.push_back(o ? 1 : 0);
      }
      insert_sorted(out, id(std::move(key)));
    };
    if (k[0] == 0) {
      std::vector<int> key{0};
      key.insert(key.end(), states.begin(), states.end());
      insert_sorted(out, id(std::move(key)));
      const int n = static_cast<int>(states.size());
      for (int r = 0; r <= 2 * n - 1; r += (r == 0 ? 1 : 2))
        tight(states.size(), bounds, fin, r, [&](const std::vector<int>& g) { emit(r, g, true); });
    } else {
      int r = k[1];
      tight(states.size(), bounds, fin, r, [&](const std::vector<int>& g) { emit(r, g, false); });
    }
  }

 private:
  // Rankings g with g[i] <= bounds[i], even on finals, max rank r and every odd
  // rank up to r used. r == 0 means all zero.
  template <class F>
  static void tight(std::size_t n, const std::vector<int>& bounds, const std::vector<bool>& fin, int r, F&& f) {
    std::vector<int> g(n, 0);
    const int odd_count = (r + 1) / 2;
    std::vector<int> used(static_cast<std::size_t>(odd_count) + 1, 0);
    int missing = odd_count;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (static_cast<int>(n - i) < missing) return;
      if (i == n) {
        f(g);
        return;
      }
      int hi = std::min(bounds[i], r);
      for (int v = 0; v <= hi; ++v) {
        if (fin[i] && v % 2 == 1) continue;
        g[i] = v;
        bool odd = v % 2 == 1;
        if (odd && used[(v + 1) / 2]++ == 0) --missing;
        rec(i + 1);
        if (odd && --used[(v + 1) / 2] == 0) ++missing;
      }
    };
    rec(0);
  }

  int id(std::vector<int> key) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int s = static_cast<int>(keys_.size());
    index_.emplace(key, s);
    keys_.push_back(std::move(key));
    return s;
  }

  NbaPtr src_;
  std::map<std::vector<int>, int> index_;
  std::vector<std::vector<int>> keys_;
};

}  // namespace

NbaPtr lazy_complement(NbaPtr n) { return std::make_shared<RankComplement>(std::move(n)); }

Nba nba_complement(const Nba& n) {
  auto c = lazy_complement(as_lazy(std::make_shared<Nba>(n)));
  return explore(*c, n.num_symbols, n.symbol_names);
}

bool nba_accepts_lasso(LazyNba& n, const std::vector<int>& prefix, const std::vector<int>& period) {
  if (period.empty()) throw InputError("lasso period must be nonempty");
  std::vector<int> w = prefix;
  w.insert(w.end(), period.begin(), period.end());
  const int len = static_cast<int>(w.size());
  const int loop = static_cast<int>(prefix.size());
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> nodes;
  std::vector<std::vector<int>> succ;
  std::deque<int> work;
  auto id = [&](int q, int i) {
    auto [it, fresh] = index.emplace(std::make_pair(q, i), static_cast<int>(nodes.size()));
    if (fresh) {
      nodes.push_back({q, i});
      succ.emplace_back();
      work.push_back(it->second);
    }
    return it->second;
  };
  for (int q : n.initial()) id(q, 0);
  StateSet buf;
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    auto [q, i] = nodes[v];
    int ni = i + 1 < len ? i + 1 : loop;
    n.successors(q, w[i], buf);
    for (int p : StateSet(buf)) {
      int t = id(p, ni);  // may grow succ
      succ[v].push_back(t);
    }
  }
  int count = 0;
  auto comp = detail::scc_ids(static_cast<int>(nodes.size()), [&](int v) -> const std::vector<int>& { return succ[v]; },
                              count);
  std::vector<bool> good(count, false);
  for (std::size_t v = 0; v < nodes.size(); ++v)
    for (int u : succ[v])
      if (comp[u] == comp[v] && n.is_final(nodes[v].first)) good[comp[v]] = true;
  return std::find(good.begin(), good.end(), true) != good.end();
}

bool nba_accepts_lasso(const Nba& n, const std::vector<int>& prefix, const std::vector<int>& period) {
  auto v = as_lazy(std::make_shared<Nba>(n));
  return nba_accepts_lasso(*v, prefix, period);
}

bool nba_is_empty(const Nba& n) {
  const int m = n.num_states();
  std::vector<std::vector<int>> succ(m);
  for (int q = 0; q < m; ++q)
    for (const auto& [sym, t] : n.delta[q]) succ[q].insert(succ[q].end(), t.begin(), t.end());
  std::vector<bool> reach(m, false);
  std::deque<int> work(n.initial.begin(), n.initial.end());
  for (int q : n.initial) reach[q] = true;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int p : succ[q])
      if (!reach[p]) {
        reach[p] = true;
        work.push_back(p);
      }
  }
  int count = 0;
  auto comp = detail::scc_ids(m, [&](int v) -> const std::vector<int>& { return succ[v]; }, count);
  for (int q = 0; q < m; ++q)
    if (reach[q] && n.final[q])
      for (int p : succ[q])
        if (comp[p] == comp[q]) return false;
  return true;
}

int TripleRegistry::intern(TripleSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  auto it = index_.find(s);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(sets_.size());
  index_.emplace(s, id);
  sets_.push_back(std::move(s));
  return id;
}

std::string format_triple_set(const Opa& a, const TripleSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += "(" + a.state_name(s[i].q) + "," + a.state_name(s[i].p) + "," + (s[i].f ? "1" : "0") + ")";
  }
  return out + "}";
}

PseudorunNba::PseudorunNba(const OmegaOpa& a, std::shared_ptr<TripleRegistry> reg)
    : a_(a), reg_(std::move(reg)), n_(a.num_states()), letters_(a.opm().size()) {
  // Over-approximate the chain edges: a semisupport from q ends in a state
  // reachable from q, and visits a final state only if one is reachable.
  std::vector<std::vector<int>> g(n_);
  for (State q = 0; q < n_; ++q) {
    for (Symbol b = 0; b < letters_; ++b)
      for (State p : a_.push_targets(q, b)) g[q].push_back(p);
    for (const auto& [below, t] : a_.flush_row(q))
      for (State p : t) {
        g[q].push_back(p);
        g[below].push_back(p);
      }
  }
  std::vector<std::vector<bool>> reach(n_, std::vector<bool>(n_, false));
  for (State q = 0; q < n_; ++q) {
    std::deque<int> work(g[q].begin(), g[q].end());
    for (int p : g[q]) reach[q][p] = true;
    while (!work.empty()) {
      int x = work.front();
      work.pop_front();
      for (int y : g[x])
        if (!reach[q][y]) {
          reach[q][y] = true;
          work.push_back(y);
        }
    }
  }
  const int m = 2 * n_;
  std::vector<std::vector<int>> e(m);
  for (State q = 0; q < n_; ++q) {
    std::vector<int> out;
    for (Symbol b = 0; b < letters_; ++b)
      for (State p : a_.push_targets(q, b)) out.push_back(p);
    for (State p = 0; p < n_; ++p) {
      if (!reach[q][p]) continue;
      out.push_back(p);
      for (State f : a_.final())
        if (reach[q][f] && (f == p || reach[f][p])) {
          out.push_back(n_ + p);
          break;
        }
    }
    e[q] = out;
    e[n_ + q] = out;
  }
  int count = 0;
  auto comp = detail::scc_ids(m, [&](int v) -> const std::vector<int>& { return e[v]; }, count);
  std::vector<bool> good(count, false);
  for (int v = 0; v < m; ++v) {
    bool fin = v >= n_ || a_.is_final(v);
    if (!fin) continue;
    for (int u : e[v])
      if (comp[u] == comp[v]) good[comp[v]] = true;
  }
  // live: can reach a good component; components come in reverse topological order
  std::vector<bool> comp_live(count, false);
  std::vector<std::vector<int>> members(count);
  for (int v = 0; v < m; ++v) members[comp[v]].push_back(v);
  for (int c = 0; c < count; ++c) {
    bool l = good[c];
    for (int v : members[c])
      for (int u : e[v])
        if (comp_live[comp[u]]) l = true;
    comp_live[c] = l;
  }
  live_.resize(m);
  for (int v = 0; v < m; ++v) live_[v] = comp_live[comp[v]];
}

StateSet PseudorunNba::initial() {
  StateSet out;
  for (State q : a_.initial())
    if (live_[q]) out.push_back(q);
  return out;
}

bool PseudorunNba::is_final(int q) { return q >= n_ || a_.is_final(q); }

void PseudorunNba::successors(int q, int sym, StateSet& out) {
  out.clear();
  State base = q >= n_ ? q - n_ : q;
  if (sym < letters_) {
    for (State p : a_.push_targets(base, sym))
      if (live_[p]) out.push_back(p);
    return;
  }
  for (const auto& t : reg_->get(sym - letters_)) {
    if (t.q != base) continue;
    int target = t.f ? n_ + t.p : t.p;
    if (live_[target]) insert_sorted(out, target);
  }
}

std::string PseudorunNba::state_name(int q) {
  return q >= n_ ? a_.state_name(q - n_) + "'" : a_.state_name(q);
}

Nba build_pseudorun_nba(const OmegaOpa& a, const TripleRegistry& reg) {
  Nba out;
  const int n = a.num_states();
  const int letters = a.opm().size();
  out.num_symbols = letters + reg.size();
  for (Symbol b = 0; b < letters; ++b) out.symbol_names.push_back(a.opm().name(b));
  for (int i = 0; i < reg.size(); ++i) out.symbol_names.push_back(format_triple_set(a, reg.get(i)));
  for (State q = 0; q < n; ++q) out.add_state(a.state_name(q), a.is_final(q));
  for (State q = 0; q < n; ++q) out.add_state(a.state_name(q) + "'", true);
  out.initial = a.initial();
  for (State q = 0; q < 2 * n; ++q) {
    State base = q % n;
    for (Symbol b = 0; b < letters; ++b)
      for (State p : a.push_targets(base, b)) out.add_edge(q, b, p);
    for (int i = 0; i < reg.size(); ++i)
      for (const auto& t : reg.get(i))
        if (t.q == base) out.add_edge(q, letters + i, t.f ? n + t.p : t.p);
  }
  return out;
}

}  // namespace opal
