#include "opal/closures.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <tuple>

#include "opal/error.hpp"
#include "opal/pds.hpp"

namespace opal {

namespace {

std::vector<Symbol> symbol_map(const Opm& merged, const Opm& part) {
  std::vector<Symbol> out(merged.size(), -1);
  for (Symbol s = 0; s < merged.size(); ++s)
    if (auto p = part.find(merged.name(s))) out[s] = *p;
  return out;
}

std::string sym_name(const Opm& m, Symbol s) { return s == kHash ? std::string("#") : m.name(s); }

// Interning table for tuple-shaped lazy states.
template <class Key>
class Interner {
 public:
  std::pair<State, bool> id(const Key& k) {
    auto [it, fresh] = index_.emplace(k, static_cast<State>(keys_.size()));
    if (fresh) keys_.push_back(k);
    return {it->second, fresh};
  }
  const Key& operator[](State q) const { return keys_[q]; }

 private:
  std::map<Key, State> index_;
  std::vector<Key> keys_;
};

class IntersectView : public OmegaView {
 public:
  IntersectView(ViewPtr a, ViewPtr b) : a_(std::move(a)), b_(std::move(b)) {
    auto alpha = merge_alphabets(a_->opm().alphabet(), b_->opm().alphabet());
    Opm ea = embed(a_->opm(), alpha), eb = embed(b_->opm(), alpha);
    opm_union(ea, eb);  // throws on conflicting cells
    m_ = opm_intersection(ea, eb);
    ma_ = symbol_map(m_, a_->opm());
    mb_ = symbol_map(m_, b_->opm());
  }
  const Opm& opm() const override { return m_; }
  StateSet initial() override {
    StateSet out;
    for (State x : a_->initial())
      for (State y : b_->initial()) insert_sorted(out, id(x, y, 0));
    return out;
  }
  bool is_final(State q) override {
    auto [x, y, f] = keys_[q];
    return f == 0 && a_->is_final(x);
  }
  void push_targets(State q, Symbol s, StateSet& out) override {
    out.clear();
    if (ma_[s] < 0 || mb_[s] < 0) return;
    auto [x, y, f] = keys_[q];
    StateSet tx, ty;
    a_->push_targets(x, ma_[s], tx);
    if (tx.empty()) return;
    b_->push_targets(y, mb_[s], ty);
    int nf = next_flag(x, y, f);
    for (State x2 : tx)
      for (State y2 : ty) insert_sorted(out, id(x2, y2, nf));
  }
  void flush_targets(State top, State below, StateSet& out) override {
    out.clear();
    auto [xt, yt, f] = keys_[top];
    auto [xb, yb, fb] = keys_[below];
    StateSet tx, ty;
    a_->flush_targets(xt, xb, tx);
    if (tx.empty()) return;
    b_->flush_targets(yt, yb, ty);
    int nf = next_flag(xt, yt, f);
    for (State x2 : tx)
      for (State y2 : ty) insert_sorted(out, id(x2, y2, nf));
  }
  std::string state_name(State q) override {
    auto [x, y, f] = keys_[q];
    return "(" + a_->state_name(x) + "," + b_->state_name(y) + "," + std::to_string(f) + ")";
  }

 private:
  int next_flag(State x, State y, int f) {
    if (f == 0 && a_->is_final(x)) return 1;
    if (f == 1 && b_->is_final(y)) return 0;
    return f;
  }
  State id(State x, State y, int f) { return keys_.id({x, y, f}).first; }

  ViewPtr a_, b_;
  Opm m_;
  std::vector<Symbol> ma_, mb_;
  Interner<std::tuple<State, State, int>> keys_;
};

// Explicit automaton over a matrix with more cells, moving only where its own
// matrix has an entry: states (q, top symbol, guessed lookahead).
class NormalizedView : public OmegaView {
 public:
  NormalizedView(const OmegaOpa& a, const Opm& m) : a_(a), m_(m), map_(symbol_map(m, a.opm())) {}
  const Opm& opm() const override { return m_; }
  StateSet initial() override {
    StateSet out;
    for (State q : a_.initial())
      for (Symbol c = 0; c < m_.size(); ++c) insert_sorted(out, keys_.id({q, kHash, c}).first);
    return out;
  }
  bool is_final(State q) override { return a_.is_final(std::get<0>(keys_[q])); }
  void push_targets(State s, Symbol b, StateSet& out) override {
    out.clear();
    auto [q, t, c] = keys_[s];
    if (b != c || map_[b] < 0) return;
    auto r = own(t, b);
    if (!r || *r == Relation::gt) return;
    for (State p : a_.push_targets(q, map_[b]))
      for (Symbol c2 = 0; c2 < m_.size(); ++c2) insert_sorted(out, keys_.id({p, b, c2}).first);
  }
  void flush_targets(State top, State below, StateSet& out) override {
    out.clear();
    auto [q, t, c] = keys_[top];
    auto [qb, tb, cb] = keys_[below];
    if (own(t, c) != Relation::gt) return;
    for (State p : a_.flush_targets(q, qb)) insert_sorted(out, keys_.id({p, tb, c}).first);
  }
  std::string state_name(State s) override {
    auto [q, t, c] = keys_[s];
    return "(" + a_.state_name(q) + "," + sym_name(m_, t) + "," + m_.name(c) + ")";
  }

 private:
  std::optional<Relation> own(Symbol t, Symbol c) const {
    if (map_[c] < 0) return std::nullopt;
    if (t != kHash && map_[t] < 0) return std::nullopt;
    return a_.opm().get(t == kHash ? kHash : map_[t], map_[c]);
  }
  OmegaOpa a_;
  Opm m_;
  std::vector<Symbol> map_;
  Interner<std::tuple<State, Symbol, Symbol>> keys_;
};

// Same automaton, symbols renamed into a larger alphabet.
class EmbeddedView : public OmegaView {
 public:
  EmbeddedView(const OmegaOpa& a, const Opm& m) : a_(a), m_(m), map_(symbol_map(m, a.opm())) {}
  const Opm& opm() const override { return m_; }
  StateSet initial() override { return a_.initial(); }
  bool is_final(State q) override { return a_.is_final(q); }
  void push_targets(State q, Symbol b, StateSet& out) override {
    out.clear();
    if (map_[b] >= 0) out = a_.push_targets(q, map_[b]);
  }
  void flush_targets(State top, State below, StateSet& out) override { out = a_.flush_targets(top, below); }
  std::string state_name(State q) override { return a_.state_name(q); }

 private:
  OmegaOpa a_;
  Opm m_;
  std::vector<Symbol> map_;
};

class DisjointView : public OmegaView {
 public:
  DisjointView(ViewPtr a, ViewPtr b, const Opm& m) : side_{std::move(a), std::move(b)}, m_(m) {}
  const Opm& opm() const override { return m_; }
  StateSet initial() override {
    StateSet out;
    for (int i = 0; i < 2; ++i)
      for (State q : side_[i]->initial()) insert_sorted(out, id(i, q));
    return out;
  }
  bool is_final(State q) override {
    auto [i, x] = keys_[q];
    return side_[i]->is_final(x);
  }
  void push_targets(State q, Symbol b, StateSet& out) override {
    auto [i, x] = keys_[q];
    StateSet t;
    side_[i]->push_targets(x, b, t);
    out.clear();
    for (State y : t) insert_sorted(out, id(i, y));
  }
  void flush_targets(State top, State below, StateSet& out) override {
    auto [i, x] = keys_[top];
    auto [j, y] = keys_[below];
    out.clear();
    if (i != j) return;
    StateSet t;
    side_[i]->flush_targets(x, y, t);
    for (State z : t) insert_sorted(out, id(i, z));
  }
  std::string state_name(State q) override {
    auto [i, x] = keys_[q];
    return std::to_string(i + 1) + ":" + side_[i]->state_name(x);
  }

 private:
  State id(int i, State q) { return keys_.id({i, q}).first; }
  ViewPtr side_[2];
  Opm m_;
  Interner<std::pair<int, State>> keys_;
};

class ProductUnionView : public OmegaView {
 public:
  ProductUnionView(const OmegaOpa& a, const OmegaOpa& b, const Opm& m)
      : a_(a), b_(b), m_(m), ma_(symbol_map(m, a.opm())), mb_(symbol_map(m, b.opm())) {}
  const Opm& opm() const override { return m_; }
  StateSet initial() override {
    StateSet out;
    for (State x : a_.initial())
      for (State y : b_.initial()) insert_sorted(out, keys_.id({x, y}).first);
    return out;
  }
  bool is_final(State q) override {
    auto [x, y] = keys_[q];
    return a_.is_final(x) || b_.is_final(y);
  }
  void push_targets(State q, Symbol s, StateSet& out) override {
    out.clear();
    auto [x, y] = keys_[q];
    for (State x2 : a_.push_targets(x, ma_[s]))
      for (State y2 : b_.push_targets(y, mb_[s])) insert_sorted(out, keys_.id({x2, y2}).first);
  }
  void flush_targets(State top, State below, StateSet& out) override {
    out.clear();
    auto [x, y] = keys_[top];
    auto [xb, yb] = keys_[below];
    for (State x2 : a_.flush_targets(x, xb))
      for (State y2 : b_.flush_targets(y, yb)) insert_sorted(out, keys_.id({x2, y2}).first);
  }
  std::string state_name(State q) override {
    auto [x, y] = keys_[q];
    return "(" + a_.state_name(x) + "," + b_.state_name(y) + ")";
  }

 private:
  OmegaOpa a_, b_;
  Opm m_;
  std::vector<Symbol> ma_, mb_;
  Interner<std::pair<State, State>> keys_;
};

// States: Q'1 (kind 0) and <a, p, r> with r = -1 for '-' (kind 1).
class ConcatView : public OmegaView {
 public:
  ConcatView(const Opa& a1, const OmegaOpa& a2, const Opm& m, bool eps)
      : a1_(a1), a2_(a2), m_(m), m1_(symbol_map(m, a1.opm())), m2_(symbol_map(m, a2.opm())), eps_(eps) {}
  const Opm& opm() const override { return m_; }
  StateSet initial() override {
    StateSet out;
    for (State q : a1_.initial()) insert_sorted(out, id({0, q, 0, 0}));
    if (eps_) enter(out);
    return out;
  }
  bool is_final(State q) override {
    const auto& k = keys_[q];
    return k[0] == 1 && a2_.is_final(k[2]);
  }
  void push_targets(State q, Symbol c, StateSet& out) override {
    out.clear();
    const auto k = keys_[q];
    if (k[0] == 0) {
      if (m1_[c] < 0) return;
      bool accept = false;
      for (State p : a1_.push_targets(k[1], m1_[c])) {
        insert_sorted(out, id({0, p, 0, 0}));
        accept = accept || a1_.is_final(p);
      }
      if (accept) enter(out);
      return;
    }
    if (m2_[c] < 0) return;
    auto r = m_.get(k[1], c);
    if (!r || *r == Relation::gt) return;
    State keep = *r == Relation::lt ? k[2] : k[3];
    for (State p : a2_.push_targets(k[2], m2_[c])) insert_sorted(out, id({1, c, p, keep}));
  }
  void flush_targets(State top, State below, StateSet& out) override {
    out.clear();
    const auto t = keys_[top];
    const auto b = keys_[below];
    if (t[0] == 0) {
      if (b[0] == 0)
        for (State p : a1_.flush_targets(t[1], b[1])) insert_sorted(out, id({0, p, 0, 0}));
      return;
    }
    if (t[1] == kHash) {
      if (b[0] == 0) insert_sorted(out, top);
      return;
    }
    if (b[0] == 1) {
      if (t[3] != b[2]) return;
      for (State p : a2_.flush_targets(t[2], b[2])) insert_sorted(out, id({1, b[1], p, b[3]}));
      return;
    }
    if (t[3] < 0) return;
    for (State s : a2_.flush_targets(t[2], t[3])) insert_sorted(out, id({1, kHash, s, -1}));
  }
  std::string state_name(State q) override {
    const auto& k = keys_[q];
    if (k[0] == 0) return a1_.state_name(k[1]);
    return "<" + sym_name(m_, k[1]) + "," + a2_.state_name(k[2]) + "," + (k[3] < 0 ? "-" : a2_.state_name(k[3])) +
           ">";
  }

 private:
  void enter(StateSet& out) {
    for (State p0 : a2_.initial()) insert_sorted(out, id({1, kHash, p0, -1}));
  }
  State id(std::array<int, 4> k) { return keys_.id(k).first; }

  Opa a1_;
  OmegaOpa a2_;
  Opm m_;
  std::vector<Symbol> m1_, m2_;
  bool eps_;
  Interner<std::array<int, 4>> keys_;
};

// The pseudorun transducer B. Stack-state second components: Z, bottom (⊥), or a
// triple set (r, q, ν): state before the last mark, current state, final seen.
class PseudorunMachine {
 public:
  static constexpr int kZ = -2;
  static constexpr int kBot = -1;

  PseudorunMachine(const OmegaOpa& a, std::shared_ptr<TripleRegistry> out)
      : a_(a), out_(std::move(out)), letters_(a.opm().size()) {}

  const OmegaOpa& automaton() const { return a_; }
  const Opm& opm() const { return a_.opm(); }
  StateSet initial() { return {id(kHash, kBot), id(kHash, kZ)}; }
  bool is_final(State q) const { return keys_[q].second < 0; }

  // (target, output symbol or -1)
  using Moves = std::vector<std::pair<State, int>>;

  void push(State q, Symbol b, Moves& out) {
    out.clear();
    auto [a, k] = keys_[q];
    if (k == kZ) {
      out.push_back({id(b, kBot), b});
      out.push_back({id(b, kZ), b});
      return;
    }
    auto r = a_.opm().get(a, b);
    if (!r || *r == Relation::gt) return;
    TripleSet s;
    if (k == kBot) {
      if (*r != Relation::lt) return;
      for (State q0 = 0; q0 < a_.num_states(); ++q0)
        for (State p : a_.push_targets(q0, b)) s.push_back({q0, p, a_.is_final(p)});
    } else {
      for (const auto& t : sets_.get(k))
        for (State p : a_.push_targets(t.p, b)) {
          if (*r == Relation::lt)
            s.push_back({t.p, p, a_.is_final(p)});
          else
            s.push_back({t.q, p, t.f || a_.is_final(p)});
        }
    }
    out.push_back({id(b, sets_.intern(std::move(s))), -1});
  }

  void flush(State top, State below, Moves& out) {
    out.clear();
    auto [b, kt] = keys_[top];
    auto [a, kb] = keys_[below];
    if (kt < 0 || kb == kZ) return;
    const auto& t = sets_.get(kt);
    TripleSet r;
    if (kb == kBot) {
      for (const auto& x : t)
        for (State p : a_.flush_targets(x.p, x.q)) r.push_back({x.q, p, x.f || a_.is_final(p)});
      int sym = letters_ + out_->intern(std::move(r));
      out.push_back({id(a, kBot), sym});
      out.push_back({id(a, kZ), sym});
      return;
    }
    for (const auto& x : t)
      for (const auto& y : sets_.get(kb)) {
        if (y.p != x.q) continue;
        for (State p : a_.flush_targets(x.p, x.q)) r.push_back({y.q, p, x.f || y.f || a_.is_final(p)});
      }
    out.push_back({id(a, sets_.intern(std::move(r))), -1});
  }

  std::string state_name(State q) const {
    auto [a, k] = keys_[q];
    std::string s = "<" + sym_name(a_.opm(), a) + ",";
    if (k == kZ) return s + "Z>";
    if (k == kBot) return s + "_|_>";
    return s + format_triple_set(a_, sets_.get(k)) + ">";
  }

 private:
  State id(Symbol a, int k) { return keys_.id({a, k}).first; }

  OmegaOpa a_;
  std::shared_ptr<TripleRegistry> out_;
  int letters_;
  TripleRegistry sets_;
  Interner<std::pair<Symbol, int>> keys_;
};

class MachineView : public OmegaView {
 public:
  explicit MachineView(PseudorunMachine& m) : m_(m) {}
  const Opm& opm() const override { return m_.opm(); }
  StateSet initial() override { return m_.initial(); }
  bool is_final(State q) override { return m_.is_final(q); }
  void push_targets(State q, Symbol b, StateSet& out) override {
    m_.push(q, b, moves_);
    out.clear();
    for (auto [p, o] : moves_) insert_sorted(out, p);
  }
  void flush_targets(State top, State below, StateSet& out) override {
    m_.flush(top, below, moves_);
    out.clear();
    for (auto [p, o] : moves_) insert_sorted(out, p);
  }
  std::string state_name(State q) override { return m_.state_name(q); }

 private:
  PseudorunMachine& m_;
  PseudorunMachine::Moves moves_;
};

// B × complement(A_R); the NBA component advances on every nonempty output.
class ComplementView : public OmegaView {
 public:
  explicit ComplementView(const OmegaOpa& prepared)
      : reg_(std::make_shared<TripleRegistry>()),
        b_(prepared, reg_),
        nba_(std::make_shared<PseudorunNba>(prepared, reg_)),
        comp_(lazy_complement(nba_)) {}

  const Opm& opm() const override { return b_.opm(); }
  StateSet initial() override {
    StateSet out;
    for (State x : b_.initial())
      for (int y : comp_->initial()) insert_sorted(out, id(x, y, 0));
    return out;
  }
  bool is_final(State q) override {
    auto [x, y, f] = keys_[q];
    return f == 0 && b_.is_final(x);
  }
  void push_targets(State q, Symbol s, StateSet& out) override {
    auto [x, y, f] = keys_[q];
    b_.push(x, s, moves_);
    emit(x, y, f, out);
  }
  void flush_targets(State top, State below, StateSet& out) override {
    auto [x, y, f] = keys_[top];
    b_.flush(x, std::get<0>(keys_[below]), moves_);
    emit(x, y, f, out);
  }
  std::string state_name(State q) override {
    auto [x, y, f] = keys_[q];
    return "(" + b_.state_name(x) + "," + comp_->state_name(y) + "," + std::to_string(f) + ")";
  }

 private:
  void emit(State x, int y, int f, StateSet& out) {
    out.clear();
    int nf = f;
    if (f == 0 && b_.is_final(x))
      nf = 1;
    else if (f == 1 && comp_->is_final(y))
      nf = 0;
    const auto moves = moves_;
    StateSet ys;
    for (auto [x2, o] : moves) {
      if (o < 0) {
        insert_sorted(out, id(x2, y, nf));
        continue;
      }
      comp_->successors(y, o, ys);
      for (int y2 : StateSet(ys)) insert_sorted(out, id(x2, y2, nf));
    }
  }
  State id(State x, int y, int f) { return keys_.id({x, y, f}).first; }

  std::shared_ptr<TripleRegistry> reg_;
  PseudorunMachine b_;
  std::shared_ptr<PseudorunNba> nba_;
  NbaPtr comp_;
  PseudorunMachine::Moves moves_;
  Interner<std::tuple<State, int, int>> keys_;
};

}  // namespace

OmegaOpa universe(const Opm& m) {
  OmegaOpa out(m, AcceptKind::buchi_final);
  State u = out.add_state("u");
  out.add_initial(u);
  out.add_final(u);
  for (Symbol b = 0; b < m.size(); ++b) out.add_push(u, b, u);
  out.add_flush(u, u, u);
  return out;
}

ViewPtr intersect(ViewPtr a, ViewPtr b) { return std::make_shared<IntersectView>(std::move(a), std::move(b)); }

OmegaOpa intersect(const OmegaOpa& a, const OmegaOpa& b) {
  auto v = intersect(make_view(a), make_view(b));
  return materialize(*v);
}

ViewPtr unite(ViewPtr a, ViewPtr b) {
  if (!(a->opm() == b->opm())) throw InputError("view union needs a shared matrix");
  Opm m = a->opm();
  return std::make_shared<DisjointView>(std::move(a), std::move(b), m);
}

OmegaOpa unite(const OmegaOpa& a, const OmegaOpa& b, bool deterministic) {
  OmegaOpa a1 = to_buchi_final(a), b1 = to_buchi_final(b);
  auto alpha = merge_alphabets(a1.opm().alphabet(), b1.opm().alphabet());
  Opm ea = embed(a1.opm(), alpha), eb = embed(b1.opm(), alpha);
  Opm m = opm_union(ea, eb);
  if (deterministic && ea == eb && a1.is_deterministic() && b1.is_deterministic()) {
    ProductUnionView v(complete_transitions(a1), complete_transitions(b1), m);
    return materialize(v);
  }
  auto side = [&](const OmegaOpa& x, const Opm& e) -> ViewPtr {
    if (e == m) return std::make_shared<EmbeddedView>(x, m);
    return std::make_shared<NormalizedView>(x, m);
  };
  DisjointView v(side(a1, ea), side(b1, eb), m);
  return materialize(v);
}

OmegaOpa concat(const Opa& afin, const OmegaOpa& aomega) {
  OmegaOpa a2 = to_buchi_final(aomega);
  auto alpha = merge_alphabets(afin.opm().alphabet(), a2.opm().alphabet());
  Opm m = complete_opm(opm_union(embed(afin.opm(), alpha), embed(a2.opm(), alpha)));
  bool eps = false;
  for (State q : afin.initial()) eps = eps || afin.is_final(q);
  auto v1 = classical_to_variant(afin);
  ConcatView v(v1.automaton, a2, m, eps);
  return materialize(v);
}

OmegaOpa to_omega(const Opa& a, AcceptKind k) {
  OmegaOpa out(a.opm(), k);
  out.set_mode(a.mode());
  for (const auto& n : a.state_names()) out.add_state(n);
  for (State q : a.initial()) out.add_initial(q);
  for (State q : a.final()) out.add_final(q);
  for (State q = 0; q < a.num_states(); ++q) {
    for (Symbol b = 0; b < a.opm().size(); ++b)
      for (State p : a.push_targets(q, b)) out.add_push(q, b, p);
    for (const auto& [below, t] : a.flush_row(q))
      for (State p : t) out.add_flush(q, below, p);
  }
  return out;
}

OmegaOpa prepare_for_complement(const OmegaOpa& a) {
  return complete_transitions(to_omega(prune_unreachable(to_buchi_final(a))));
}

Transducer build_pseudorun_transducer(const OmegaOpa& a, std::shared_ptr<TripleRegistry> reg) {
  PseudorunMachine mach(a, reg);
  MachineView view(mach);
  std::vector<State> remote;
  OmegaOpa x = materialize(view, &remote);
  std::map<State, State> local;
  for (std::size_t i = 0; i < remote.size(); ++i) local[remote[i]] = static_cast<State>(i);
  Transducer t;
  t.base = x;
  t.base.set_mode(Mode::variant);
  PseudorunMachine::Moves moves;
  for (State q = 0; q < x.num_states(); ++q) {
    for (Symbol b = 0; b < x.opm().size(); ++b) {
      if (x.push_targets(q, b).empty()) continue;
      mach.push(remote[q], b, moves);
      for (auto [p, o] : moves)
        if (o >= 0 && local.count(p)) t.push_output[{q, b, local[p]}] = {o};
    }
    for (const auto& [below, ts] : x.flush_row(q)) {
      mach.flush(remote[q], remote[below], moves);
      for (auto [p, o] : moves)
        if (o >= 0 && local.count(p)) t.flush_output[{q, below, local[p]}] = {o};
    }
  }
  t.output_alphabet = a.opm().alphabet();
  for (int i = 0; i < reg->size(); ++i) t.output_alphabet.push_back(format_triple_set(a, reg->get(i)));
  return t;
}

ViewPtr complement_view(const OmegaOpa& a) { return std::make_shared<ComplementView>(prepare_for_complement(a)); }

OmegaOpa complement(const OmegaOpa& a) {
  auto v = complement_view(a);
  return materialize(*v);
}

Inclusion includes(const OmegaOpa& spec, const OmegaOpa& impl) {
  auto prod = intersect(make_view(impl), complement_view(spec));
  auto r = is_empty_omega(*prod);
  Inclusion out;
  out.included = r.empty;
  out.counterexample = r.witness;
  out.opm = prod->opm();
  return out;
}

}  // namespace opal
