#include "opal/omega.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "opal/closures.hpp"
#include "opal/error.hpp"
#include "opal/pds.hpp"

namespace opal {

std::string_view accept_kind_name(AcceptKind k) {
  switch (k) {
    case AcceptKind::buchi_final: return "buchi_final";
    case AcceptKind::buchi_empty_stack: return "buchi_empty_stack";
    case AcceptKind::muller: return "muller";
  }
  return "?";
}

void OmegaOpa::add_table_set(StateSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (State q : s)
    if (q < 0 || q >= num_states()) throw ValidationError("Muller table refers to an undeclared state");
  table_.push_back(std::move(s));
}

Lasso parse_lasso(const Opm& m, std::string_view text) {
  auto semi = text.find(';');
  if (semi == std::string_view::npos) throw InputError("lasso must look like \"u ; v\"");
  if (text.find(';', semi + 1) != std::string_view::npos) throw InputError("lasso has more than one ';'");
  Lasso l{parse_word(m, text.substr(0, semi)), parse_word(m, text.substr(semi + 1))};
  if (l.period.empty()) throw InputError("lasso period must be nonempty");
  return l;
}

std::string format_lasso(const Opm& m, const Lasso& l) {
  std::string u = format_word(m, l.prefix);
  return (u.empty() ? "" : u + " ") + "; " + format_word(m, l.period);
}

Word unroll(const Lasso& l, std::size_t n) {
  Word w;
  for (std::size_t i = 0; i < n; ++i)
    w.push_back(i < l.prefix.size() ? l.prefix[i] : l.period[(i - l.prefix.size()) % l.period.size()]);
  return w;
}

bool lasso_compatible(const Opm& m, const Lasso& l) {
  // the universe automaton has a run iff no empty cell is ever hit
  return accepts_lasso(universe(m), l);
}

ValidationReport validate_omega(const OmegaOpa& a) {
  auto r = validate(a);
  for (const auto& s : a.table())
    for (State q : s)
      if (q < 0 || q >= a.num_states()) throw ValidationError("Muller table refers to an undeclared state");
  return r;
}

namespace {

std::string fresh_name(const Opa& a, std::string base) {
  std::string n = base;
  for (int k = 1; a.find_state(n); ++k) n = base + std::to_string(k);
  return n;
}

void copy_states(const Opa& from, Opa& to) {
  for (const auto& n : from.state_names()) to.add_state(n);
  for (State q : from.initial()) to.add_initial(q);
  for (State q : from.final()) to.add_final(q);
}

void copy_edges(const Opa& from, Opa& to) {
  for (State q = 0; q < from.num_states(); ++q) {
    for (Symbol b = 0; b < from.opm().size(); ++b)
      for (State p : from.push_targets(q, b)) to.add_push(q, b, p);
    for (const auto& [below, t] : from.flush_row(q))
      for (State p : t) to.add_flush(q, below, p);
  }
}

}  // namespace

OmegaOpa complete_transitions(const OmegaOpa& a) {
  OmegaOpa out(a.opm(), a.acceptance());
  copy_states(a, out);
  for (const auto& s : a.table()) out.add_table_set(s);
  copy_edges(a, out);
  State sink = out.add_state(fresh_name(a, "sink"));
  for (State q = 0; q < out.num_states(); ++q) {
    for (Symbol b = 0; b < out.opm().size(); ++b)
      if (out.push_targets(q, b).empty()) out.add_push(q, b, sink);
    for (State s = 0; s < out.num_states(); ++s)
      if (out.flush_targets(q, s).empty()) out.add_flush(q, s, sink);
  }
  return out;
}

OmegaOpa empty_stack_to_final(const OmegaOpa& a) {
  if (a.acceptance() != AcceptKind::buchi_empty_stack)
    throw InputError("empty_stack_to_final expects buchi_empty_stack acceptance");
  OmegaOpa out(a.opm(), AcceptKind::buchi_final);
  const int n = a.num_states();
  // (q, e) = 2q, (q, n) = 2q + 1
  for (State q = 0; q < n; ++q) {
    out.add_state("(" + a.state_name(q) + ",e)");
    out.add_state("(" + a.state_name(q) + ",n)");
  }
  for (State q : a.initial()) out.add_initial(2 * q);
  for (State q : a.final()) out.add_final(2 * q);
  for (State q = 0; q < n; ++q) {
    for (Symbol b = 0; b < a.opm().size(); ++b)
      for (State p : a.push_targets(q, b))
        for (int t = 0; t < 2; ++t) out.add_push(2 * q + t, b, 2 * p + 1);
    for (const auto& [below, ts] : a.flush_row(q))
      for (State p : ts)
        for (int tt = 0; tt < 2; ++tt)
          for (int tb = 0; tb < 2; ++tb) out.add_flush(2 * q + tt, 2 * below + tb, 2 * p + tb);
  }
  return out;
}

OmegaOpa muller_to_buchi(const OmegaOpa& a) {
  if (a.acceptance() != AcceptKind::muller) throw InputError("muller_to_buchi expects muller acceptance");
  OmegaOpa out(a.opm(), AcceptKind::buchi_final);
  const int n = a.num_states();
  for (State q = 0; q < n; ++q) out.add_state(a.state_name(q));
  // tagged states (q, k, R): R subset of table[k], q in table[k]
  std::map<std::tuple<State, int, std::uint64_t>, State> tagged;
  struct Info {
    State q;
    int k;
    std::uint64_t r;
  };
  std::vector<Info> info(n, Info{-1, -1, 0});
  const auto& table = a.table();
  std::vector<std::uint64_t> full(table.size(), 0);
  std::vector<std::vector<int>> pos(table.size(), std::vector<int>(n, -1));
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (table[k].size() > 63) throw InputError("Muller table set too large");
    for (std::size_t i = 0; i < table[k].size(); ++i) {
      pos[k][table[k][i]] = static_cast<int>(i);
      full[k] |= std::uint64_t{1} << i;
    }
  }
  std::deque<State> work;
  auto get = [&](State q, int k, std::uint64_t r) {
    auto key = std::make_tuple(q, k, r);
    auto it = tagged.find(key);
    if (it != tagged.end()) return it->second;
    std::string name = "(" + a.state_name(q) + "|" + std::to_string(k) + "|{";
    bool first = true;
    for (std::size_t i = 0; i < table[k].size(); ++i)
      if (r >> i & 1) {
        name += (first ? "" : ",") + a.state_name(table[k][i]);
        first = false;
      }
    name += "})";
    State s = out.add_state(name);
    info.push_back({q, k, r});
    tagged.emplace(key, s);
    if (r == full[k]) out.add_final(s);
    work.push_back(s);
    return s;
  };
  auto next_r = [&](int k, std::uint64_t r, State p) {
    return (r == full[k] ? 0 : r) | std::uint64_t{1} << pos[k][p];
  };
  for (State q : a.initial()) {
    out.add_initial(q);
    for (std::size_t k = 0; k < table.size(); ++k)
      if (pos[k][q] >= 0) out.add_initial(get(q, static_cast<int>(k), next_r(static_cast<int>(k), 0, q)));
  }
  // untagged part plus guesses
  for (State q = 0; q < n; ++q) {
    for (Symbol b = 0; b < a.opm().size(); ++b)
      for (State p : a.push_targets(q, b)) {
        out.add_push(q, b, p);
        for (std::size_t k = 0; k < table.size(); ++k)
          if (pos[k][p] >= 0) out.add_push(q, b, get(p, static_cast<int>(k), next_r(static_cast<int>(k), 0, p)));
      }
    for (const auto& [below, ts] : a.flush_row(q))
      for (State p : ts) {
        out.add_flush(q, below, p);
        for (std::size_t k = 0; k < table.size(); ++k)
          if (pos[k][p] >= 0)
            out.add_flush(q, below, get(p, static_cast<int>(k), next_r(static_cast<int>(k), 0, p)));
      }
  }
  // tagged part, closed under pushes and flushes; a flush below may be tagged or not
  for (;;) {
    while (!work.empty()) {
      State s = work.front();
      work.pop_front();
      auto [q, k, r] = info[s];
      for (Symbol b = 0; b < a.opm().size(); ++b)
        for (State p : a.push_targets(q, b))
          if (pos[k][p] >= 0) out.add_push(s, b, get(p, k, next_r(k, r, p)));
    }
    const State upto = out.num_states();
    for (State s = n; s < upto; ++s) {
      auto [q, k, r] = info[s];
      for (State below = 0; below < upto; ++below) {
        State orig = below < n ? below : info[below].q;
        for (State p : a.flush_targets(q, orig))
          if (pos[k][p] >= 0) out.add_flush(s, below, get(p, k, next_r(k, r, p)));
      }
    }
    if (out.num_states() == upto) break;
  }
  // untagged tops over tagged belows never occur: tagging is permanent once guessed
  return out;
}

OmegaOpa to_buchi_final(const OmegaOpa& a) {
  switch (a.acceptance()) {
    case AcceptKind::buchi_final: return a;
    case AcceptKind::buchi_empty_stack: return empty_stack_to_final(a);
    case AcceptKind::muller: return muller_to_buchi(a);
  }
  return a;
}

OmegaOpa lasso_automaton(const Opm& m, const Lasso& l) {
  if (l.period.empty()) throw InputError("lasso period must be nonempty");
  OmegaOpa out(m, AcceptKind::buchi_final);
  Word w = l.prefix;
  w.insert(w.end(), l.period.begin(), l.period.end());
  const int len = static_cast<int>(w.size());
  for (int i = 0; i < len; ++i) {
    State q = out.add_state("p" + std::to_string(i));
    out.add_final(q);
  }
  out.add_initial(0);
  for (int i = 0; i < len; ++i) {
    if (w[i] < 0 || w[i] >= m.size()) throw InputError("lasso symbol outside the alphabet");
    int next = i + 1 < len ? i + 1 : static_cast<int>(l.prefix.size());
    out.add_push(i, w[i], next);
  }
  for (State p = 0; p < len; ++p)
    for (State q = 0; q < len; ++q) out.add_flush(p, q, p);
  return out;
}

namespace {

class ExplicitView : public OmegaView {
 public:
  explicit ExplicitView(OmegaOpa a) : a_(std::move(a)) {}
  const Opm& opm() const override { return a_.opm(); }
  StateSet initial() override { return a_.initial(); }
  bool is_final(State q) override { return a_.is_final(q); }
  void push_targets(State q, Symbol b, StateSet& out) override { out = a_.push_targets(q, b); }
  void flush_targets(State top, State below, StateSet& out) override { out = a_.flush_targets(top, below); }
  std::string state_name(State q) override { return a_.state_name(q); }

 private:
  OmegaOpa a_;
};

}  // namespace

ViewPtr make_view(const OmegaOpa& a) { return std::make_shared<ExplicitView>(to_buchi_final(a)); }

OmegaOpa materialize(OmegaView& v, std::vector<State>* remote_out) {
  OmegaOpa out(v.opm(), AcceptKind::buchi_final);
  std::map<State, State> local;
  std::vector<State> remote;
  auto id = [&](State q) {
    auto it = local.find(q);
    if (it != local.end()) return it->second;
    State s = out.add_state(v.state_name(q));
    if (v.is_final(q)) out.add_final(s);
    local.emplace(q, s);
    remote.push_back(q);
    return s;
  };
  // frames (state below the topmost marked entry, top state), as in validate()
  std::set<std::pair<State, State>> frames;
  std::map<State, std::set<State>> callers, flushed;
  std::deque<std::pair<State, State>> work;
  auto add = [&](State s, State q) {
    if (frames.insert({s, q}).second) work.push_back({s, q});
  };
  for (State q : v.initial()) {
    out.add_initial(id(q));
    add(-1, q);
  }
  StateSet buf;
  while (!work.empty()) {
    auto [s, q] = work.front();
    work.pop_front();
    State lq = id(q);
    for (Symbol b = 0; b < v.opm().size(); ++b) {
      v.push_targets(q, b, buf);
      for (State p : StateSet(buf)) {
        out.add_push(lq, b, id(p));
        add(q, p);
        if (callers[q].insert(s).second)
          for (State y : flushed[q]) add(s, y);
        add(s, p);
      }
    }
    if (s >= 0) {
      v.flush_targets(q, s, buf);
      for (State y : StateSet(buf)) {
        out.add_flush(lq, id(s), id(y));
        if (flushed[s].insert(y).second)
          for (State c : callers[s]) add(c, y);
      }
    }
  }
  if (remote_out) *remote_out = remote;
  return out;
}

bool accepts_lasso(const ViewPtr& a, const Lasso& l) {
  auto lv = make_view(lasso_automaton(a->opm(), l));
  auto prod = intersect(a, lv);
  return !is_empty_omega(*prod).empty;
}

bool accepts_lasso(const OmegaOpa& a, const Lasso& l) { return accepts_lasso(make_view(a), l); }

}  // namespace opal
