#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "opal/omega.hpp"

namespace opal {

// Finite-state Büchi automaton explored on demand. Symbols are ints.
class LazyNba {
 public:
  virtual ~LazyNba() = default;
  virtual StateSet initial() = 0;
  virtual bool is_final(int q) = 0;
  // out is overwritten, sorted
  virtual void successors(int q, int sym, StateSet& out) = 0;
  virtual std::string state_name(int q) = 0;
};
using NbaPtr = std::shared_ptr<LazyNba>;

struct Nba {
  int num_symbols = 0;
  std::vector<std::string> symbol_names;
  std::vector<std::string> states;
  StateSet initial;
  std::vector<bool> final;
  std::vector<std::map<int, StateSet>> delta;  // [q] symbol -> targets

  int num_states() const { return static_cast<int>(states.size()); }
  int add_state(std::string name, bool is_final = false);
  void add_edge(int q, int sym, int p);
  const StateSet& targets(int q, int sym) const;
};

NbaPtr as_lazy(std::shared_ptr<const Nba> n);
// Explicit automaton over the states reachable with symbols [0, num_symbols).
Nba explore(LazyNba& n, int num_symbols, std::vector<std::string> symbol_names = {});

// Generalised Büchi product with a visitation flag; at most 2|Q1||Q2| states.
Nba nba_product(const Nba& a, const Nba& b);

// Rank-based complement with tight rankings. Phase one runs the subset
// construction, phase two carries a level ranking plus the breakpoint set.
NbaPtr lazy_complement(NbaPtr n);
Nba nba_complement(const Nba& n);

bool nba_accepts_lasso(LazyNba& n, const std::vector<int>& prefix, const std::vector<int>& period);
bool nba_accepts_lasso(const Nba& n, const std::vector<int>& prefix, const std::vector<int>& period);
bool nba_is_empty(const Nba& n);

// Summaries of chain semisupports: (start, end, final visited).
struct Triple {
  State q;
  State p;
  bool f;
  auto operator<=>(const Triple&) const = default;
};
using TripleSet = std::vector<Triple>;  // sorted, unique

class TripleRegistry {
 public:
  int intern(TripleSet s);
  const TripleSet& get(int id) const { return sets_.at(id); }
  int size() const { return static_cast<int>(sets_.size()); }

 private:
  std::map<TripleSet, int> index_;
  std::vector<TripleSet> sets_;
};

std::string format_triple_set(const Opa& a, const TripleSet& s);

// The pseudorun automaton: states Q plus primed copies of Q (same outgoing edges,
// final). Symbol s < |Σ| is a letter, otherwise the triple set s - |Σ|.
// States that cannot reach an accepting cycle are trimmed.
class PseudorunNba : public LazyNba {
 public:
  PseudorunNba(const OmegaOpa& a, std::shared_ptr<TripleRegistry> reg);
  StateSet initial() override;
  bool is_final(int q) override;
  void successors(int q, int sym, StateSet& out) override;
  std::string state_name(int q) override;
  int letters() const { return letters_; }
  int num_states() const { return 2 * n_; }
  bool live(int q) const { return live_[q]; }

 private:
  OmegaOpa a_;
  std::shared_ptr<TripleRegistry> reg_;
  int n_;
  int letters_;
  std::vector<bool> live_;
};

// Explicit A_R over the given triple-set symbols (ids in reg), without trimming.
Nba build_pseudorun_nba(const OmegaOpa& a, const TripleRegistry& reg);

}  // namespace opal
