#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opal/omega.hpp"

namespace opal {

// <from, gamma> -> <to, push>, push.size() in {0,1,2}, push[0] is the new top.
struct PdsRule {
  int from;
  int gamma;
  int to;
  std::vector<int> push;
  int label = -1;  // input letter consumed, -1 for none
};

struct Pds {
  std::vector<std::string> controls;
  std::vector<std::string> gammas;
  int bottom = 0;
  std::vector<PdsRule> rules;
  std::vector<bool> accepting;      // per control
  std::vector<int> initial_controls;
  // finite-word encodings only
  std::vector<int> goal_controls;   // <goal, bottom> is an accepting configuration
  int num_controls() const { return static_cast<int>(controls.size()); }
  int num_gammas() const { return static_cast<int>(gammas.size()); }
};

// Controls: fresh(q) guesses the next lookahead, (q,c) reads it, flushing(q,c) pops
// unmarked entries. Stack entries are (symbol, marked, saved state); only marked
// entries keep the saved state, nothing reads it on unmarked ones.
// finite = true adds the # lookahead and goal controls (qF,#) for qF in F.
Pds opa_to_pds(const Opa& a, bool finite);

// Finite automaton over stack words; states 0..num_controls-1 are the controls.
struct PAutomaton {
  struct Trans {
    int from, gamma, to;
    auto operator<=>(const Trans&) const = default;
  };
  int num_states = 0;
  std::vector<bool> final;
  std::vector<Trans> trans;
  bool accepts(int control, const std::vector<int>& stack) const;
};

struct PreStar {
  PAutomaton automaton;
  // Letters along a run from <control, stack> into the target set, when accepted.
  std::optional<Word> witness(int control, const std::vector<int>& stack) const;

  // provenance, parallel to automaton.trans; t1/t2 index automaton.trans
  struct Why {
    int kind;  // 0 target, 1 pop, 2 rewrite, 3 push
    int rule = -1;
    int t1 = -1, t2 = -1;
  };
  std::vector<Why> why;
  std::vector<int> labels;  // per pds rule
};

PreStar pre_star(const Pds& p, const PAutomaton& target);

// Heads on an accepting cycle of the head graph. empty_stack: bottom heads with an
// accepting control on any cycle.
std::vector<std::pair<int, int>> repeating_heads(const Pds& p, bool empty_stack = false);

struct EmptinessResult {
  bool empty = true;
  std::optional<Lasso> witness;
  std::size_t heads = 0;
};

// On-the-fly: head graph explored forward from the initial heads.
EmptinessResult is_empty_omega(OmegaView& v);
EmptinessResult is_empty_omega(const OmegaOpa& a);
// Explicit route: repeating_heads on the full encoding, then pre_star reachability.
bool is_empty_omega_prestar(const OmegaOpa& a);

struct FiniteEmptiness {
  bool empty = true;
  std::optional<Word> witness;
};
FiniteEmptiness is_empty_finite(const Opa& a);

}  // namespace opal
