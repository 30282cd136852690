#pragma once

#include <memory>
#include <string>
#include <vector>

#include "opal/opa.hpp"

namespace opal {

enum class AcceptKind { buchi_final, buchi_empty_stack, muller };
std::string_view accept_kind_name(AcceptKind k);

// Final set lives in Opa::final(); the Muller table is separate.
class OmegaOpa : public Opa {
 public:
  OmegaOpa() = default;
  explicit OmegaOpa(Opm m, AcceptKind k = AcceptKind::buchi_final) : Opa(std::move(m)), acceptance_(k) {}

  AcceptKind acceptance() const { return acceptance_; }
  void set_acceptance(AcceptKind k) { acceptance_ = k; }
  const std::vector<StateSet>& table() const { return table_; }
  void add_table_set(StateSet s);

 private:
  AcceptKind acceptance_ = AcceptKind::buchi_final;
  std::vector<StateSet> table_;
};

struct Lasso {
  Word prefix;
  Word period;
  bool operator==(const Lasso&) const = default;
};
// "u ; v" with whitespace separated symbols; v must be nonempty.
Lasso parse_lasso(const Opm& m, std::string_view text);
std::string format_lasso(const Opm& m, const Lasso& l);
// First n letters of u v v v ...
Word unroll(const Lasso& l, std::size_t n);
// Compatible with m: no empty cell is hit while reading u v^omega.
bool lasso_compatible(const Opm& m, const Lasso& l);

ValidationReport validate_omega(const OmegaOpa& a);

OmegaOpa complete_transitions(const OmegaOpa& a);
OmegaOpa empty_stack_to_final(const OmegaOpa& a);
OmegaOpa muller_to_buchi(const OmegaOpa& a);
// Any acceptance kind to buchi_final.
OmegaOpa to_buchi_final(const OmegaOpa& a);
OmegaOpa lasso_automaton(const Opm& m, const Lasso& l);

// On-the-fly Büchi (final-state) omega automaton. States are interned lazily,
// so the query methods are not const.
class OmegaView {
 public:
  virtual ~OmegaView() = default;
  virtual const Opm& opm() const = 0;
  virtual StateSet initial() = 0;
  virtual bool is_final(State q) = 0;
  // out is overwritten with a sorted set
  virtual void push_targets(State q, Symbol a, StateSet& out) = 0;
  virtual void flush_targets(State top, State below, StateSet& out) = 0;
  virtual std::string state_name(State q) = 0;
};
using ViewPtr = std::shared_ptr<OmegaView>;

// Converts to buchi_final first when needed.
ViewPtr make_view(const OmegaOpa& a);
// Explicit automaton over the states and flush pairs found by a forward frame search.
// remote, when given, maps each new state to the view's id.
OmegaOpa materialize(OmegaView& v, std::vector<State>* remote = nullptr);

bool accepts_lasso(const OmegaOpa& a, const Lasso& l);
bool accepts_lasso(const ViewPtr& a, const Lasso& l);

}  // namespace opal
