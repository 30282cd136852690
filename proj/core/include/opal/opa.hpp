#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "opal/opm.hpp"

namespace opal {

using State = int;
// Sorted, duplicate free.
using StateSet = std::vector<State>;

void insert_sorted(StateSet& s, State q);
bool contains(const StateSet& s, State q);

enum class Mode { classical, variant };
enum class MoveKind { push, mark, flush };
std::string_view move_name(MoveKind k);

class Opa {
 public:
  Opa() = default;
  explicit Opa(Opm m);

  const Opm& opm() const { return opm_; }
  Mode mode() const { return mode_; }
  void set_mode(Mode m) { mode_ = m; }

  int num_states() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& state_names() const { return names_; }
  const std::string& state_name(State q) const { return names_.at(q); }
  // Throws ValidationError for duplicates.
  State add_state(std::string name);
  // Throws ValidationError when the name is not declared.
  State state(std::string_view name) const;
  std::optional<State> find_state(std::string_view name) const;

  const StateSet& initial() const { return initial_; }
  const StateSet& final() const { return final_; }
  void add_initial(State q);
  void add_final(State q);
  void set_final(StateSet f);
  bool is_initial(State q) const { return contains(initial_, q); }
  bool is_final(State q) const { return contains(final_, q); }

  void add_push(State q, Symbol a, State p);
  void add_flush(State top, State below, State p);
  const StateSet& push_targets(State q, Symbol a) const;
  const StateSet& flush_targets(State top, State below) const;
  // below -> targets, for one top state
  const std::map<State, StateSet>& flush_row(State top) const { return flush_.at(top); }

  std::size_t push_edge_count() const;
  std::size_t flush_edge_count() const;
  bool is_deterministic() const;

 protected:
  Opm opm_;
  Mode mode_ = Mode::classical;
  std::vector<std::string> names_;
  std::unordered_map<std::string, State> index_;
  StateSet initial_, final_;
  std::vector<std::vector<StateSet>> push_;       // [q][a]
  std::vector<std::map<State, StateSet>> flush_;  // [top][below]
};

struct ValidationReport {
  bool conflict_free = true;  // always true once an Opm exists; kept for reporting
  bool eq_acyclic = true;
  std::vector<Symbol> eq_cycle;
  bool deterministic = false;
  std::vector<State> reachable;
  std::vector<State> unreachable;
};
// Structural checks. Reachability follows push edges and flush edges whose
// operands are both reachable.
ValidationReport validate(const Opa& a);

struct StackEntry {
  Symbol symbol;
  bool marked;
  State state;
  auto operator<=>(const StackEntry&) const = default;
};

struct Configuration {
  std::vector<StackEntry> stack;
  std::size_t pos = 0;  // letters consumed
  State state() const { return stack.back().state; }
  auto operator<=>(const Configuration&) const = default;
};

Configuration initial_configuration(State q);

struct Successor {
  MoveKind kind;
  Configuration next;
};

// Lookahead is w[pos], then # when terminated, otherwise nothing (prefix of an
// infinite word). Variant mode never flushes on #.
std::vector<Successor> step(const Opa& a, const Configuration& c, const Word& w, bool terminated);

struct Trace {
  Configuration start;
  std::vector<Successor> moves;
};

struct RunResult {
  bool accepted = false;
  std::optional<Trace> trace;
};

RunResult accepts_finite(const Opa& a, const Word& w);
// Acceptance right after the last letter, with no #-induced flush, whatever a.mode() says.
RunResult accepts_variant(const Opa& a, const Word& w);
// Dispatch on a.mode().
bool accepts(const Opa& a, const Word& w);

struct TraceOptions {
  bool terminated = true;
  std::size_t lookahead = 10;
};
std::string format_configuration(const Opa& a, const Configuration& c, const Word& w,
                                 const TraceOptions& opt = {});
// First line "start | ...", then one "KIND | ..." line per move.
std::vector<std::string> format_trace(const Opa& a, const Trace& t, const Word& w,
                                      const TraceOptions& opt = {});

// All compatible words of length <= n in the language, by a shared-prefix search.
// Throws InputError when n exceeds cap.
// $OPAL_MAX_ENUM when set to a positive integer, else 8.
int default_enum_cap();
std::set<Word> enumerate_language(const Opa& a, int n, int cap = default_enum_cap());
// All words of length <= n compatible with the matrix (prefix-closed search).
std::vector<Word> compatible_words(const Opm& m, int n);

struct Transducer {
  Opa base;
  std::vector<std::string> output_alphabet;
  std::map<std::tuple<State, Symbol, State>, Word> push_output;
  std::map<std::tuple<State, State, State>, Word> flush_output;
};
// Outputs along accepting runs (acceptance per base.mode()). Missing entries emit nothing.
std::set<Word> transduce_finite(const Transducer& t, const Word& w);

struct VariantConstruction {
  Opa automaton;
  std::size_t unpruned_states = 0;
};
VariantConstruction classical_to_variant(const Opa& a);
VariantConstruction variant_to_classical(const Opa& a);

// Keep states reachable by the forward closure used in validate().
Opa prune_unreachable(const Opa& a);

}  // namespace opal
