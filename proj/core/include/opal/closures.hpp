#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opal/nba.hpp"
#include "opal/omega.hpp"

namespace opal {

// One state, all final, every push and flush defined: accepts exactly the
// ω-words compatible with m.
OmegaOpa universe(const Opm& m);

// Product with a visitation flag. The matrix is the common part of both
// matrices over the merged alphabet; conflicting cells throw CompatibilityError.
ViewPtr intersect(ViewPtr a, ViewPtr b);
OmegaOpa intersect(const OmegaOpa& a, const OmegaOpa& b);

// Disjoint union over the union matrix. When a matrix grows, that side tracks its
// own top symbol and lookahead so it only moves on cells it knows.
// deterministic = true uses the product with finals F1×Q2 ∪ Q1×F2 when both
// inputs are deterministic and share the matrix; otherwise it is ignored.
OmegaOpa unite(const OmegaOpa& a, const OmegaOpa& b, bool deterministic = false);
// Lazy disjoint union of two Buchi-final views over the same matrix.
ViewPtr unite(ViewPtr a, ViewPtr b);

// afin · aomega over the completed union matrix.
OmegaOpa concat(const Opa& afin, const OmegaOpa& aomega);

// OmegaOpa with the states and edges of a (final set kept).
OmegaOpa to_omega(const Opa& a, AcceptKind k = AcceptKind::buchi_final);

// Buchi-final conversion, pruning and transition completion: the automaton the
// pseudorun machinery works on.
OmegaOpa prepare_for_complement(const OmegaOpa& a);

// The pseudorun transducer of a (already prepared) as an explicit finite-word
// transducer over its reachable states, in variant mode: on a prefix it emits the
// pseudorun of that prefix, open chains counted as pending letters.
// Output symbols: letters first, then |Σ| + id in reg.
Transducer build_pseudorun_transducer(const OmegaOpa& a, std::shared_ptr<TripleRegistry> reg);

// Words compatible with a's matrix and not in L(a).
ViewPtr complement_view(const OmegaOpa& a);
OmegaOpa complement(const OmegaOpa& a);

struct Inclusion {
  bool included = true;
  std::optional<Lasso> counterexample;
  Opm opm;  // alphabet of the counterexample
};
// L(impl) ⊆ L(spec)?
Inclusion includes(const OmegaOpa& spec, const OmegaOpa& impl);

}  // namespace opal
