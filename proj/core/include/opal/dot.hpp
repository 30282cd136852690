#pragma once

#include <string>

#include "opal/omega.hpp"

namespace opal {

// Graphviz digraph. Push edges are grouped per (from, to) and labelled with their
// symbols; flush edges are grouped per (top, to), drawn bold and labelled
// "⇒ " followed by the below states. Ordering is lexicographic by name.
std::string to_dot(const Opa& a, const std::string& name = "opa", bool unicode = false);
std::string to_dot(const OmegaOpa& a, const std::string& name = "opa", bool unicode = false);

}  // namespace opal
