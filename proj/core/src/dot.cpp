#include "opal/dot.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "opal/io.hpp"

namespace opal {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::set<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

std::string render(const Opa& a, const std::string& name, bool unicode, const std::string& extra) {
  std::ostringstream o;
  o << "digraph " << quote(name) << " {\n  rankdir=LR;\n  node [shape=circle];\n";
  if (!extra.empty()) o << extra;
  std::map<std::string, State> states;
  for (State q = 0; q < a.num_states(); ++q) states[a.state_name(q)] = q;
  for (const auto& [n, q] : states)
    if (a.is_initial(q)) o << "  " << quote("__init_" + n) << " [shape=point];\n";
  for (const auto& [n, q] : states)
    o << "  " << quote(n) << (a.is_final(q) ? " [shape=doublecircle]" : "") << ";\n";
  for (const auto& [n, q] : states)
    if (a.is_initial(q)) o << "  " << quote("__init_" + n) << " -> " << quote(n) << ";\n";

  auto sym = [&](Symbol b) { return unicode ? to_unicode(a.opm().name(b)) : a.opm().name(b); };
  std::map<std::pair<std::string, std::string>, std::set<std::string>> push, flush;
  for (State q = 0; q < a.num_states(); ++q) {
    for (Symbol b = 0; b < a.opm().size(); ++b)
      for (State p : a.push_targets(q, b)) push[{a.state_name(q), a.state_name(p)}].insert(sym(b));
    for (const auto& [below, t] : a.flush_row(q))
      for (State p : t) flush[{a.state_name(q), a.state_name(p)}].insert(a.state_name(below));
  }
  for (const auto& [e, labels] : push)
    o << "  " << quote(e.first) << " -> " << quote(e.second) << " [label=" << quote(join(labels)) << "];\n";
  for (const auto& [e, labels] : flush)
    o << "  " << quote(e.first) << " -> " << quote(e.second) << " [style=bold, label=" << quote("⇒ " + join(labels))
      << "];\n";
  o << "}\n";
  return o.str();
}

}  // namespace

std::string to_dot(const Opa& a, const std::string& name, bool unicode) { return render(a, name, unicode, ""); }

std::string to_dot(const OmegaOpa& a, const std::string& name, bool unicode) {
  std::string extra;
  if (a.acceptance() == AcceptKind::muller) {
    std::string t;
    for (const auto& s : a.table()) {
      std::set<std::string> names;
      for (State q : s) names.insert(a.state_name(q));
      t += "{" + join(names) + "}";
    }
    extra = "  label=" + quote("muller " + t) + ";\n";
  } else if (a.acceptance() == AcceptKind::buchi_empty_stack) {
    extra = "  label=\"buchi_empty_stack\";\n";
  }
  return render(a, name, unicode, extra);
}

}  // namespace opal
