#pragma once

#include <string>
#include <string_view>

#include "opal/omega.hpp"

namespace opal {

// A finite-word automaton (omega == false, only the Opa part matters) or an ω one.
struct Automaton {
  bool omega = false;
  OmegaOpa a;
};

// All parsers throw InputError on malformed JSON or missing fields and
// ValidationError on undeclared states or symbols.
Opm parse_opm(std::string_view json);
std::string opm_to_json(const Opm& m);

Automaton parse_automaton(std::string_view json);
std::string automaton_to_json(const Opa& a);
std::string automaton_to_json(const OmegaOpa& a);
std::string automaton_to_json(const Automaton& a);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
Automaton load_automaton(const std::string& path);

// Glyph aliases: "⋈" <-> "join", "π_expr" <-> "pi_expr", "int₀" <-> "int0", ...
std::string to_ascii(std::string_view token);
std::string to_unicode(std::string_view token);
// Replaces every aliased identifier in a line of text.
std::string unicode_line(std::string_view line);
// Whitespace separated tokens, glyphs accepted for aliased names.
Word parse_word_aliased(const Opm& m, std::string_view text);
Lasso parse_lasso_aliased(const Opm& m, std::string_view text);

}  // namespace opal
