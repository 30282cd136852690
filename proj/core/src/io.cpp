#include "opal/io.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "opal/error.hpp"

namespace opal {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kGlyphs{{
    {"⋈", "join"},
    {"∪", "cup"},
    {"∩", "cap"},
    {"π_expr", "pi_expr"},
    {"σ_expr", "sigma_expr"},
    {"int₀", "int0"},
    {"int₁", "int1"},
    {"int₂", "int2"},
}};

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string str(const Json& j, const char* what) {
  if (!j.is_string()) throw InputError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::vector<std::string> strings(const Json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(str(x, what));
  return out;
}

Symbol declared(const Opm& m, const std::string& name) {
  auto s = m.find(name);
  if (!s || *s == kHash) throw ValidationError("undeclared symbol '" + name + "'");
  return *s;
}

Opm opm_from(const Json& j) {
  Opm m(strings(field(j, "alphabet"), "alphabet"));
  if (j.contains("cells")) {
    const auto& cells = j.at("cells");
    if (!cells.is_object()) throw InputError("cells must be an object");
    for (const auto& [row, cols] : cells.items()) {
      if (!cols.is_object()) throw InputError("cells row must be an object");
      Symbol a = declared(m, row);
      for (const auto& [col, rel] : cols.items()) {
        try {
          m.set(a, declared(m, col), parse_relation(str(rel, "relation")));
        } catch (const std::invalid_argument& e) {
          throw InputError(e.what());
        }
      }
    }
  }
  if (j.contains("hash_row")) {
    const auto& row = j.at("hash_row");
    if (!row.is_object()) throw InputError("hash_row must be an object");
    for (const auto& [col, rel] : row.items()) m.set(kHash, declared(m, col), parse_relation(str(rel, "relation")));
  }
  return m;
}

Json opm_json(const Opm& m) {
  Json j;
  j["alphabet"] = m.alphabet();
  Json cells = Json::object();
  for (Symbol a = 0; a < m.size(); ++a) {
    Json row = Json::object();
    for (Symbol b = 0; b < m.size(); ++b)
      if (auto r = m.get(a, b)) row[m.name(b)] = std::string(relation_name(*r));
    if (!row.empty()) cells[m.name(a)] = row;
  }
  j["cells"] = cells;
  Json hash = Json::object();
  for (Symbol b = 0; b < m.size(); ++b)
    if (auto r = m.get(kHash, b)) hash[m.name(b)] = std::string(relation_name(*r));
  j["hash_row"] = hash;
  return j;
}

State state_of(const Opa& a, const Json& j) {
  try {
    return a.state(str(j, "state"));
  } catch (const ValidationError&) {
    throw ValidationError("undeclared state '" + j.get<std::string>() + "'");
  }
}

Json automaton_json(const Opa& a) {
  Json j;
  j["alphabet"] = a.opm().alphabet();
  j["opm"] = opm_json(a.opm());
  j["states"] = a.state_names();
  auto names = [&](const StateSet& s) {
    std::vector<std::string> out;
    for (State q : s) out.push_back(a.state_name(q));
    return out;
  };
  j["initial"] = names(a.initial());
  j["final"] = names(a.final());
  j["mode"] = a.mode() == Mode::variant ? "variant" : "classical";
  Json push = Json::array();
  for (State q = 0; q < a.num_states(); ++q)
    for (Symbol b = 0; b < a.opm().size(); ++b)
      if (!a.push_targets(q, b).empty())
        push.push_back({{"from", a.state_name(q)}, {"symbol", a.opm().name(b)}, {"to", names(a.push_targets(q, b))}});
  j["delta_push"] = push;
  Json flush = Json::array();
  for (State q = 0; q < a.num_states(); ++q)
    for (const auto& [below, t] : a.flush_row(q))
      if (!t.empty())
        flush.push_back({{"top", a.state_name(q)}, {"below", a.state_name(below)}, {"to", names(t)}});
  j["delta_flush"] = flush;
  return j;
}

}  // namespace

Opm parse_opm(std::string_view json) { return opm_from(parse_json(json)); }

std::string opm_to_json(const Opm& m) { return opm_json(m).dump(2) + "\n"; }

Automaton parse_automaton(std::string_view text) {
  Json j = parse_json(text);
  Opm m = opm_from(field(j, "opm"));
  if (j.contains("alphabet")) {
    auto alpha = strings(j.at("alphabet"), "alphabet");
    auto sorted = alpha, own = m.alphabet();
    std::sort(sorted.begin(), sorted.end());
    std::sort(own.begin(), own.end());
    if (sorted != own) throw ValidationError("automaton alphabet differs from its matrix alphabet");
  }
  Automaton out;
  out.omega = j.contains("acceptance");
  AcceptKind kind = AcceptKind::buchi_final;
  if (out.omega) {
    auto k = str(field(j.at("acceptance"), "kind"), "acceptance kind");
    if (k == "buchi_final")
      kind = AcceptKind::buchi_final;
    else if (k == "buchi_empty_stack")
      kind = AcceptKind::buchi_empty_stack;
    else if (k == "muller")
      kind = AcceptKind::muller;
    else
      throw InputError("unknown acceptance kind '" + k + "'");
  }
  OmegaOpa& a = out.a;
  a = OmegaOpa(m, kind);
  for (const auto& n : strings(field(j, "states"), "states")) {
    try {
      a.add_state(n);
    } catch (const ValidationError& e) {
      throw InputError(e.what());
    }
  }
  for (const auto& q : field(j, "initial")) a.add_initial(state_of(a, q));
  const Json* fin = nullptr;
  if (out.omega && j.at("acceptance").contains("final"))
    fin = &j.at("acceptance").at("final");
  else if (j.contains("final"))
    fin = &j.at("final");
  if (fin)
    for (const auto& q : *fin) a.add_final(state_of(a, q));
  if (out.omega && kind == AcceptKind::muller) {
    for (const auto& set : field(j.at("acceptance"), "table")) {
      StateSet s;
      for (const auto& q : set) insert_sorted(s, state_of(a, q));
      a.add_table_set(s);
    }
  }
  if (j.contains("mode")) {
    auto mode = str(j.at("mode"), "mode");
    if (mode == "variant")
      a.set_mode(Mode::variant);
    else if (mode != "classical")
      throw InputError("unknown mode '" + mode + "'");
  }
  if (j.contains("delta_push"))
    for (const auto& e : j.at("delta_push")) {
      State q = state_of(a, field(e, "from"));
      auto name = str(field(e, "symbol"), "symbol");
      auto b = m.find(name);
      if (!b || *b == kHash) throw ValidationError("undeclared symbol '" + name + "'");
      for (const auto& p : field(e, "to")) a.add_push(q, *b, state_of(a, p));
    }
  if (j.contains("delta_flush"))
    for (const auto& e : j.at("delta_flush")) {
      State top = state_of(a, field(e, "top"));
      State below = state_of(a, field(e, "below"));
      for (const auto& p : field(e, "to")) a.add_flush(top, below, state_of(a, p));
    }
  return out;
}

std::string automaton_to_json(const Opa& a) { return automaton_json(a).dump(2) + "\n"; }

std::string automaton_to_json(const OmegaOpa& a) {
  Json j = automaton_json(a);
  Json acc;
  acc["kind"] = std::string(accept_kind_name(a.acceptance()));
  acc["final"] = j["final"];
  if (a.acceptance() == AcceptKind::muller) {
    Json table = Json::array();
    for (const auto& s : a.table()) {
      std::vector<std::string> names;
      for (State q : s) names.push_back(a.state_name(q));
      table.push_back(names);
    }
    acc["table"] = table;
  }
  j.erase("final");
  j.erase("mode");
  j["acceptance"] = acc;
  return j.dump(2) + "\n";
}

std::string automaton_to_json(const Automaton& a) {
  return a.omega ? automaton_to_json(a.a) : automaton_to_json(static_cast<const Opa&>(a.a));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

Automaton load_automaton(const std::string& path) {
  auto text = read_file(path);
  // fixtures wrap the automaton
  Json j = parse_json(text);
  if (j.contains("automaton")) return parse_automaton(j.at("automaton").dump());
  return parse_automaton(text);
}

std::string to_ascii(std::string_view token) {
  for (auto [u, a] : kGlyphs)
    if (token == u) return std::string(a);
  return std::string(token);
}

std::string to_unicode(std::string_view token) {
  for (auto [u, a] : kGlyphs)
    if (token == a) return std::string(u);
  return std::string(token);
}

std::string unicode_line(std::string_view line) {
  std::string out;
  std::size_t i = 0;
  auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < line.size()) {
    if (!ident(line[i])) {
      out += line[i++];
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && ident(line[j])) ++j;
    out += to_unicode(line.substr(i, j - i));
    i = j;
  }
  return out;
}

Word parse_word_aliased(const Opm& m, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tok, norm;
  while (in >> tok) {
    if (!norm.empty()) norm += ' ';
    norm += m.find(tok) ? tok : to_ascii(tok);
  }
  return parse_word(m, norm);
}

Lasso parse_lasso_aliased(const Opm& m, std::string_view text) {
  auto semi = text.find(';');
  if (semi == std::string_view::npos) throw InputError("lasso must look like \"u ; v\"");
  std::string norm = format_word(m, parse_word_aliased(m, text.substr(0, semi))) + " ; " +
                     format_word(m, parse_word_aliased(m, text.substr(semi + 1)));
  return parse_lasso(m, norm);
}

}  // namespace opal
