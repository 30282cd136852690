#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "opal/closures.hpp"
#include "opal/corpus.hpp"
#include "opal/dot.hpp"
#include "opal/error.hpp"
#include "opal/io.hpp"
#include "opal/pds.hpp"

using namespace opal;

namespace {

std::string render(const std::string& s, bool unicode) { return unicode ? unicode_line(s) : s; }

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

int cmd_validate(const std::string& file) {
  auto a = load_automaton(file);
  auto r = a.omega ? validate_omega(a.a) : validate(a.a);
  std::cout << "conflict_free: " << (r.conflict_free ? "yes" : "no") << "\n";
  std::cout << "eq_acyclic: " << (r.eq_acyclic ? "yes" : "no");
  if (!r.eq_acyclic) {
    std::cout << " (";
    for (std::size_t i = 0; i < r.eq_cycle.size(); ++i)
      std::cout << (i ? " = " : "") << a.a.opm().name(r.eq_cycle[i]);
    std::cout << ")";
  }
  std::cout << "\ndeterministic: " << (r.deterministic ? "yes" : "no") << "\n";
  std::cout << "unreachable:";
  for (State q : r.unreachable) std::cout << " " << a.a.state_name(q);
  std::cout << "\n";
  return r.conflict_free && r.eq_acyclic ? 0 : 1;
}

int cmd_enumerate(const Automaton& a, int n, bool unicode) {
  if (a.omega) throw InputError("--enumerate needs a finite-word automaton");
  const Opa& opa = a.a;
  auto words = enumerate_language(opa, n);
  for (const auto& w : words) std::cout << (w.empty() ? "ε" : render(format_word(opa.opm(), w), unicode)) << "\n";
  return words.empty() ? 1 : 0;
}

int cmd_run(const std::string& file, const std::optional<std::string>& word, const std::optional<std::string>& lasso,
            int enumerate, bool trace, bool unicode) {
  auto a = load_automaton(file);
  if (enumerate >= 0) {
    if (word || lasso) throw InputError("--enumerate excludes --word and --lasso");
    return cmd_enumerate(a, enumerate, unicode);
  }
  // --word "" is the empty word
  if (word.has_value() == lasso.has_value()) throw InputError("run needs exactly one of --word or --lasso");
  if (lasso) {
    if (!a.omega) throw InputError("--lasso needs an ω automaton");
    auto l = parse_lasso_aliased(a.a.opm(), *lasso);
    if (!lasso_compatible(a.a.opm(), l)) {
      std::cout << "reject (incompatible with the matrix)\n";
      return 1;
    }
    bool ok = accepts_lasso(a.a, l);
    std::cout << (ok ? "accept" : "reject") << "\n";
    return ok ? 0 : 1;
  }
  if (a.omega) throw InputError("--word needs a finite-word automaton");
  const Opa& opa = a.a;
  auto w = parse_word_aliased(opa.opm(), *word);
  auto r = opa.mode() == Mode::variant ? accepts_variant(opa, w) : accepts_finite(opa, w);
  std::cout << (r.accepted ? "accept" : "reject") << "\n";
  if (trace && r.trace) {
    TraceOptions opt;
    opt.terminated = opa.mode() != Mode::variant;
    for (const auto& line : format_trace(opa, *r.trace, w, opt)) std::cout << render(line, unicode) << "\n";
  }
  return r.accepted ? 0 : 1;
}

int cmd_compose(const std::string& op, const std::vector<std::string>& files, const std::string& out) {
  auto need = [&](std::size_t n) {
    if (files.size() != n) throw InputError("--op " + op + " takes " + std::to_string(n) + " automata");
  };
  auto omega = [](const Automaton& a) {
    if (!a.omega) throw InputError("expected an ω automaton");
    return a.a;
  };
  OmegaOpa result;
  if (op == "complement") {
    need(1);
    result = complement(omega(load_automaton(files[0])));
  } else if (op == "intersect") {
    need(2);
    result = intersect(omega(load_automaton(files[0])), omega(load_automaton(files[1])));
  } else if (op == "union") {
    need(2);
    result = unite(omega(load_automaton(files[0])), omega(load_automaton(files[1])));
  } else if (op == "concat") {
    need(2);
    auto f = load_automaton(files[0]);
    if (f.omega) throw InputError("concat expects a finite-word automaton first");
    result = concat(f.a, omega(load_automaton(files[1])));
  } else {
    throw InputError("unknown operation '" + op + "'");
  }
  emit(automaton_to_json(result), out);
  return 0;
}

int cmd_empty(const std::string& file, bool unicode) {
  auto a = load_automaton(file);
  if (a.omega) {
    auto r = is_empty_omega(a.a);
    if (r.empty) {
      std::cout << "empty\n";
      return 0;
    }
    std::cout << "nonempty\nwitness: " << render(format_lasso(a.a.opm(), *r.witness), unicode) << "\n";
    return 1;
  }
  auto r = is_empty_finite(a.a);
  if (r.empty) {
    std::cout << "empty\n";
    return 0;
  }
  std::cout << "nonempty\nwitness: " << render(format_word(a.a.opm(), *r.witness), unicode) << "\n";
  return 1;
}

int cmd_includes(const std::string& spec, const std::string& impl, bool unicode) {
  auto s = load_automaton(spec), i = load_automaton(impl);
  if (!s.omega || !i.omega) throw InputError("includes expects ω automata");
  auto r = includes(s.a, i.a);
  if (r.included) {
    std::cout << "included\n";
    return 0;
  }
  std::cout << "not included\ncounterexample: " << render(format_lasso(r.opm, *r.counterexample), unicode) << "\n";
  return 1;
}

// Re-checks every expectation stored in the fixture.
int check_fixture(const Fixture& f, bool unicode) {
  int bad = 0;
  auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << render(what, unicode) << "\n";
    if (!ok) ++bad;
  };
  if (f.automaton) {
    const auto& a = f.automaton->a;
    auto v = f.automaton->omega ? validate_omega(a) : validate(a);
    report(v.conflict_free && v.eq_acyclic, "validates");
    for (const auto& t : f.traces) {
      auto r = replay_trace(a, t);
      report(r.ok, "trace \"" + t.word + "\" " + std::to_string(r.matched) + "/" + std::to_string(t.lines.size()) +
                       (r.ok ? "" : " at: " + r.mismatch));
    }
    for (const auto& w : f.words) {
      bool got = accepts(a, parse_word_aliased(a.opm(), w.word));
      report(got == w.accepted, "word \"" + w.word + "\" " + (got ? "accepted" : "rejected"));
    }
    for (const auto& l : f.lassos) {
      bool got = accepts_lasso(a, parse_lasso_aliased(a.opm(), l.lasso));
      report(got == l.accepted, "lasso \"" + l.lasso + "\" " + (got ? "accepted" : "rejected"));
    }
    if (f.empty) {
      bool got = f.automaton->omega ? is_empty_omega(a).empty : is_empty_finite(a).empty;
      report(got == *f.empty, got ? "empty" : "nonempty");
    }
  }
  return bad ? 1 : 0;
}

int cmd_fixture(const std::string& name, bool list, bool check, bool unicode) {
  if (list || name.empty()) {
    for (const auto& n : catalog()) std::cout << n << "\n";
    return 0;
  }
  auto f = load_fixture(name);
  if (check) return check_fixture(f, unicode);
  std::cout << read_file(fixture_dir() + "/" + name + ".json");
  return 0;
}

int cmd_dot(const std::string& file, bool unicode, const std::string& out) {
  auto a = load_automaton(file);
  auto name = std::filesystem::path(file).stem().string();
  emit(a.omega ? to_dot(a.a, name, unicode) : to_dot(static_cast<const Opa&>(a.a), name, unicode), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opal: operator precedence automata toolkit"};
  app.require_subcommand(1, 1);
  bool unicode = false;
  app.add_flag("--unicode", unicode, "Render names with glyphs");

  std::string file, file2, op, out, name;
  std::optional<std::string> word, lasso;
  std::vector<std::string> files;
  bool trace = false, list = false, check = false;
  int enumerate = -1;

  auto* validate = app.add_subcommand("validate", "Check an automaton or fixture");
  validate->add_option("file", file)->required();

  auto* run = app.add_subcommand("run", "Membership of a word or lasso");
  run->add_option("file", file)->required();
  run->add_option("--word", word, "Whitespace separated symbols");
  run->add_option("--lasso", lasso, "\"u ; v\" for u v^ω");
  run->add_option("--enumerate", enumerate, "List accepted words up to this length (cap $OPAL_MAX_ENUM, default 8)");
  run->add_flag("--trace", trace, "Print the accepting computation");
  run->add_flag("--unicode", unicode);

  auto* compose = app.add_subcommand("compose", "Closure constructions");
  compose->add_option("--op", op)->required()->check(CLI::IsMember({"intersect", "union", "concat", "complement"}));
  compose->add_option("files", files)->required();
  compose->add_option("-o,--output", out);

  auto* empty = app.add_subcommand("empty", "Emptiness check, exit 0 when empty");
  empty->add_option("file", file)->required();
  empty->add_flag("--unicode", unicode);

  auto* incl = app.add_subcommand("includes", "L(impl) ⊆ L(spec), exit 0 when included");
  incl->add_option("spec", file)->required();
  incl->add_option("impl", file2)->required();
  incl->add_flag("--unicode", unicode);

  auto* fixture = app.add_subcommand("fixture", "List, print or check corpus fixtures");
  fixture->add_option("name", name);
  fixture->add_flag("--list", list);
  fixture->add_flag("--check", check, "Replay traces and verdicts");
  fixture->add_flag("--unicode", unicode);

  auto* dot = app.add_subcommand("dot", "Graphviz export");
  dot->add_option("file", file)->required();
  dot->add_option("-o,--output", out);
  dot->add_flag("--unicode", unicode);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate) return cmd_validate(file);
    if (*run) return cmd_run(file, word, lasso, enumerate, trace, unicode);
    if (*compose) return cmd_compose(op, files, out);
    if (*empty) return cmd_empty(file, unicode);
    if (*incl) return cmd_includes(file, file2, unicode);
    if (*fixture) return cmd_fixture(name, list, check, unicode);
    if (*dot) return cmd_dot(file, unicode, out);
  } catch (const CompatibilityError& e) {
    std::cerr << "error: " << e.what() << " (cell " << e.row() << ", " << e.col() << ")\n";
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << " (position " << e.position() << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
