#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "opal/dot.hpp"
#include "opal/io.hpp"
#include "opal/pds.hpp"
#include "support.hpp"

using namespace opal;
using namespace opal::test;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Outcome cli(const std::vector<std::string>& args) {
  std::string cmd = quote(OPAL_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) o.out.append(buf, n);
  int st = pclose(p);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

std::string path_of(const std::string& name) { return (fs::path(fixture_dir()) / (name + ".json")).string(); }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / "opal_cli_test";
  TempDir() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("run prints the golden trace") {
  auto f = fixture("db_queries");
  auto r = cli({"run", path_of("db_queries"), "--word", "A ∪ B ⋈ C ⋈ π_expr D", "--trace"});
  CHECK(r.code == 0);
  auto out = lines(r.out);
  REQUIRE(out.size() == 18);
  CHECK(out[0] == "accept");
  CHECK(std::vector<std::string>(out.begin() + 1, out.end()) == f.traces.at(0).lines);

  auto u = cli({"--unicode", "run", path_of("db_queries"), "--word", "A cup B", "--trace"});
  CHECK(u.code == 0);
  CHECK(u.out.find("∪") != std::string::npos);
}

TEST_CASE("verdicts match the library") {
  std::mt19937 rng(31);
  int checked = 0;
  for (const auto& name : catalog()) {
    auto f = fixture(name);
    if (!f.automaton) continue;
    const auto& a = f.automaton->a;
    std::string file = path_of(name);
    for (const auto& w : f.words) {
      bool lib = accepts_finite(a, parse_word_aliased(a.opm(), w.word)).accepted;
      auto r = cli({"run", file, "--word", w.word});
      INFO(name << ": " << w.word << " -> " << r.out);
      CHECK(r.code == (lib ? 0 : 1));
      ++checked;
    }
    if (f.automaton->omega) {
      for (const auto& l : sample_lassos(rng, a.opm(), 4)) {
        std::string text = format_lasso(a.opm(), l);
        bool lib = accepts_lasso(a, l);
        auto r = cli({"run", file, "--lasso", text});
        INFO(name << ": " << text << " -> " << r.out);
        CHECK(r.code == (lib ? 0 : 1));
        CHECK(lines(r.out).at(0) == (lib ? "accept" : "reject"));
        ++checked;
      }
      bool lib = is_empty_omega(a).empty;
      CHECK(cli({"empty", file}).code == (lib ? 0 : 1));
    } else {
      bool lib = is_empty_finite(a).empty;
      CHECK(cli({"empty", file}).code == (lib ? 0 : 1));
    }
    CHECK(cli({"validate", file}).code == 0);
  }
  CHECK(checked > 40);
}

TEST_CASE("includes") {
  auto ok = cli({"includes", path_of("interrupts"), path_of("interrupts_restricted")});
  CHECK(ok.code == 0);
  CHECK(ok.out == "included\n");
  auto bad = cli({"includes", path_of("interrupts_restricted"), path_of("interrupts")});
  CHECK(bad.code == 1);
  auto out = lines(bad.out);
  REQUIRE(out.size() == 2);
  const std::string tag = "counterexample: ";
  REQUIRE(out[1].rfind(tag, 0) == 0);
  auto l = parse_lasso(omega_of("interrupts").opm(), out[1].substr(tag.size()));
  CHECK(accepts_lasso(omega_of("interrupts"), l));
  CHECK_FALSE(accepts_lasso(omega_of("interrupts_restricted"), l));
}

TEST_CASE("compose then empty") {
  TempDir tmp;
  std::string out = tmp.file("c.json");
  CHECK(cli({"compose", "--op", "complement", path_of("universe_int"), "-o", out}).code == 0);
  auto e = cli({"empty", out});
  CHECK(e.code == 0);
  CHECK(e.out == "empty\n");

  std::string both = tmp.file("i.json");
  CHECK(cli({"compose", "--op", "intersect", path_of("interrupts"), path_of("interrupts_restricted"), "-o", both}).code == 0);
  auto lib = intersect(omega_of("interrupts"), omega_of("interrupts_restricted"));
  auto back = load_automaton(both);
  std::mt19937 rng(4);
  for (const auto& l : sample_lassos(rng, lib.opm(), 20)) CHECK(accepts_lasso(back.a, l) == accepts_lasso(lib, l));

  std::string cat = tmp.file("k.json");
  CHECK(cli({"compose", "--op", "concat", path_of("a_plus_opa"), path_of("dyck_bfae"), "-o", cat}).code == 0);
  CHECK(cli({"run", cat, "--lasso", "a a ; a b"}).code == 0);
  CHECK(cli({"compose", "--op", "complement", path_of("universe_int"), path_of("L1_bfae")}).code == 2);
}

TEST_CASE("input errors exit 2") {
  TempDir tmp;
  CHECK(cli({"run", tmp.file("missing.json"), "--word", "a"}).code == 2);
  CHECK(cli({"fixture", "no_such_fixture"}).code == 2);
  CHECK(cli({"run", path_of("db_queries"), "--word", "A ⊕ B"}).code == 2);
  CHECK(cli({"run", path_of("interrupts"), "--lasso", "call_a ret_a"}).code == 2);
  CHECK(cli({"run", path_of("db_queries"), "--word", "A", "--lasso", "A ; A"}).code == 2);
  write_file(tmp.file("bad.json"), "{ not json");
  CHECK(cli({"validate", tmp.file("bad.json")}).code == 2);
  CHECK(cli({"bogus"}).code == 2);

  // same alphabet, opposite cells
  auto conflict = [&](const char* rel, const std::string& path) {
    write_file(path, std::string(R"({"opm": {"alphabet": ["a", "b"], "cells": {"a": {"b": ")") + rel +
                         R"("}}, "hash_row": {"a": "lt", "b": "lt"}}, "states": ["q"], "initial": ["q"],
      "acceptance": {"kind": "buchi_final", "final": ["q"]}})");
  };
  conflict("lt", tmp.file("lt.json"));
  conflict("gt", tmp.file("gt.json"));
  auto r = cli({"compose", "--op", "intersect", tmp.file("lt.json"), tmp.file("gt.json")});
  CHECK(r.code == 2);
  CHECK(r.out.find("a") != std::string::npos);
  CHECK(r.out.find("b") != std::string::npos);
}

TEST_CASE("fixture subcommand") {
  auto list = cli({"fixture", "--list"});
  CHECK(list.code == 0);
  CHECK(lines(list.out) == catalog());
  for (const auto& name : catalog()) {
    INFO(name);
    CHECK(cli({"fixture", name, "--check"}).code == 0);
  }
  auto shown = cli({"fixture", "a_plus_opa"});
  CHECK(shown.code == 0);
  CHECK(parse_fixture(shown.out).name == "a_plus_opa");
}

TEST_CASE("dot is deterministic") {
  auto a = cli({"dot", path_of("db_queries")});
  auto b = cli({"dot", path_of("db_queries")});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == to_dot(fixture("db_queries").automaton->a, "db_queries"));
}

TEST_CASE("enumerate") {
  auto r = cli({"run", path_of("db_queries"), "--enumerate", "1"});
  CHECK(r.code == 0);
  CHECK(lines(r.out) == std::vector<std::string>{"A", "B", "C", "D", "R"});
  CHECK(cli({"run", path_of("db_queries"), "--enumerate", "99"}).code == 2);
  CHECK(cli({"run", path_of("db_queries"), "--enumerate", "1", "--word", "A"}).code == 2);
}
