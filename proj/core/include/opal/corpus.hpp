#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opal/io.hpp"

namespace opal {

struct TraceExpectation {
  std::string word;
  bool terminated = true;
  std::vector<std::string> lines;  // ASCII names, Trace text format
};

struct WordVerdict {
  std::string word;
  bool accepted = false;
};

struct LassoVerdict {
  std::string lasso;
  bool accepted = false;
};

struct Fixture {
  std::string name;
  std::string kind;  // opa | omega | opm
  std::string description;
  std::string notes;
  bool derived = false;  // artifact-defined rather than transcribed
  std::optional<Opm> opm;
  std::optional<Automaton> automaton;
  std::vector<TraceExpectation> traces;
  std::vector<WordVerdict> words;
  std::vector<LassoVerdict> lassos;
  std::optional<bool> empty;
};

// $OPAL_FIXTURE_DIR, else the source tree, else the install location.
std::string fixture_dir();
// Sorted fixture names found in fixture_dir().
std::vector<std::string> catalog();
// Throws InputError for unknown names.
Fixture load_fixture(const std::string& name);
Fixture parse_fixture(std::string_view json);

struct Replay {
  bool ok = false;
  std::size_t matched = 0;  // lines matched, the start line included
  std::string mismatch;     // first expected line that no successor produced
};
// Follows the golden lines through step(), choosing the successor whose rendering
// matches each line.
Replay replay_trace(const Opa& a, const TraceExpectation& t);

}  // namespace opal
