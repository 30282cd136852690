#include "opal/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include "json.hpp"
#include "opal/error.hpp"

namespace opal {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::string fixture_dir() {
  if (const char* env = std::getenv("OPAL_FIXTURE_DIR"); env && *env) return env;
  if (fs::is_directory(OPAL_SOURCE_FIXTURE_DIR)) return OPAL_SOURCE_FIXTURE_DIR;
  return OPAL_DEFAULT_FIXTURE_DIR;
}

std::vector<std::string> catalog() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(fixture_dir(), ec))
    if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

Fixture parse_fixture(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  Fixture f;
  try {
    f.name = j.at("name").get<std::string>();
    f.kind = j.at("kind").get<std::string>();
    f.description = j.value("description", "");
    f.notes = j.value("notes", "");
    f.derived = j.value("derived", false);
    if (j.contains("opm")) f.opm = parse_opm(j.at("opm").dump());
    if (j.contains("automaton")) {
      f.automaton = parse_automaton(j.at("automaton").dump());
      if (!f.opm) f.opm = f.automaton->a.opm();
    }
    for (const auto& t : j.value("traces", Json::array())) {
      TraceExpectation e;
      e.word = t.at("word").get<std::string>();
      e.terminated = t.value("terminated", true);
      e.lines = t.at("lines").get<std::vector<std::string>>();
      f.traces.push_back(std::move(e));
    }
    for (const auto& w : j.value("words", Json::array()))
      f.words.push_back({w.at("word").get<std::string>(), w.at("accepted").get<bool>()});
    for (const auto& l : j.value("lassos", Json::array()))
      f.lassos.push_back({l.at("lasso").get<std::string>(), l.at("accepted").get<bool>()});
    if (j.contains("empty")) f.empty = j.at("empty").get<bool>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("bad fixture: ") + e.what());
  }
  if (f.kind != "opm" && !f.automaton) throw InputError("fixture '" + f.name + "' has no automaton");
  return f;
}

Fixture load_fixture(const std::string& name) {
  auto path = fs::path(fixture_dir()) / (name + ".json");
  if (!fs::exists(path)) throw InputError("unknown fixture '" + name + "'");
  return parse_fixture(read_file(path.string()));
}

Replay replay_trace(const Opa& a, const TraceExpectation& t) {
  Replay r;
  if (t.lines.empty()) return r;
  Word w = parse_word_aliased(a.opm(), t.word);
  TraceOptions opt;
  opt.terminated = t.terminated;
  std::optional<Configuration> cur;
  for (State q : a.initial()) {
    auto c = initial_configuration(q);
    if ("start | " + format_configuration(a, c, w, opt) == t.lines[0]) {
      cur = c;
      break;
    }
  }
  if (!cur) {
    r.mismatch = t.lines[0];
    return r;
  }
  r.matched = 1;
  for (std::size_t i = 1; i < t.lines.size(); ++i) {
    bool found = false;
    for (const auto& s : step(a, *cur, w, t.terminated)) {
      if (std::string(move_name(s.kind)) + " | " + format_configuration(a, s.next, w, opt) == t.lines[i]) {
        cur = s.next;
        found = true;
        break;
      }
    }
    if (!found) {
      r.mismatch = t.lines[i];
      return r;
    }
    ++r.matched;
  }
  r.ok = true;
  return r;
}

}  // namespace opal
