#pragma once

// Model files and graph export.
//
// {"name": str, "events": [{"id": str, "controllable": bool}], "states": [str],
//  "initial": str, "marked": [str], "transitions": [{"from": str, "on": str, "to": str}]}

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "automaton.hpp"
#include "json.hpp"

namespace desctl {

using ordered_json = nlohmann::ordered_json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw model_error(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw model_error(path.string() + ": cannot write file");
  out << text;
}

namespace detail {

template <class Json>
const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw model_error(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw model_error(where + ": missing field '" + key + "'");
  return *it;
}

template <class Json>
std::string string_at(const Json& v, const std::string& where) {
  if (!v.is_string()) throw model_error(where + ": expected a string");
  return v.template get<std::string>();
}

template <class Json>
const Json& array_at(const Json& v, const std::string& where) {
  if (!v.is_array()) throw model_error(where + ": expected an array");
  return v;
}

}  // namespace detail

// Structural decoding. Rejects missing fields, wrong types, transitions that
// name undeclared states or events, and duplicate (from, on) pairs. Other
// invariant violations are left for validate().
template <class Json>
AutomatonData data_from_json(const Json& j, const std::string& source = "$") {
  using detail::array_at;
  using detail::field;
  using detail::string_at;
  AutomatonData d;
  d.name = string_at(field(j, "name", source), source + ".name");

  const auto& events = array_at(field(j, "events", source), source + ".events");
  std::set<std::string, std::less<>> event_ids;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto where = source + ".events[" + std::to_string(i) + "]";
    Event e;
    e.id = string_at(field(events[i], "id", where), where + ".id");
    const auto& c = field(events[i], "controllable", where);
    if (!c.is_boolean()) throw model_error(where + ".controllable: expected a boolean");
    e.controllable = c.template get<bool>();
    event_ids.insert(e.id);
    d.events.push_back(std::move(e));
  }

  const auto& states = array_at(field(j, "states", source), source + ".states");
  std::set<std::string, std::less<>> state_ids;
  for (std::size_t i = 0; i < states.size(); ++i) {
    d.states.push_back(string_at(states[i], source + ".states[" + std::to_string(i) + "]"));
    state_ids.insert(d.states.back());
  }

  d.initial = string_at(field(j, "initial", source), source + ".initial");

  const auto& marked = array_at(field(j, "marked", source), source + ".marked");
  for (std::size_t i = 0; i < marked.size(); ++i)
    d.marked.push_back(string_at(marked[i], source + ".marked[" + std::to_string(i) + "]"));

  const auto& rows = array_at(field(j, "transitions", source), source + ".transitions");
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto where = source + ".transitions[" + std::to_string(i) + "]";
    TransitionRow t{string_at(field(rows[i], "from", where), where + ".from"),
                    string_at(field(rows[i], "on", where), where + ".on"),
                    string_at(field(rows[i], "to", where), where + ".to")};
    if (!state_ids.contains(t.from)) throw model_error(where + ".from: unknown state '" + t.from + "'");
    if (!state_ids.contains(t.to)) throw model_error(where + ".to: unknown state '" + t.to + "'");
    if (!event_ids.contains(t.on)) throw model_error(where + ".on: unknown event '" + t.on + "'");
    if (!seen.emplace(t.from, t.on).second)
      throw model_error(where + ": duplicate transition from '" + t.from + "' on '" + t.on + "'");
    d.transitions.push_back(std::move(t));
  }
  return d;
}

inline AutomatonData parse_model(const std::string& text, const std::string& source) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw model_error(source + ": byte " + std::to_string(e.byte) + ": malformed JSON: " + e.what());
  }
  return data_from_json(j, source);
}

inline AutomatonData load_model_data(const std::filesystem::path& path) {
  return parse_model(read_file(path), path.string());
}

inline Automaton load_automaton(const std::filesystem::path& path) {
  auto d = load_model_data(path);
  try {
    return Automaton(d);
  } catch (const model_error& e) {
    throw model_error(path.string() + ": " + e.what());
  }
}

inline ordered_json to_json(const AutomatonData& d) {
  ordered_json j;
  j["name"] = d.name;
  j["events"] = ordered_json::array();
  for (const auto& e : d.events) j["events"].push_back({{"id", e.id}, {"controllable", e.controllable}});
  j["states"] = d.states;
  j["initial"] = d.initial;
  j["marked"] = d.marked;
  j["transitions"] = ordered_json::array();
  for (const auto& t : d.transitions) j["transitions"].push_back({{"from", t.from}, {"on", t.on}, {"to", t.to}});
  return j;
}

inline ordered_json to_json(const Automaton& a) { return to_json(a.to_data()); }

inline std::string dump_model(const Automaton& a) { return to_json(a).dump(2) + "\n"; }

inline void save_automaton(const Automaton& a, const std::filesystem::path& path) {
  write_file(path, dump_model(a));
}

// ---------------------------------------------------------------------------
// Graphviz

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Marked states are double circles; uncontrollable events are dashed edges.
inline std::string to_dot(const Automaton& a) {
  std::ostringstream out;
  out << "digraph " << dot_quote(a.name()) << " {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle];\n";
  if (!a.empty()) {
    out << "  __start [shape=point, label=\"\"];\n";
    for (StateIndex q = 0; q < a.num_states(); ++q)
      out << "  " << dot_quote(a.state_name(q)) << " [shape=" << (a.is_marked(q) ? "doublecircle" : "circle")
          << "];\n";
    out << "  __start -> " << dot_quote(a.state_name(a.initial())) << ";\n";
    for (StateIndex q = 0; q < a.num_states(); ++q)
      for (const auto& e : a.edges(q)) {
        const auto& ev = a.alphabet()[e.event];
        out << "  " << dot_quote(a.state_name(q)) << " -> " << dot_quote(a.state_name(e.target))
            << " [label=" << dot_quote(ev.id) << (ev.controllable ? "" : ", style=dashed") << "];\n";
      }
  }
  out << "}\n";
  return out.str();
}

}  // namespace desctl
