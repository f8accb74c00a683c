#pragma once

// Step-by-step execution of a plant under a set of supervisors. Components are
// stepped individually; the composed closed loop is never built here.
//
// Random policy: std::mt19937_64 seeded with the 64-bit seed; at each step
// the next engine output modulo the size of the enabled set selects an event,
// the enabled set being listed in plant alphabet order. std::mt19937_64's
// output sequence is fixed by the C++ standard, so traces are reproducible
// across platforms and standard libraries.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "automaton.hpp"
#include "control.hpp"
#include "io.hpp"

namespace desctl::sim {

struct Configuration {
  std::string plant_state;
  std::vector<std::string> sup_states;  // SupervisorSet order

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

// Firing an event that is not enabled. `blocker` is "plant" or the name of
// the supervisor that disables it.
class blocked_error : public std::runtime_error {
 public:
  blocked_error(std::string event, std::string blocker)
      : std::runtime_error("event '" + event + "' is not enabled: blocked by " + blocker),
        event_(std::move(event)),
        blocker_(std::move(blocker)) {}
  const std::string& event() const noexcept { return event_; }
  const std::string& blocker() const noexcept { return blocker_; }

 private:
  std::string event_, blocker_;
};

struct ScriptedPolicy {
  std::vector<std::string> events;
};
struct RandomPolicy {
  std::uint64_t seed = 0;
};
struct InteractivePolicy {
  std::istream* in = &std::cin;
  std::ostream* out = &std::cout;
};
using Policy = std::variant<ScriptedPolicy, RandomPolicy, InteractivePolicy>;

struct TraceStep {
  std::string event;
  Configuration after;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct RunReport {
  std::vector<TraceStep> trace;
  std::size_t steps_taken = 0;
  bool deadlocked = false;
  std::optional<std::string> blocked_event;
  std::map<int, std::size_t> completions;  // category -> count
  bool marked = false;                     // final configuration marked in every component

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Completion events per product category.
inline const std::map<int, std::string>& completion_events() {
  static const std::map<int, std::string> m{{1, "A.done1"}, {2, "A.done2"}};
  return m;
}

// Plant plus supervisors, with event index maps prepared once.
class ClosedLoop {
 public:
  ClosedLoop(Automaton plant, SupervisorSet sups) : plant_(std::move(plant)) {
    if (plant_.empty()) throw model_error("plant '" + plant_.name() + "' is empty");
    for (auto& s : sups) {
      require_sub_alphabet(plant_, s);
      if (s.empty()) throw model_error("supervisor '" + s.name() + "' is empty");
      std::vector<EventIndex> map(plant_.alphabet().size());
      for (EventIndex e = 0; e < map.size(); ++e) map[e] = s.alphabet().find(plant_.alphabet()[e].id);
      local_.push_back(std::move(map));
      sups_.push_back(std::move(s));
    }
  }

  const Automaton& plant() const noexcept { return plant_; }
  const SupervisorSet& supervisors() const noexcept { return sups_; }

  using State = std::vector<StateIndex>;  // plant first, then supervisors

  State initial_state() const {
    State s{plant_.initial()};
    for (const auto& a : sups_) s.push_back(a.initial());
    return s;
  }

  // npos if enabled; 0 if the plant blocks; k if supervisor k-1 blocks.
  std::size_t blocker(const State& s, EventIndex e) const {
    if (plant_.next(s[0], e) == npos) return 0;
    for (std::size_t k = 0; k < sups_.size(); ++k) {
      auto le = local_[k][e];
      if (le != npos && sups_[k].next(s[k + 1], le) == npos) return k + 1;
    }
    return npos;
  }

  std::vector<EventIndex> enabled_events(const State& s) const {
    std::vector<EventIndex> out;
    for (EventIndex e = 0; e < plant_.alphabet().size(); ++e)
      if (blocker(s, e) == npos) out.push_back(e);
    return out;
  }

  State fire_event(const State& s, EventIndex e) const {
    auto b = blocker(s, e);
    if (b != npos) throw blocked_error(plant_.alphabet()[e].id, b == 0 ? std::string("plant") : sups_[b - 1].name());
    State t = s;
    t[0] = plant_.next(s[0], e);
    for (std::size_t k = 0; k < sups_.size(); ++k)
      if (local_[k][e] != npos) t[k + 1] = sups_[k].next(s[k + 1], local_[k][e]);
    return t;
  }

  bool is_marked(const State& s) const {
    if (!plant_.is_marked(s[0])) return false;
    for (std::size_t k = 0; k < sups_.size(); ++k)
      if (!sups_[k].is_marked(s[k + 1])) return false;
    return true;
  }

  Configuration configuration(const State& s) const {
    Configuration c{plant_.state_name(s[0]), {}};
    for (std::size_t k = 0; k < sups_.size(); ++k) c.sup_states.push_back(sups_[k].state_name(s[k + 1]));
    return c;
  }

  State state_of(const Configuration& c) const {
    if (c.sup_states.size() != sups_.size())
      throw query_error("configuration has " + std::to_string(c.sup_states.size()) + " supervisor states, expected " +
                        std::to_string(sups_.size()));
    State s{require_state(plant_, c.plant_state)};
    for (std::size_t k = 0; k < sups_.size(); ++k) s.push_back(require_state(sups_[k], c.sup_states[k]));
    return s;
  }

  EventIndex event_index(std::string_view e) const { return require_event(plant_, e); }

  // Name-based surface.
  Configuration initial() const { return configuration(initial_state()); }

  std::vector<std::string> enabled(const Configuration& c) const {
    std::vector<std::string> out;
    for (auto e : enabled_events(state_of(c))) out.push_back(plant_.alphabet()[e].id);
    return out;
  }

  Configuration fire(const Configuration& c, std::string_view e) const {
    return configuration(fire_event(state_of(c), event_index(e)));
  }

 private:
  Automaton plant_;
  SupervisorSet sups_;
  std::vector<std::vector<EventIndex>> local_;
};

inline std::vector<std::string> enabled(const Automaton& plant, const SupervisorSet& sups, const Configuration& c) {
  return ClosedLoop(plant, sups).enabled(c);
}

inline Configuration fire(const Automaton& plant, const SupervisorSet& sups, const Configuration& c,
                          std::string_view e) {
  return ClosedLoop(plant, sups).fire(c, e);
}

namespace detail {

inline void count_completion(const std::string& event, RunReport& r) {
  for (const auto& [cat, id] : completion_events())
    if (id == event) ++r.completions[cat];
}

inline void finish(const ClosedLoop& loop, const ClosedLoop::State& s, std::size_t max_steps, RunReport& r) {
  r.steps_taken = r.trace.size();
  r.marked = loop.is_marked(s);
  r.deadlocked = r.steps_taken < max_steps && loop.enabled_events(s).empty();
}

inline RunReport fresh_report() {
  RunReport r;
  for (const auto& [cat, id] : completion_events()) r.completions[cat] = 0;
  return r;
}

inline void print_enabled(const ClosedLoop& loop, const std::vector<EventIndex>& en, std::ostream& out) {
  out << "enabled events:\n";
  for (std::size_t i = 0; i < en.size(); ++i) out << "  [" << i + 1 << "] " << loop.plant().alphabet()[en[i]].id << "\n";
}

inline void print_configuration(const Configuration& c, std::ostream& out) {
  out << "plant: " << c.plant_state << "\n";
  for (std::size_t k = 0; k < c.sup_states.size(); ++k) out << "sup[" << k << "]: " << c.sup_states[k] << "\n";
}

}  // namespace detail

// Script events outside the plant alphabet are rejected before any step.
inline RunReport run(const ClosedLoop& loop, const Policy& policy, std::size_t max_steps) {
  RunReport r = detail::fresh_report();
  auto s = loop.initial_state();

  if (const auto* script = std::get_if<ScriptedPolicy>(&policy)) {
    std::vector<EventIndex> events;
    for (const auto& e : script->events) events.push_back(loop.event_index(e));
    for (std::size_t i = 0; i < events.size() && r.trace.size() < max_steps; ++i) {
      if (loop.blocker(s, events[i]) != npos) {
        r.blocked_event = script->events[i];
        break;
      }
      s = loop.fire_event(s, events[i]);
      r.trace.push_back({script->events[i], loop.configuration(s)});
      detail::count_completion(script->events[i], r);
    }
  } else if (const auto* rnd = std::get_if<RandomPolicy>(&policy)) {
    std::mt19937_64 gen(rnd->seed);
    while (r.trace.size() < max_steps) {
      auto en = loop.enabled_events(s);
      if (en.empty()) break;
      auto e = en[gen() % en.size()];
      s = loop.fire_event(s, e);
      const auto& id = loop.plant().alphabet()[e].id;
      r.trace.push_back({id, loop.configuration(s)});
      detail::count_completion(id, r);
    }
  } else {
    const auto& io = std::get<InteractivePolicy>(policy);
    std::istream& in = *io.in;
    std::ostream& out = *io.out;
    std::vector<ClosedLoop::State> history{s};
    while (r.trace.size() < max_steps) {
      auto en = loop.enabled_events(s);
      if (en.empty()) {
        out << "deadlock: no event is enabled\n";
        break;
      }
      detail::print_enabled(loop, en, out);
      out << "> " << std::flush;
      std::string line;
      if (!std::getline(in, line)) break;
      auto first = line.find_first_not_of(" \t\r");
      line = first == std::string::npos ? "" : line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
      if (line == "quit" || line == "q") break;
      if (line == "state") {
        detail::print_configuration(loop.configuration(s), out);
        continue;
      }
      if (line == "undo") {
        if (r.trace.empty()) {
          out << "nothing to undo\n";
          continue;
        }
        const auto& last = r.trace.back().event;
        for (const auto& [cat, id] : completion_events())
          if (id == last) --r.completions[cat];
        r.trace.pop_back();
        history.pop_back();
        s = history.back();
        continue;
      }
      std::size_t choice = 0;
      try {
        std::size_t used = 0;
        choice = std::stoul(line, &used);
        if (used != line.size()) choice = 0;
      } catch (const std::exception&) {
        choice = 0;
      }
      if (choice == 0 || choice > en.size()) {
        out << "enter a number between 1 and " << en.size() << ", 'undo', 'state' or 'quit'\n";
        continue;
      }
      auto e = en[choice - 1];
      s = loop.fire_event(s, e);
      history.push_back(s);
      const auto& id = loop.plant().alphabet()[e].id;
      r.trace.push_back({id, loop.configuration(s)});
      detail::count_completion(id, r);
    }
  }
  detail::finish(loop, s, max_steps, r);
  return r;
}

inline RunReport run(const Automaton& plant, const SupervisorSet& sups, const Policy& policy, std::size_t max_steps) {
  return run(ClosedLoop(plant, sups), policy, max_steps);
}

// Re-fires the trace from the initial configuration; every event must be
// enabled and every recorded configuration reproduced.
inline bool replay(const ClosedLoop& loop, const RunReport& report) {
  try {
    auto s = loop.initial_state();
    std::map<int, std::size_t> counts;
    for (const auto& [cat, id] : completion_events()) counts[cat] = 0;
    for (const auto& step : report.trace) {
      auto e = loop.event_index(step.event);
      if (loop.blocker(s, e) != npos) return false;
      s = loop.fire_event(s, e);
      if (loop.configuration(s) != step.after) return false;
      for (const auto& [cat, id] : completion_events())
        if (id == step.event) ++counts[cat];
    }
    return report.steps_taken == report.trace.size() && counts == report.completions &&
           report.marked == loop.is_marked(s);
  } catch (const std::exception&) {
    return false;
  }
}

inline bool replay(const Automaton& plant, const SupervisorSet& sups, const RunReport& report) {
  return replay(ClosedLoop(plant, sups), report);
}

// ---------------------------------------------------------------------------
// Report JSON

inline ordered_json to_json(const Configuration& c) {
  return ordered_json{{"plant_state", c.plant_state}, {"sup_states", c.sup_states}};
}

inline ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["trace"] = ordered_json::array();
  for (const auto& t : r.trace) j["trace"].push_back({{"event", t.event}, {"configuration", to_json(t.after)}});
  j["steps_taken"] = r.steps_taken;
  j["deadlocked"] = r.deadlocked;
  j["blocked_event"] = r.blocked_event ? ordered_json(*r.blocked_event) : ordered_json(nullptr);
  ordered_json c = ordered_json::object();
  for (const auto& [cat, n] : r.completions) c[std::to_string(cat)] = n;
  j["completions"] = c;
  j["marked"] = r.marked;
  return j;
}

inline RunReport report_from_json(const ordered_json& j) {
  RunReport r;
  try {
    for (const auto& t : j.at("trace")) {
      const auto& c = t.at("configuration");
      r.trace.push_back({t.at("event").get<std::string>(),
                         {c.at("plant_state").get<std::string>(), c.at("sup_states").get<std::vector<std::string>>()}});
    }
    r.steps_taken = j.at("steps_taken").get<std::size_t>();
    r.deadlocked = j.at("deadlocked").get<bool>();
    if (!j.at("blocked_event").is_null()) r.blocked_event = j.at("blocked_event").get<std::string>();
    for (const auto& [k, v] : j.at("completions").items()) r.completions[std::stoi(k)] = v.get<std::size_t>();
    r.marked = j.at("marked").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw model_error(std::string("malformed run report: ") + e.what());
  }
  return r;
}

// Whitespace-separated event ids; '#' starts a comment.
inline std::vector<std::string> parse_script(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string w;
    while (words >> w) out.push_back(w);
  }
  return out;
}

}  // namespace desctl::sim
