#pragma once

// Deterministic finite automata with marked states.
//
// An Automaton is the validated, indexed, immutable form of the 6-tuple
// (states, events, transition map, active sets, initial state, marked states).
// The active-event set of a state is the domain of the transition map at
// that state and is never stored on its own.
//
// AutomatonData is the raw, possibly-invalid description as it appears in a
// model file; validate() reports what is wrong with it.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace desctl {

using StateIndex = std::size_t;
using EventIndex = std::size_t;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// Malformed model (construction or file loading).
class model_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query against an automaton that names an unknown state or event.
class query_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Letters, digits, '.', '_'; first character a letter.
inline bool is_valid_event_id(std::string_view id) {
  auto is_letter = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  if (id.empty() || !is_letter(id.front())) return false;
  return std::all_of(id.begin(), id.end(), [&](char c) {
    return is_letter(c) || is_digit(c) || c == '.' || c == '_';
  });
}

struct Event {
  std::string id;
  bool controllable = true;

  friend bool operator==(const Event&, const Event&) = default;
};

// Ordered set of events carrying the controllable/uncontrollable partition.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<Event> events) {
    for (auto& e : events) add(std::move(e));
  }

  void add(Event e) {
    if (!is_valid_event_id(e.id)) throw model_error("invalid event id '" + e.id + "'");
    auto [it, inserted] = index_.emplace(e.id, events_.size());
    if (!inserted) throw model_error("duplicate event id '" + e.id + "'");
    events_.push_back(std::move(e));
  }

  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const Event& operator[](EventIndex i) const { return events_[i]; }
  auto begin() const noexcept { return events_.begin(); }
  auto end() const noexcept { return events_.end(); }
  const std::vector<Event>& events() const noexcept { return events_; }

  EventIndex find(std::string_view id) const {
    auto it = index_.find(id);
    return it == index_.end() ? npos : it->second;
  }
  bool contains(std::string_view id) const { return find(id) != npos; }
  bool controllable(EventIndex i) const { return events_[i].controllable; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(events_.size());
    for (const auto& e : events_) out.push_back(e.id);
    return out;
  }

  bool is_subset_of(const Alphabet& other) const {
    return std::all_of(events_.begin(), events_.end(),
                       [&](const Event& e) { return other.contains(e.id); });
  }

  // Same events, controllability flags copied from `authority` wherever it
  // declares the event.
  Alphabet relabeled(const Alphabet& authority) const {
    Alphabet out = *this;
    for (auto& e : out.events_) {
      auto j = authority.find(e.id);
      if (j != npos) e.controllable = authority.controllable(j);
    }
    return out;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.events_ == b.events_; }

 private:
  std::vector<Event> events_;
  std::map<std::string, EventIndex, std::less<>> index_;
};

struct TransitionRow {
  std::string from;
  std::string on;
  std::string to;
};

// Raw model description; field names follow the model file format.
struct AutomatonData {
  std::string name;
  std::vector<Event> events;
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> marked;
  std::vector<TransitionRow> transitions;
};

struct Diagnostic {
  std::string invariant;  // short tag, e.g. "initial-in-states"
  std::string element;    // offending element
  std::string message;
};

inline std::vector<Diagnostic> validate(const AutomatonData& d) {
  std::vector<Diagnostic> out;
  auto report = [&](std::string inv, std::string elem, std::string msg) {
    out.push_back({std::move(inv), std::move(elem), std::move(msg)});
  };

  std::map<std::string, bool, std::less<>> events;
  for (const auto& e : d.events) {
    if (!is_valid_event_id(e.id))
      report("event-id-syntax", e.id, "event id '" + e.id + "' is not a valid identifier");
    if (!events.emplace(e.id, e.controllable).second)
      report("event-unique", e.id, "event '" + e.id + "' declared more than once");
  }

  std::map<std::string, bool, std::less<>> states;
  for (const auto& q : d.states) {
    if (q.empty()) report("state-name", q, "empty state name");
    if (!states.emplace(q, true).second)
      report("state-unique", q, "state '" + q + "' declared more than once");
  }

  // Canonical empty automaton: no states and no initial state.
  if (d.states.empty()) {
    if (!d.initial.empty())
      report("initial-in-states", d.initial, "initial state '" + d.initial + "' is not a declared state");
  } else if (!states.contains(d.initial)) {
    report("initial-in-states", d.initial, "initial state '" + d.initial + "' is not a declared state");
  }

  for (const auto& q : d.marked)
    if (!states.contains(q)) report("marked-subset", q, "marked state '" + q + "' is not a declared state");

  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  for (std::size_t i = 0; i < d.transitions.size(); ++i) {
    const auto& t = d.transitions[i];
    std::string where = t.from + " -" + t.on + "-> " + t.to;
    if (!states.contains(t.from)) report("transition-endpoint", where, "source '" + t.from + "' is not a declared state");
    if (!states.contains(t.to)) report("transition-endpoint", where, "target '" + t.to + "' is not a declared state");
    if (!events.contains(t.on)) report("transition-event", where, "event '" + t.on + "' is not in the alphabet");
    if (!seen.emplace(std::pair{t.from, t.on}, i).second)
      report("deterministic", where, "second transition from '" + t.from + "' on '" + t.on + "'");
  }
  return out;
}

struct Edge {
  EventIndex event;
  StateIndex target;
};

class AutomatonBuilder;

class Automaton {
 public:
  // Canonical empty automaton.
  Automaton() = default;

  explicit Automaton(const AutomatonData& d);

  const std::string& name() const noexcept { return name_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t num_states() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }

  const std::string& state_name(StateIndex q) const { return names_[q]; }
  const std::vector<std::string>& state_names() const noexcept { return names_; }
  StateIndex find_state(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? npos : it->second;
  }

  // npos for the empty automaton.
  StateIndex initial() const noexcept { return initial_; }
  bool is_marked(StateIndex q) const { return marked_[q] != 0; }
  std::size_t num_marked() const { return static_cast<std::size_t>(std::count(marked_.begin(), marked_.end(), 1)); }

  // Outgoing transitions in insertion order.
  std::span<const Edge> edges(StateIndex q) const { return edges_[q]; }
  std::size_t num_transitions() const {
    std::size_t n = 0;
    for (const auto& e : edges_) n += e.size();
    return n;
  }

  StateIndex next(StateIndex q, EventIndex e) const { return table_[q * alphabet_.size() + e]; }

  // Active events of q in alphabet order.
  std::vector<EventIndex> active_events(StateIndex q) const {
    std::vector<EventIndex> out;
    for (EventIndex e = 0; e < alphabet_.size(); ++e)
      if (next(q, e) != npos) out.push_back(e);
    return out;
  }

  AutomatonData to_data() const {
    AutomatonData d;
    d.name = name_;
    d.events = alphabet_.events();
    d.states = names_;
    if (initial_ != npos) d.initial = names_[initial_];
    for (StateIndex q = 0; q < names_.size(); ++q)
      if (marked_[q]) d.marked.push_back(names_[q]);
    for (StateIndex q = 0; q < names_.size(); ++q)
      for (const auto& e : edges_[q]) d.transitions.push_back({names_[q], alphabet_[e.event].id, names_[e.target]});
    return d;
  }

  // Copy with a different name.
  Automaton renamed(std::string name) const {
    Automaton out = *this;
    out.name_ = std::move(name);
    return out;
  }

  // Copy whose controllability flags are taken from `authority`.
  Automaton relabeled(const Alphabet& authority) const {
    Automaton out = *this;
    out.alphabet_ = alphabet_.relabeled(authority);
    return out;
  }

 private:
  friend class AutomatonBuilder;

  std::string name_;
  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::map<std::string, StateIndex, std::less<>> index_;
  StateIndex initial_ = npos;
  std::vector<char> marked_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<StateIndex> table_;
};

// Incremental index-based construction used by the algorithms.
class AutomatonBuilder {
 public:
  AutomatonBuilder(std::string name, Alphabet alphabet) {
    a_.name_ = std::move(name);
    a_.alphabet_ = std::move(alphabet);
  }

  const Alphabet& alphabet() const noexcept { return a_.alphabet_; }
  std::size_t num_states() const noexcept { return a_.names_.size(); }

  StateIndex add_state(std::string name, bool marked = false) {
    StateIndex q = a_.names_.size();
    if (!a_.index_.emplace(name, q).second) throw model_error("duplicate state '" + name + "'");
    a_.names_.push_back(std::move(name));
    a_.marked_.push_back(marked ? 1 : 0);
    a_.edges_.emplace_back();
    a_.table_.resize(a_.table_.size() + a_.alphabet_.size(), npos);
    return q;
  }

  void set_marked(StateIndex q, bool marked = true) { a_.marked_.at(q) = marked ? 1 : 0; }
  void set_initial(StateIndex q) {
    if (q >= a_.names_.size()) throw model_error("initial state index out of range");
    a_.initial_ = q;
  }

  void add_transition(StateIndex from, EventIndex on, StateIndex to) {
    if (from >= num_states() || to >= num_states() || on >= a_.alphabet_.size())
      throw model_error("transition index out of range");
    auto& slot = a_.table_[from * a_.alphabet_.size() + on];
    if (slot != npos)
      throw model_error("nondeterministic transition from '" + a_.names_[from] + "' on '" + a_.alphabet_[on].id + "'");
    slot = to;
    a_.edges_[from].push_back({on, to});
  }

  // An automaton with states but no initial state collapses to the canonical
  // empty automaton (keeping its name and alphabet).
  Automaton build() && {
    if (a_.initial_ == npos) {
      Automaton empty;
      empty.name_ = std::move(a_.name_);
      empty.alphabet_ = std::move(a_.alphabet_);
      return empty;
    }
    return std::move(a_);
  }

 private:
  Automaton a_;
};

inline Automaton::Automaton(const AutomatonData& d) {
  auto diags = validate(d);
  if (!diags.empty()) {
    std::string msg = "invalid automaton '" + d.name + "':";
    for (const auto& x : diags) msg += "\n  [" + x.invariant + "] " + x.message;
    throw model_error(msg);
  }
  Alphabet alphabet(d.events);
  std::map<std::string_view, StateIndex> ids;
  AutomatonBuilder b(d.name, alphabet);
  for (const auto& q : d.states) ids.emplace(q, b.add_state(q));
  for (const auto& q : d.marked) b.set_marked(ids.at(q));
  if (!d.states.empty()) b.set_initial(ids.at(d.initial));
  for (const auto& t : d.transitions) b.add_transition(ids.at(t.from), alphabet.find(t.on), ids.at(t.to));
  *this = std::move(b).build();
}

inline std::vector<Diagnostic> validate(const Automaton& a) { return validate(a.to_data()); }

// ---------------------------------------------------------------------------
// Name-based queries

inline StateIndex require_state(const Automaton& a, std::string_view q) {
  auto i = a.find_state(q);
  if (i == npos) throw query_error("unknown state '" + std::string(q) + "' in automaton '" + a.name() + "'");
  return i;
}

inline EventIndex require_event(const Automaton& a, std::string_view e) {
  auto i = a.alphabet().find(e);
  if (i == npos) throw query_error("unknown event '" + std::string(e) + "' in automaton '" + a.name() + "'");
  return i;
}

inline std::vector<std::string> active(const Automaton& a, std::string_view q) {
  std::vector<std::string> out;
  for (auto e : a.active_events(require_state(a, q))) out.push_back(a.alphabet()[e].id);
  return out;
}

inline std::optional<std::string> step(const Automaton& a, std::string_view q, std::string_view e) {
  auto t = a.next(require_state(a, q), require_event(a, e));
  if (t == npos) return std::nullopt;
  return a.state_name(t);
}

struct MembershipVerdict {
  bool in_generated = false;
  bool in_marked = false;
  std::optional<std::size_t> failure_index;  // first position that cannot execute
};

inline MembershipVerdict membership(const Automaton& a, std::span<const std::string> s) {
  std::vector<EventIndex> events;
  events.reserve(s.size());
  for (const auto& e : s) events.push_back(require_event(a, e));

  MembershipVerdict v;
  if (a.empty()) {
    v.failure_index = 0;
    return v;
  }
  StateIndex q = a.initial();
  for (std::size_t i = 0; i < events.size(); ++i) {
    q = a.next(q, events[i]);
    if (q == npos) {
      v.failure_index = i;
      return v;
    }
  }
  v.in_generated = true;
  v.in_marked = a.is_marked(q);
  return v;
}

// States renamed q1..qn in index order.
inline Automaton numbered(const Automaton& a) {
  AutomatonBuilder b(a.name(), a.alphabet());
  if (a.empty()) return std::move(b).build();
  for (StateIndex q = 0; q < a.num_states(); ++q) b.add_state("q" + std::to_string(q + 1), a.is_marked(q));
  for (StateIndex q = 0; q < a.num_states(); ++q)
    for (const auto& e : a.edges(q)) b.add_transition(q, e.event, e.target);
  b.set_initial(a.initial());
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Reachability

// Sub-automaton on the states with keep[q] set, state order preserved. If the
// initial state is dropped the result is the canonical empty automaton.
inline Automaton restrict_states(const Automaton& a, const std::vector<char>& keep) {
  AutomatonBuilder b(a.name(), a.alphabet());
  if (a.empty() || !keep[a.initial()]) return std::move(b).build();
  std::vector<StateIndex> remap(a.num_states(), npos);
  for (StateIndex q = 0; q < a.num_states(); ++q)
    if (keep[q]) remap[q] = b.add_state(a.state_name(q), a.is_marked(q));
  for (StateIndex q = 0; q < a.num_states(); ++q) {
    if (!keep[q]) continue;
    for (const auto& e : a.edges(q))
      if (keep[e.target]) b.add_transition(remap[q], e.event, remap[e.target]);
  }
  b.set_initial(remap[a.initial()]);
  return std::move(b).build();
}

inline std::vector<char> reachable_mask(const Automaton& a) {
  std::vector<char> seen(a.num_states(), 0);
  if (a.empty()) return seen;
  std::deque<StateIndex> queue{a.initial()};
  seen[a.initial()] = 1;
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop_front();
    for (const auto& e : a.edges(q))
      if (!seen[e.target]) {
        seen[e.target] = 1;
        queue.push_back(e.target);
      }
  }
  return seen;
}

inline std::vector<char> coreachable_mask(const Automaton& a) {
  std::vector<std::vector<StateIndex>> preds(a.num_states());
  for (StateIndex q = 0; q < a.num_states(); ++q)
    for (const auto& e : a.edges(q)) preds[e.target].push_back(q);
  std::vector<char> seen(a.num_states(), 0);
  std::deque<StateIndex> queue;
  for (StateIndex q = 0; q < a.num_states(); ++q)
    if (a.is_marked(q)) {
      seen[q] = 1;
      queue.push_back(q);
    }
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop_front();
    for (auto p : preds[q])
      if (!seen[p]) {
        seen[p] = 1;
        queue.push_back(p);
      }
  }
  return seen;
}

inline Automaton accessible(const Automaton& a) { return restrict_states(a, reachable_mask(a)); }
inline Automaton coaccessible(const Automaton& a) { return restrict_states(a, coreachable_mask(a)); }
inline Automaton trim(const Automaton& a) { return coaccessible(accessible(a)); }

inline bool is_nonblocking(const Automaton& a) {
  if (a.empty()) return false;
  auto reach = reachable_mask(a);
  auto coreach = coreachable_mask(a);
  for (StateIndex q = 0; q < a.num_states(); ++q)
    if (reach[q] && !coreach[q]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Language inclusion

struct InclusionResult {
  bool holds = true;
  std::optional<std::vector<std::string>> witness;  // shortest string in L(a) \ L(b)
};

// L(a) ⊆ L(b) on generated languages. Events are matched by id.
inline InclusionResult is_sublanguage(const Automaton& a, const Automaton& b) {
  if (a.empty()) return {};
  if (b.empty()) return {false, std::vector<std::string>{}};

  std::vector<EventIndex> to_b(a.alphabet().size());
  for (EventIndex e = 0; e < a.alphabet().size(); ++e) to_b[e] = b.alphabet().find(a.alphabet()[e].id);

  struct Node {
    StateIndex qa, qb;
    std::size_t parent;
    EventIndex via;
  };
  std::vector<Node> nodes{{a.initial(), b.initial(), npos, npos}};
  std::map<std::pair<StateIndex, StateIndex>, std::size_t> seen{{{a.initial(), b.initial()}, 0}};

  auto path_to = [&](std::size_t n) {
    std::vector<std::string> s;
    for (; nodes[n].parent != npos; n = nodes[n].parent) s.push_back(a.alphabet()[nodes[n].via].id);
    std::reverse(s.begin(), s.end());
    return s;
  };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const StateIndex qa = nodes[i].qa;
    const StateIndex qb = nodes[i].qb;
    for (EventIndex e = 0; e < a.alphabet().size(); ++e) {
      auto ta = a.next(qa, e);
      if (ta == npos) continue;
      auto tb = to_b[e] == npos ? npos : b.next(qb, to_b[e]);
      if (tb == npos) {
        auto w = path_to(i);
        w.push_back(a.alphabet()[e].id);
        return {false, std::move(w)};
      }
      if (seen.emplace(std::pair{ta, tb}, nodes.size()).second) nodes.push_back({ta, tb, i, e});
    }
  }
  return {};
}

}  // namespace desctl
