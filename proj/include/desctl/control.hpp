#pragma once

// Modular supervision over sub-alphabets. A supervisor constrains only the
// events its alphabet declares; every other plant event stays enabled. The
// controllable/uncontrollable partition is always read from the plant.

#include <optional>
#include <string>
#include <vector>

#include "automaton.hpp"
#include "compose.hpp"

namespace desctl {

using SupervisorSet = std::vector<Automaton>;

// Delimiter between the plant part and the supervisor parts of closed-loop
// state names. Plant states are often composite names joined with "|".
inline const std::string kSupervisionDelimiter = "||";

class alphabet_error : public model_error {
 public:
  using model_error::model_error;
};

inline void require_sub_alphabet(const Automaton& plant, const Automaton& sup) {
  for (const auto& e : sup.alphabet())
    if (!plant.alphabet().contains(e.id))
      throw alphabet_error("event '" + e.id + "' of '" + sup.name() + "' is not in the alphabet of plant '" +
                           plant.name() + "'");
}

namespace detail {

inline std::vector<Automaton> supervised_parts(const Automaton& plant, const SupervisorSet& sups) {
  std::vector<Automaton> parts{plant};
  for (const auto& s : sups) {
    require_sub_alphabet(plant, s);
    parts.push_back(s.relabeled(plant.alphabet()));
  }
  return parts;
}

}  // namespace detail

inline Product closed_loop_product(const Automaton& plant, const SupervisorSet& sups) {
  auto parts = detail::supervised_parts(plant, sups);
  std::string name = plant.name();
  for (const auto& s : sups) name += "/" + s.name();
  return parallel_product(parts, kSupervisionDelimiter, std::move(name));
}

inline Automaton closed_loop(const Automaton& plant, const SupervisorSet& sups) {
  return closed_loop_product(plant, sups).automaton;
}

// ---------------------------------------------------------------------------
// Controllability

struct Counterexample {
  std::vector<std::string> string;  // s, in the closed loop
  std::string event;                // uncontrollable e disabled after s
};

struct ControllabilityReport {
  bool controllable = true;
  std::optional<Counterexample> counterexample;
  std::size_t states_checked = 0;
};

// Breadth-first over plant || sup with events in plant declaration order, so
// the first violating state found yields a shortest counterexample.
inline ControllabilityReport check_controllability(const Automaton& plant, const Automaton& sup) {
  auto prod = closed_loop_product(plant, {sup});
  const auto& loop = prod.automaton;
  ControllabilityReport r;
  if (loop.empty()) return r;

  // loop alphabet == plant alphabet, same order
  std::vector<EventIndex> in_sup(plant.alphabet().size());
  for (EventIndex e = 0; e < plant.alphabet().size(); ++e) in_sup[e] = sup.alphabet().find(plant.alphabet()[e].id);

  for (StateIndex q = 0; q < loop.num_states(); ++q) {
    ++r.states_checked;
    const auto p = prod.tuples[q][0];
    for (EventIndex e = 0; e < plant.alphabet().size(); ++e) {
      if (plant.alphabet().controllable(e) || in_sup[e] == npos) continue;
      if (plant.next(p, e) == npos || loop.next(q, e) != npos) continue;
      r.controllable = false;
      r.counterexample = Counterexample{prod.path_to(q), plant.alphabet()[e].id};
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Nonconflict

struct ConflictReport {
  bool nonconflicting = true;
  std::optional<std::vector<std::string>> witness;  // shortest string into a blocking state
  std::size_t states = 0;
};

inline ConflictReport check_nonconflicting(const Automaton& plant, const SupervisorSet& sups) {
  auto prod = closed_loop_product(plant, sups);
  const auto& loop = prod.automaton;
  ConflictReport r;
  r.states = loop.num_states();
  if (loop.empty()) {
    r.nonconflicting = false;
    r.witness = std::vector<std::string>{};
    return r;
  }
  auto co = coreachable_mask(loop);
  for (StateIndex q = 0; q < loop.num_states(); ++q)
    if (!co[q]) {
      r.nonconflicting = false;
      r.witness = prod.path_to(q);
      break;
    }
  return r;
}

// ---------------------------------------------------------------------------
// Supremal controllable sublanguage

// Starts from the reachable part of plant || spec and repeatedly deletes
// states where an uncontrollable plant-active event is disabled, together
// with blocking states, recomputing reachability each round. Surviving
// states are numbered q1..qn in breadth-first order.
inline Automaton supcon(const Automaton& plant, const Automaton& spec) {
  auto prod = closed_loop_product(plant, {spec});
  const auto& loop = prod.automaton;
  std::string name = "supcon(" + plant.name() + "," + spec.name() + ")";
  if (loop.empty()) return AutomatonBuilder(name, loop.alphabet()).build();

  const std::size_t n = loop.num_states();
  std::vector<char> alive(n, 1);
  for (;;) {
    bool changed = false;
    // controllability: an uncontrollable plant-active event must lead to a live state
    for (StateIndex q = 0; q < n; ++q) {
      if (!alive[q]) continue;
      const auto p = prod.tuples[q][0];
      for (EventIndex e = 0; e < plant.alphabet().size(); ++e) {
        if (plant.alphabet().controllable(e) || plant.next(p, e) == npos) continue;
        auto t = loop.next(q, e);
        if (t == npos || !alive[t]) {
          alive[q] = 0;
          changed = true;
          break;
        }
      }
    }
    // reachability and coreachability within the live part
    auto live = restrict_states(loop, alive);
    auto trimmed = trim(live);
    std::vector<char> keep(n, 0);
    for (const auto& qname : trimmed.state_names()) keep[loop.find_state(qname)] = 1;
    if (keep != alive) changed = true;
    alive = std::move(keep);
    if (!changed) break;
  }
  return numbered(restrict_states(loop, alive).renamed(name));
}

}  // namespace desctl
