#pragma once

// Synchronous composition of n automata. Shared events fire jointly in every
// component that declares them; private events interleave.

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "automaton.hpp"

namespace desctl {

struct TupleHash {
  std::size_t operator()(const std::vector<StateIndex>& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto x : v) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Union of alphabets in input order. A shared event must carry the same
// controllability flag everywhere it is declared.
inline Alphabet alphabet_union(std::span<const Automaton> parts) {
  Alphabet out;
  for (const auto& a : parts) {
    for (const auto& e : a.alphabet()) {
      auto i = out.find(e.id);
      if (i == npos) {
        out.add(e);
      } else if (out.controllable(i) != e.controllable) {
        throw model_error("event '" + e.id + "' has conflicting controllability in '" + a.name() + "'");
      }
    }
  }
  return out;
}

// Product automaton plus the provenance the BFS produced: component state
// tuple of each product state and the BFS tree edge that discovered it.
struct Product {
  Automaton automaton;
  std::vector<std::vector<StateIndex>> tuples;
  std::vector<StateIndex> parent;       // npos for the initial state
  std::vector<EventIndex> parent_event; // npos for the initial state

  std::vector<std::string> path_to(StateIndex q) const {
    std::vector<std::string> s;
    for (; parent[q] != npos; q = parent[q]) s.push_back(automaton.alphabet()[parent_event[q]].id);
    return {s.rbegin(), s.rend()};
  }
};

inline Product parallel_product(std::span<const Automaton> parts, const std::string& delim = "|",
                                std::string name = {}) {
  if (parts.empty()) throw model_error("parallel composition needs at least one automaton");
  if (name.empty()) {
    for (std::size_t k = 0; k < parts.size(); ++k) name += (k ? "||" : "") + parts[k].name();
  }
  if (parts.size() > 1) {
    if (delim.empty()) throw model_error("composite state delimiter must be nonempty");
    for (const auto& a : parts)
      for (const auto& q : a.state_names())
        if (q.find(delim) != std::string::npos)
          throw model_error("state '" + q + "' of '" + a.name() + "' contains the delimiter '" + delim + "'");
  }

  Alphabet sigma = alphabet_union(parts);
  const std::size_t n = parts.size();
  const std::size_t m = sigma.size();

  // local[e][k]: index of event e in component k, or npos if undeclared.
  std::vector<std::vector<EventIndex>> local(m, std::vector<EventIndex>(n));
  for (EventIndex e = 0; e < m; ++e)
    for (std::size_t k = 0; k < n; ++k) local[e][k] = parts[k].alphabet().find(sigma[e].id);

  Product out;
  AutomatonBuilder b(std::move(name), sigma);
  bool any_empty = false;
  for (const auto& a : parts) any_empty = any_empty || a.empty();
  if (any_empty) {
    out.automaton = std::move(b).build();
    return out;
  }

  std::unordered_map<std::vector<StateIndex>, StateIndex, TupleHash> seen;
  auto intern = [&](std::vector<StateIndex> t, StateIndex from, EventIndex via) {
    auto it = seen.find(t);
    if (it != seen.end()) return it->second;
    std::string label;
    bool marked = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) label += delim;
      label += parts[k].state_name(t[k]);
      marked = marked && parts[k].is_marked(t[k]);
    }
    auto q = b.add_state(std::move(label), marked);
    seen.emplace(t, q);
    out.tuples.push_back(std::move(t));
    out.parent.push_back(from);
    out.parent_event.push_back(via);
    return q;
  };

  std::vector<StateIndex> init(n);
  for (std::size_t k = 0; k < n; ++k) init[k] = parts[k].initial();
  b.set_initial(intern(std::move(init), npos, npos));

  std::vector<StateIndex> next(n);
  for (StateIndex q = 0; q < out.tuples.size(); ++q) {
    for (EventIndex e = 0; e < m; ++e) {
      bool enabled = true;
      for (std::size_t k = 0; k < n && enabled; ++k) {
        const auto& cur = out.tuples[q];
        if (local[e][k] == npos) {
          next[k] = cur[k];
        } else {
          next[k] = parts[k].next(cur[k], local[e][k]);
          enabled = next[k] != npos;
        }
      }
      if (!enabled) continue;
      auto t = intern(next, q, e);
      b.add_transition(q, e, t);
    }
  }
  out.automaton = std::move(b).build();
  return out;
}

inline Automaton parallel(std::span<const Automaton> parts, const std::string& delim = "|", std::string name = {}) {
  return parallel_product(parts, delim, std::move(name)).automaton;
}

inline Automaton parallel(std::initializer_list<Automaton> parts, const std::string& delim = "|",
                          std::string name = {}) {
  std::vector<Automaton> v(parts);
  return parallel(std::span<const Automaton>(v), delim, std::move(name));
}

// Natural projection: the subsequence of events declared in `sigma`.
inline std::vector<std::string> project(std::span<const std::string> trace, const Alphabet& sigma) {
  std::vector<std::string> out;
  for (const auto& e : trace)
    if (sigma.contains(e)) out.push_back(e);
  return out;
}

}  // namespace desctl
