#pragma once

// Reference corpus: a manufacturing cell with three conveyors (C1..C3), a
// transfer robot (R), a lathe (L), a milling machine (M), a painting machine
// (P) and an assembly machine (A), connected through one-slot buffers B1..B8.
// Buffers carry no automata; they appear only in event descriptions.
//
// Two controllability partitions are shipped:
//   sec28 (default)  uncontrollable = {C1.move, C2.move, C3.move, A.done1, A.done2}
//   sec2             uncontrollable = {C1.load, C2.load, C3.load, A.done1, A.done2}

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "automaton.hpp"
#include "compose.hpp"
#include "espec.hpp"
#include "io.hpp"

namespace desctl::fms {

enum class Partition { sec28, sec2 };

inline std::string_view partition_name(Partition p) { return p == Partition::sec28 ? "sec28" : "sec2"; }

inline Partition parse_partition(std::string_view s) {
  if (s == "sec28") return Partition::sec28;
  if (s == "sec2") return Partition::sec2;
  throw model_error("unknown partition '" + std::string(s) + "' (expected sec28 or sec2)");
}

struct EventInfo {
  std::string id;
  std::string symbol;  // e.g. e_{C,1,1}
  std::string description;
  bool controllable_sec28;
  bool controllable_sec2;

  bool controllable(Partition p) const { return p == Partition::sec28 ? controllable_sec28 : controllable_sec2; }
};

// The 34 plant events, in machine order C1, C2, C3, R, L, M, P, A.
inline const std::vector<EventInfo>& event_table() {
  static const std::vector<EventInfo> table = [] {
    std::vector<EventInfo> t;
    for (int i = 1; i <= 3; ++i) {
      auto c = std::to_string(i);
      std::string belt = "C" + c;
      std::string target = i == 3 ? "B8" : "B" + c;
      t.push_back({belt + ".load", "e_{C," + c + ",1}", "product loaded on conveyor " + belt, true, false});
      t.push_back({belt + ".move", "e_{C," + c + ",2}", "move conveyor " + belt + " towards " + target, false, true});
    }
    for (int l = 1; l <= 7; ++l) {
      auto b = std::to_string(l);
      t.push_back({"R.pick" + b, "e_{R," + b + "}", "robot picks a product from buffer B" + b, true, true});
    }
    for (int l = 1; l <= 7; ++l) {
      auto b = std::to_string(l);
      t.push_back({"R.place" + b, "e_{R," + std::to_string(l + 7) + "}", "robot places a product in buffer B" + b,
                   true, true});
    }
    t.push_back({"L.start1", "e_{L,1}", "lathe loads a category-1 product and starts machining", true, true});
    t.push_back({"L.start2", "e_{L,2}", "lathe loads a category-2 product and starts machining", true, true});
    t.push_back({"L.done1", "e_{L,3}", "lathe completes machining of a category-1 product", true, true});
    t.push_back({"L.done2", "e_{L,4}", "lathe completes machining of a category-2 product", true, true});
    t.push_back({"M.start", "e_{M,1}", "milling machine loads a product and starts machining", true, true});
    t.push_back({"M.done", "e_{M,2}", "milling machine completes machining", true, true});
    t.push_back({"P.start", "e_{P,1}", "painting machine loads a product and starts painting", true, true});
    t.push_back({"P.done", "e_{P,2}", "painting machine completes painting", true, true});
    t.push_back({"A.on", "e_{A,1}", "start the assembly machine", true, true});
    t.push_back({"A.fromB5", "e_{A,2}", "assemble a product from buffer B5", true, true});
    t.push_back({"A.fromB6", "e_{A,3}", "assemble a product from buffer B6", true, true});
    t.push_back({"A.fromB7", "e_{A,4}", "assemble a product from buffer B7", true, true});
    t.push_back({"A.done1", "e_{A,5}", "assembly of a category-1 product completed", false, false});
    t.push_back({"A.done2", "e_{A,6}", "assembly of a category-2 product completed", false, false});
    return t;
  }();
  return table;
}

inline const EventInfo& event_info(std::string_view id) {
  for (const auto& e : event_table())
    if (e.id == id) return e;
  throw query_error("unknown corpus event '" + std::string(id) + "'");
}

// Plant alphabet under the given partition, in table order.
inline Alphabet plant_alphabet(Partition p = Partition::sec28) {
  Alphabet sigma;
  for (const auto& e : event_table()) sigma.add({e.id, e.controllable(p)});
  return sigma;
}

inline Automaton with_partition(const Automaton& a, Partition p) { return a.relabeled(plant_alphabet(p)); }

inline const std::array<std::string_view, 8>& component_kinds() {
  static const std::array<std::string_view, 8> kinds{"C1", "C2", "C3", "R", "L", "M", "P", "A"};
  return kinds;
}

namespace detail {

struct Row {
  int from;
  std::string_view on;
  int to;
};

// States are named q<tag>_1 .. q<tag>_n; state 1 is initial.
inline Automaton machine(const std::string& name, const std::string& tag, int num_states,
                         const std::vector<std::string>& events, const std::vector<int>& marked,
                         const std::vector<Row>& rows, Partition p) {
  Alphabet sigma;
  for (const auto& id : events) sigma.add({id, event_info(id).controllable(p)});
  AutomatonBuilder b(name, sigma);
  for (int i = 1; i <= num_states; ++i) b.add_state("q" + tag + "_" + std::to_string(i));
  for (int m : marked) b.set_marked(static_cast<StateIndex>(m - 1));
  for (const auto& r : rows)
    b.add_transition(static_cast<StateIndex>(r.from - 1), sigma.find(r.on), static_cast<StateIndex>(r.to - 1));
  b.set_initial(0);
  return std::move(b).build();
}

}  // namespace detail

inline Automaton build(std::string_view kind, Partition p = Partition::sec28) {
  using detail::machine;
  std::string k(kind);
  if (k == "C1" || k == "C2" || k == "C3") {
    return machine(k, k, 2, {k + ".load", k + ".move"}, {1}, {{1, k + ".load", 2}, {2, k + ".move", 1}}, p);
  }
  if (k == "R") {
    std::vector<std::string> events;
    for (int l = 1; l <= 7; ++l) events.push_back("R.pick" + std::to_string(l));
    for (int l = 1; l <= 7; ++l) events.push_back("R.place" + std::to_string(l));
    std::vector<detail::Row> rows;
    for (int l = 0; l < 7; ++l) rows.push_back({1, events[l], 2});
    for (int l = 7; l < 14; ++l) rows.push_back({2, events[l], 1});
    return machine("R", "R", 2, events, {1}, rows, p);
  }
  if (k == "L") {
    return machine("L", "L", 2, {"L.start1", "L.start2", "L.done1", "L.done2"}, {1},
                   {{1, "L.start1", 2}, {1, "L.start2", 2}, {2, "L.done1", 1}, {2, "L.done2", 1}}, p);
  }
  if (k == "M") return machine("M", "M", 2, {"M.start", "M.done"}, {1}, {{1, "M.start", 2}, {2, "M.done", 1}}, p);
  if (k == "P") return machine("P", "P", 2, {"P.start", "P.done"}, {1}, {{1, "P.start", 2}, {2, "P.done", 1}}, p);
  if (k == "A") {
    return machine("A", "A", 3, {"A.on", "A.fromB5", "A.fromB6", "A.fromB7", "A.done1", "A.done2"}, {1},
                   {{1, "A.on", 2},
                    {2, "A.fromB5", 3},
                    {2, "A.fromB6", 3},
                    {2, "A.fromB7", 3},
                    {3, "A.done1", 1},
                    {3, "A.done2", 1}},
                   p);
  }
  throw query_error("unknown component kind '" + k + "' (expected one of C1 C2 C3 R L M P A)");
}

inline std::vector<Automaton> components(Partition p = Partition::sec28) {
  std::vector<Automaton> out;
  for (auto k : component_kinds()) out.push_back(build(k, p));
  return out;
}

// G = C1 || C2 || C3 || R || L || M || P || A
inline Automaton build_total(Partition p = Partition::sec28) {
  auto parts = components(p);
  return parallel(std::span<const Automaton>(parts), "|", "G");
}

inline std::string spec_text(int category) {
  if (category == 1)
    return "pc((C1.load R.pick1 R.place3 M.start R.pick3 R.place4 L.start1 R.pick4 "
           "(R.place6 + R.place7 C3.load P.start C3.load) A.on)*)";
  if (category == 2)
    return "pc((C2.load R.pick2 R.place4 L.start2 R.pick4 (R.place5 + R.place7 C3.load P.start C3.load) A.on)*)";
  throw query_error("unknown product category " + std::to_string(category) + " (expected 1 or 2)");
}

// Hand-built supervisors, every state marked.
inline Automaton build_supervisor(int category, Partition p = Partition::sec28) {
  if (category == 1) {
    return detail::machine("S1", "S1", 14,
                           {"C1.load", "C3.load", "R.pick1", "R.pick3", "R.pick4", "R.place4", "R.place3", "R.place6",
                            "R.place7", "M.start", "L.start1", "P.start", "A.on"},
                           {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14},
                           {{1, "C1.load", 2},
                            {2, "R.pick1", 3},
                            {3, "R.place3", 4},
                            {4, "M.start", 5},
                            {5, "R.pick3", 6},
                            {6, "R.place4", 7},
                            {7, "L.start1", 8},
                            {8, "R.pick4", 9},
                            {9, "R.place6", 10},
                            {9, "R.place7", 11},
                            {10, "A.on", 1},
                            {11, "C3.load", 12},
                            {12, "P.start", 13},
                            {13, "C3.load", 14},
                            {14, "A.on", 1}},
                           p);
  }
  if (category == 2) {
    return detail::machine("S2", "S2", 11,
                           {"C2.load", "C3.load", "R.pick2", "R.pick4", "R.place4", "R.place5", "R.place7",
                            "L.start2", "P.start", "A.on"},
                           {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11},
                           {{1, "C2.load", 2},
                            {2, "R.pick2", 3},
                            {3, "R.place4", 4},
                            {4, "L.start2", 5},
                            {5, "R.pick4", 6},
                            {6, "R.place5", 7},
                            {6, "R.place7", 8},
                            {7, "A.on", 1},
                            {8, "C3.load", 9},
                            {9, "P.start", 10},
                            {10, "C3.load", 11},
                            {11, "A.on", 1}},
                           p);
  }
  throw query_error("unknown product category " + std::to_string(category) + " (expected 1 or 2)");
}

// Compiled over the events the expression mentions, flags from the partition.
inline Alphabet spec_alphabet(int category, Partition p = Partition::sec28) {
  std::vector<std::string> ids;
  collect_symbols(*parse(spec_text(category)), ids);
  Alphabet sigma;
  for (const auto& e : event_table())
    if (std::find(ids.begin(), ids.end(), e.id) != ids.end()) sigma.add({e.id, e.controllable(p)});
  return sigma;
}

// Languages of the machines written as expressions over their events, used
// to cross-check the builders.
inline std::string machine_language_text(std::string_view kind) {
  std::string k(kind);
  if (k == "C1" || k == "C2" || k == "C3") return "(" + k + ".load " + k + ".move)*";
  if (k == "R")
    return "((R.pick1 + R.pick2 + R.pick3 + R.pick4 + R.pick5 + R.pick6 + R.pick7) "
           "(R.place1 + R.place2 + R.place3 + R.place4 + R.place5 + R.place6 + R.place7))*";
  if (k == "L") return "((L.start1 + L.start2) (L.done1 + L.done2))*";
  if (k == "M") return "(M.start M.done)*";
  if (k == "P") return "(P.start P.done)*";
  if (k == "A") return "(A.on (A.fromB5 + A.fromB6 + A.fromB7) (A.done1 + A.done2))*";
  throw query_error("unknown component kind '" + k + "'");
}

inline std::string events_tsv() {
  std::string out = "id\tpaper_symbol\tdescription\tcontrollable_sec28\tcontrollable_sec2\n";
  for (const auto& e : event_table())
    out += e.id + "\t" + e.symbol + "\t" + e.description + "\t" + (e.controllable_sec28 ? "true" : "false") + "\t" +
           (e.controllable_sec2 ? "true" : "false") + "\n";
  return out;
}

// Every file `desctl fms emit` writes, relative to the output directory.
inline std::vector<std::string> emitted_files() {
  std::vector<std::string> out;
  for (auto k : component_kinds()) out.push_back(std::string(k) + ".json");
  for (const char* f : {"G_total.json", "G_total_sec2.json", "S1.json", "S2.json", "KD1.expr", "KD2.expr",
                        "events.tsv"})
    out.emplace_back(f);
  return out;
}

// Machine models, the plant under both partitions, both specifications and
// both supervisors, plus the event table.
inline void emit(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& a : components(Partition::sec28)) save_automaton(a, dir / (a.name() + ".json"));
  save_automaton(build_total(Partition::sec28), dir / "G_total.json");
  save_automaton(build_total(Partition::sec2).renamed("G_sec2"), dir / "G_total_sec2.json");
  save_automaton(build_supervisor(1), dir / "S1.json");
  save_automaton(build_supervisor(2), dir / "S2.json");
  write_file(dir / "KD1.expr", "# desired behaviour, category-1 products\n" + spec_text(1) + "\n");
  write_file(dir / "KD2.expr", "# desired behaviour, category-2 products\n" + spec_text(2) + "\n");
  write_file(dir / "events.tsv", events_tsv());
}

}  // namespace desctl::fms
