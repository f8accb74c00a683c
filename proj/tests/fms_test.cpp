#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "desctl/desctl.hpp"
#include "oracles.hpp"

using namespace desctl;
using fms::Partition;

TEST(Corpus, MachineCounts) {
  const std::map<std::string, std::pair<std::size_t, std::size_t>> expected{
      {"C1", {2, 2}}, {"C2", {2, 2}}, {"C3", {2, 2}}, {"R", {2, 14}},
      {"L", {2, 4}},  {"M", {2, 2}},  {"P", {2, 2}},  {"A", {3, 6}}};
  for (auto k : fms::component_kinds()) {
    auto a = fms::build(k);
    auto [states, events] = expected.at(std::string(k));
    EXPECT_EQ(a.num_states(), states) << k;
    EXPECT_EQ(a.alphabet().size(), events) << k;
    EXPECT_TRUE(validate(a).empty()) << k;
    EXPECT_EQ(a.num_marked(), 1u) << k;
  }
}

TEST(Corpus, SupervisorCounts) {
  auto s1 = fms::build_supervisor(1);
  auto s2 = fms::build_supervisor(2);
  EXPECT_EQ(s1.num_states(), 14u);
  EXPECT_EQ(s1.alphabet().size(), 13u);
  EXPECT_EQ(s2.num_states(), 11u);
  EXPECT_EQ(s2.alphabet().size(), 10u);
  EXPECT_EQ(s1.num_marked(), 14u);
  EXPECT_EQ(s2.num_marked(), 11u);
  auto sigma = fms::plant_alphabet();
  EXPECT_TRUE(s1.alphabet().is_subset_of(sigma));
  EXPECT_TRUE(s2.alphabet().is_subset_of(sigma));
}

TEST(Corpus, EventTable) {
  const auto& t = fms::event_table();
  ASSERT_EQ(t.size(), 34u);
  std::set<std::string> ids;
  for (const auto& e : t) ids.insert(e.id);
  EXPECT_EQ(ids.size(), 34u);
  EXPECT_EQ(fms::event_info("R.place1").symbol, "e_{R,8}");
  EXPECT_EQ(fms::event_info("C3.move").symbol, "e_{C,3,2}");
  EXPECT_EQ(fms::event_info("A.done2").symbol, "e_{A,6}");

  auto unc = [](Partition p) {
    std::set<std::string> out;
    for (const auto& e : fms::plant_alphabet(p))
      if (!e.controllable) out.insert(e.id);
    return out;
  };
  EXPECT_EQ(unc(Partition::sec28), (std::set<std::string>{"C1.move", "C2.move", "C3.move", "A.done1", "A.done2"}));
  EXPECT_EQ(unc(Partition::sec2), (std::set<std::string>{"C1.load", "C2.load", "C3.load", "A.done1", "A.done2"}));
}

TEST(Corpus, PaperActiveSets) {
  EXPECT_EQ(active(fms::build("L"), "qL_1"), (std::vector<std::string>{"L.start1", "L.start2"}));
  EXPECT_EQ(active(fms::build("L"), "qL_2"), (std::vector<std::string>{"L.done1", "L.done2"}));
  EXPECT_EQ(active(fms::build("A"), "qA_1"), (std::vector<std::string>{"A.on"}));
  EXPECT_EQ(active(fms::build("A"), "qA_3"), (std::vector<std::string>{"A.done1", "A.done2"}));
  auto s1 = fms::build_supervisor(1);
  EXPECT_EQ(active(s1, "qS1_9"), (std::vector<std::string>{"R.place6", "R.place7"}));
  auto s2 = fms::build_supervisor(2);
  EXPECT_EQ(active(s2, "qS2_6"), (std::vector<std::string>{"R.place5", "R.place7"}));
}

TEST(Corpus, MachinesMatchTheirExpressions) {
  for (auto k : fms::component_kinds()) {
    auto a = fms::build(k);
    auto compiled = compile(fms::machine_language_text(k), a.alphabet());
    EXPECT_TRUE(equivalent(a, compiled).equivalent) << k;
    // enumeration cross-check on short strings
    oracle::Walker w(a);
    auto x = parse(fms::machine_language_text(k));
    for (const auto& s : oracle::all_words(a.alphabet().ids(), k == std::string_view("R") ? 3 : 6))
      ASSERT_EQ(w.marks(s), oracle::interprets(*x, s)) << k;
  }
}

TEST(Corpus, PartitionsDifferOnlyInFlags) {
  for (auto k : fms::component_kinds()) {
    auto a = fms::build(k, Partition::sec28);
    auto b = fms::build(k, Partition::sec2);
    EXPECT_EQ(a.alphabet().ids(), b.alphabet().ids());
    EXPECT_TRUE(equivalent(a, b).equivalent);
    EXPECT_EQ(fms::with_partition(a, Partition::sec2).alphabet(), b.alphabet());
  }
}

TEST(Corpus, EmitAndReload) {
  auto dir = std::filesystem::temp_directory_path() / "desctl_fms_test";
  std::filesystem::remove_all(dir);
  fms::emit(dir);
  for (const auto& f : fms::emitted_files()) EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;

  std::map<std::string, Automaton> builders;
  for (auto k : fms::component_kinds()) builders.emplace(std::string(k) + ".json", fms::build(k));
  builders.emplace("G_total.json", fms::build_total(Partition::sec28));
  builders.emplace("G_total_sec2.json", fms::build_total(Partition::sec2));
  builders.emplace("S1.json", fms::build_supervisor(1));
  builders.emplace("S2.json", fms::build_supervisor(2));
  for (const auto& [file, built] : builders) {
    auto loaded = load_automaton(dir / file);
    EXPECT_TRUE(equivalent(loaded, built).equivalent) << file;
    EXPECT_EQ(loaded.alphabet(), built.alphabet()) << file;
  }

  auto sigma = load_automaton(dir / "G_total.json").alphabet();
  EXPECT_TRUE(equivalent(compile(read_file(dir / "KD1.expr"), sigma), fms::build_supervisor(1)).equivalent);
  EXPECT_TRUE(equivalent(compile(read_file(dir / "KD2.expr"), sigma), fms::build_supervisor(2)).equivalent);

  std::istringstream tsv(read_file(dir / "events.tsv"));
  std::string line;
  std::getline(tsv, line);
  EXPECT_EQ(line, "id\tpaper_symbol\tdescription\tcontrollable_sec28\tcontrollable_sec2");
  std::size_t rows = 0;
  while (std::getline(tsv, line)) ++rows;
  EXPECT_EQ(rows, 34u);
  std::filesystem::remove_all(dir);
}

TEST(Corpus, UnknownKinds) {
  EXPECT_THROW(fms::build("Q"), query_error);
  EXPECT_THROW(fms::build_supervisor(3), query_error);
  EXPECT_THROW(fms::parse_partition("sec3"), model_error);
}
