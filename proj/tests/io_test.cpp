#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "desctl/desctl.hpp"
#include "oracles.hpp"

using namespace desctl;

namespace {

std::string model_text() {
  return R"({
  "name": "C1",
  "events": [{"id": "C1.load", "controllable": true}, {"id": "C1.move", "controllable": false}],
  "states": ["a", "b"],
  "initial": "a",
  "marked": ["a"],
  "transitions": [{"from": "a", "on": "C1.load", "to": "b"}, {"from": "b", "on": "C1.move", "to": "a"}]
})";
}

std::string error_of(const std::string& text) {
  try {
    parse_model(text, "m.json");
  } catch (const model_error& e) {
    return e.what();
  }
  return {};
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST(Json, ParsesModel) {
  Automaton a(parse_model(model_text(), "m.json"));
  EXPECT_EQ(a.name(), "C1");
  EXPECT_EQ(a.num_states(), 2u);
  EXPECT_FALSE(a.alphabet().controllable(1));
  EXPECT_EQ(step(a, "b", "C1.move"), std::optional<std::string>("a"));
}

TEST(Json, RoundTripIsStable) {
  auto text = dump_model(fms::build_total());
  auto again = dump_model(Automaton(parse_model(text, "g")));
  EXPECT_EQ(text, again);
}

TEST(Json, RandomRoundTrip) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    auto sigma = oracle::random_alphabet(rng, 3);
    auto a = oracle::random_automaton(rng, sigma, 5, 0.5);
    Automaton b(parse_model(dump_model(a), "r"));
    EXPECT_EQ(b.to_data().transitions.size(), a.num_transitions());
    EXPECT_TRUE(equivalent(a, b).equivalent);
    EXPECT_EQ(b.state_names(), a.state_names());
    EXPECT_EQ(b.alphabet(), a.alphabet());
  }
}

TEST(Json, FieldOrderIsFixed) {
  auto j = to_json(fms::build("C1"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"name", "events", "states", "initial", "marked", "transitions"}));
}

TEST(Json, ErrorsCarryPositions) {
  EXPECT_NE(error_of(replaced(model_text(), R"("initial": "a",)", "")).find("missing field 'initial'"),
            std::string::npos);
  auto unknown_event = error_of(replaced(model_text(), R"("on": "C1.move")", R"("on": "C9.x")"));
  EXPECT_NE(unknown_event.find("transitions[1].on"), std::string::npos) << unknown_event;
  EXPECT_NE(unknown_event.find("C9.x"), std::string::npos);

  auto unknown_state = error_of(replaced(model_text(), R"("to": "a")", R"("to": "zz")"));
  EXPECT_NE(unknown_state.find("transitions[1].to"), std::string::npos) << unknown_state;

  auto dup = error_of(replaced(model_text(), R"("on": "C1.move", "to": "a")", R"("on": "C1.load", "to": "a")"));
  EXPECT_EQ(dup, "");  // different source states, fine
  auto dup2 = error_of(replaced(model_text(), R"({"from": "b", "on": "C1.move")", R"({"from": "a", "on": "C1.load")"));
  EXPECT_NE(dup2.find("duplicate"), std::string::npos) << dup2;

  auto type = error_of(replaced(model_text(), R"("controllable": false)", R"("controllable": "no")"));
  EXPECT_NE(type.find("events[1].controllable"), std::string::npos) << type;

  auto malformed = error_of(R"({"name": "x", )");
  EXPECT_NE(malformed.find("byte"), std::string::npos) << malformed;
  EXPECT_NE(malformed.find("m.json"), std::string::npos);
}

TEST(Json, InvariantViolationsAfterDecoding) {
  auto d = parse_model(replaced(model_text(), R"("initial": "a")", R"("initial": "nowhere")"), "m");
  EXPECT_EQ(validate(d).at(0).invariant, "initial-in-states");
  EXPECT_THROW(Automaton{d}, model_error);
}

TEST(Json, FileRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "desctl_io_test";
  std::filesystem::create_directories(dir);
  auto a = fms::build_supervisor(1);
  save_automaton(a, dir / "s1.json");
  auto b = load_automaton(dir / "s1.json");
  EXPECT_EQ(dump_model(a), dump_model(b));
  EXPECT_THROW(load_automaton(dir / "missing.json"), model_error);
  std::filesystem::remove_all(dir);
}

TEST(Dot, MarkedDoubleCircleAndDashedUncontrollable) {
  auto dot = to_dot(fms::build("C1"));
  EXPECT_NE(dot.find("digraph \"C1\""), std::string::npos);
  EXPECT_NE(dot.find("\"qC1_1\" [shape=doublecircle]"), std::string::npos);
  EXPECT_NE(dot.find("\"qC1_2\" [shape=circle]"), std::string::npos);
  EXPECT_NE(dot.find("__start -> \"qC1_1\""), std::string::npos);
  EXPECT_NE(dot.find("[label=\"C1.move\", style=dashed]"), std::string::npos);
  EXPECT_NE(dot.find("[label=\"C1.load\"]"), std::string::npos);
}

TEST(Dot, QuotesSpecialCharacters) { EXPECT_EQ(dot_quote("a\"b\\c"), "\"a\\\"b\\\\c\""); }
