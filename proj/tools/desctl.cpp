// desctl: command-line front end for the supervisory-control toolkit.
//
// Exit codes: 0 success / property holds, 1 property fails (witness printed),
// 2 usage, format or input error.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "desctl/desctl.hpp"

namespace {

using desctl::Automaton;
using desctl::ordered_json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFails = 1;
constexpr int kInputError = 2;

bool color_enabled() {
  const char* env = std::getenv("DESCTL_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(STDERR_FILENO) != 0;
}

std::string paint(const std::string& text, const char* code) {
  if (!color_enabled()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string good(const std::string& s) { return paint(s, "32"); }
std::string bad(const std::string& s) { return paint(s, "31;1"); }

std::string join(const std::vector<std::string>& v, const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// Writes to `path`, or to stdout when path is empty.
void emit_text(const std::string& path, const std::string& text) {
  if (path.empty())
    std::cout << text;
  else
    desctl::write_file(path, text);
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

Automaton load_plant(const std::string& path, const std::string& partition) {
  auto plant = desctl::load_automaton(path);
  if (!partition.empty()) plant = desctl::fms::with_partition(plant, desctl::fms::parse_partition(partition));
  return plant;
}

std::vector<Automaton> load_all(const std::vector<std::string>& paths) {
  std::vector<Automaton> out;
  for (const auto& p : paths) out.push_back(desctl::load_automaton(p));
  return out;
}

// A specification given either as a model file or as expression text.
Automaton load_spec(const std::string& path, const Automaton& plant) {
  if (fs::path(path).extension() == ".json") return desctl::load_automaton(path);
  auto ast = desctl::parse(desctl::read_file(path));
  std::vector<std::string> ids;
  desctl::collect_symbols(*ast, ids);
  desctl::Alphabet sigma;
  for (const auto& e : plant.alphabet())
    if (std::find(ids.begin(), ids.end(), e.id) != ids.end()) sigma.add(e);
  for (const auto& id : ids)
    if (!sigma.contains(id)) throw desctl::resolution_error(id);
  return desctl::compile(*ast, sigma, stem_of(path));
}

ordered_json summary(const Automaton& a) {
  return {{"name", a.name()},
          {"states", a.num_states()},
          {"events", a.alphabet().size()},
          {"transitions", a.num_transitions()},
          {"marked", a.num_marked()}};
}

std::string summary_line(const Automaton& a) {
  return a.name() + ": " + std::to_string(a.num_states()) + " states, " + std::to_string(a.alphabet().size()) +
         " events, " + std::to_string(a.num_transitions()) + " transitions";
}

struct Options {
  bool json = false;

  std::string model, model2, output, alphabet, delim = "|", name, partition, plant, spec;
  std::vector<std::string> inputs, sups;

  std::string script;
  bool random = false, interactive = false;
  std::uint64_t seed = 0;
  std::optional<std::size_t> steps;
  std::string report;
};

int cmd_validate(const Options& o) {
  auto data = desctl::load_model_data(o.model);
  auto diags = desctl::validate(data);
  if (o.json) {
    ordered_json j{{"valid", diags.empty()}, {"diagnostics", ordered_json::array()}};
    for (const auto& d : diags)
      j["diagnostics"].push_back({{"invariant", d.invariant}, {"element", d.element}, {"message", d.message}});
    print_json(j);
  } else {
    for (const auto& d : diags) std::cout << "[" << d.invariant << "] " << d.message << "\n";
    std::cerr << (diags.empty() ? good("valid") : bad(std::to_string(diags.size()) + " diagnostic(s)")) << "\n";
  }
  return diags.empty() ? kOk : kFails;
}

int cmd_compose(const Options& o) {
  auto parts = load_all(o.inputs);
  auto g = desctl::parallel(std::span<const Automaton>(parts), o.delim, o.name);
  if (o.output.empty() && !o.json) {
    std::cout << desctl::dump_model(g);
    return kOk;
  }
  if (!o.output.empty()) desctl::save_automaton(g, o.output);
  if (o.json)
    print_json(summary(g));
  else
    std::cout << summary_line(g) << "\n";
  return kOk;
}

int cmd_compile_spec(const Options& o) {
  auto alphabet_model = desctl::load_automaton(o.alphabet);
  auto a = desctl::compile(desctl::read_file(o.model), alphabet_model.alphabet(),
                           o.name.empty() ? stem_of(o.model) : o.name);
  if (o.output.empty() && !o.json) {
    std::cout << desctl::dump_model(a);
    return kOk;
  }
  if (!o.output.empty()) desctl::save_automaton(a, o.output);
  if (o.json)
    print_json(summary(a));
  else
    std::cout << summary_line(a) << "\n";
  return kOk;
}

int cmd_check_ctrl(const Options& o) {
  auto plant = load_plant(o.plant, o.partition);
  if (o.sups.size() != 1) throw CLI::ValidationError("--sup", "check-ctrl takes exactly one --sup");
  auto sup = desctl::load_automaton(o.sups.front());
  auto r = desctl::check_controllability(plant, sup);
  if (o.json) {
    ordered_json j{{"controllable", r.controllable}, {"counterexample", nullptr}, {"states_checked", r.states_checked}};
    if (r.counterexample) j["counterexample"] = {{"string", r.counterexample->string}, {"event", r.counterexample->event}};
    print_json(j);
  } else if (r.controllable) {
    std::cout << "controllable\n";
    std::cerr << good("controllable") << " (" << r.states_checked << " states checked)\n";
  } else {
    const auto& s = r.counterexample->string;
    std::cout << join(s) << (s.empty() ? "| " : " | ") << r.counterexample->event << "\n";
    std::cerr << bad("not controllable") << ": uncontrollable '" << r.counterexample->event << "' is disabled by "
              << sup.name() << " after " << s.size() << " event(s)\n";
  }
  return r.controllable ? kOk : kFails;
}

int cmd_check_conflict(const Options& o) {
  auto plant = load_plant(o.plant, o.partition);
  auto sups = load_all(o.sups);
  auto r = desctl::check_nonconflicting(plant, sups);
  if (o.json) {
    ordered_json j{{"nonconflicting", r.nonconflicting}, {"witness", nullptr}, {"states", r.states}};
    if (r.witness) j["witness"] = *r.witness;
    print_json(j);
  } else if (r.nonconflicting) {
    std::cout << "nonconflicting\n";
    std::cerr << good("nonconflicting") << " (" << r.states << " closed-loop states)\n";
  } else {
    std::cout << join(*r.witness) << "\n";
    std::cerr << bad("conflicting") << ": the string above reaches a state from which no marked state is reachable ("
              << r.states << " closed-loop states)\n";
  }
  return r.nonconflicting ? kOk : kFails;
}

int cmd_synth(const Options& o) {
  auto plant = load_plant(o.plant, o.partition);
  auto spec = load_spec(o.spec, plant);
  auto s = desctl::supcon(plant, spec);
  if (!o.name.empty()) s = s.renamed(o.name);
  if (!o.output.empty()) desctl::save_automaton(s, o.output);
  if (o.json) {
    auto j = summary(s);
    j["empty"] = s.empty();
    print_json(j);
  } else if (o.output.empty()) {
    std::cout << desctl::dump_model(s);
  } else {
    std::cout << summary_line(s) << "\n";
  }
  if (s.empty()) std::cerr << bad("supremal controllable sublanguage is empty") << "\n";
  return s.empty() ? kFails : kOk;
}

int cmd_simulate(const Options& o) {
  namespace sim = desctl::sim;
  auto plant = desctl::load_automaton(o.plant);
  sim::ClosedLoop loop(plant, load_all(o.sups));

  int modes = (o.script.empty() ? 0 : 1) + (o.random ? 1 : 0) + (o.interactive ? 1 : 0);
  if (modes != 1)
    throw CLI::ValidationError("policy", "exactly one of --script, --random or --interactive is required");

  sim::Policy policy;
  std::size_t steps = o.steps.value_or(1000);
  if (!o.script.empty()) {
    auto events = sim::parse_script(desctl::read_file(o.script));
    if (!o.steps) steps = events.size();
    policy = sim::ScriptedPolicy{std::move(events)};
  } else if (o.random) {
    policy = sim::RandomPolicy{o.seed};
  } else {
    policy = sim::InteractivePolicy{&std::cin, &std::cerr};
  }

  auto r = sim::run(loop, policy, steps);
  auto j = sim::to_json(r);
  if (!o.report.empty()) desctl::write_file(o.report, j.dump(2) + "\n");
  if (o.json) {
    print_json(j);
  } else {
    std::cout << "steps " << r.steps_taken << "\n";
    for (const auto& [cat, n] : r.completions) std::cout << "completed category " << cat << ": " << n << "\n";
    if (r.blocked_event) std::cout << "blocked at step " << r.steps_taken + 1 << ": " << *r.blocked_event << "\n";
    if (r.deadlocked) std::cout << "deadlock" << (r.marked ? " (marked)" : "") << "\n";
  }
  if (r.blocked_event) {
    try {
      auto cfg = r.trace.empty() ? loop.initial() : r.trace.back().after;
      loop.fire(cfg, *r.blocked_event);
    } catch (const sim::blocked_error& e) {
      std::cerr << bad("blocked") << ": " << e.what() << "\n";
    }
  }
  return (r.deadlocked || r.blocked_event) ? kFails : kOk;
}

int cmd_export_dot(const Options& o) {
  emit_text(o.output, desctl::to_dot(desctl::load_automaton(o.model)));
  return kOk;
}

int cmd_fms_emit(const Options& o) {
  desctl::fms::emit(o.output);
  if (o.json) {
    print_json({{"directory", o.output}, {"files", desctl::fms::emitted_files()}});
  } else {
    for (const auto& f : desctl::fms::emitted_files()) std::cout << (fs::path(o.output) / f).string() << "\n";
  }
  return kOk;
}

int cmd_minimize(const Options& o) {
  auto a = desctl::minimize(desctl::load_automaton(o.model));
  if (o.output.empty() && !o.json) {
    std::cout << desctl::dump_model(a);
    return kOk;
  }
  if (!o.output.empty()) desctl::save_automaton(a, o.output);
  if (o.json)
    print_json(summary(a));
  else
    std::cout << summary_line(a) << "\n";
  return kOk;
}

int cmd_equivalent(const Options& o) {
  auto r = desctl::equivalent(desctl::load_automaton(o.model), desctl::load_automaton(o.model2));
  if (o.json) {
    ordered_json j{{"equivalent", r.equivalent}, {"distinguishing", nullptr}};
    if (r.distinguishing) j["distinguishing"] = *r.distinguishing;
    print_json(j);
  } else if (r.equivalent) {
    std::cout << "equivalent\n";
  } else {
    std::cout << join(*r.distinguishing) << "\n";
    std::cerr << bad("not equivalent") << ": distinguishing string of length " << r.distinguishing->size() << "\n";
  }
  return r.equivalent ? kOk : kFails;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desctl - supervisory control of discrete-event systems"};
  app.set_version_flag("--version", std::string(desctl::kVersion));
  app.require_subcommand(1);

  Options o;
  std::function<int(const Options&)> action;
  auto add = [&](const std::string& name, const std::string& help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_flag("--json", o.json, "machine-readable output");
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };

  auto* validate = add("validate", "check a model file against the automaton invariants", cmd_validate);
  validate->add_option("model", o.model, "model file")->required();

  auto* compose = add("compose", "synchronous composition of models", cmd_compose);
  compose->add_option("models", o.inputs, "model files")->required();
  compose->add_option("-o,--output", o.output, "output model file");
  compose->add_option("--delim", o.delim, "composite state delimiter")->capture_default_str();
  compose->add_option("--name", o.name, "name of the product automaton");

  auto* compile_spec = add("compile-spec", "compile a specification expression", cmd_compile_spec);
  compile_spec->add_option("spec", o.model, "expression file")->required();
  compile_spec->add_option("--alphabet", o.alphabet, "model file whose alphabet is used")->required();
  compile_spec->add_option("-o,--output", o.output, "output model file");
  compile_spec->add_option("--name", o.name, "name of the compiled automaton");

  auto* check_ctrl = add("check-ctrl", "verify controllability of a supervisor", cmd_check_ctrl);
  check_ctrl->add_option("--plant", o.plant, "plant model")->required();
  check_ctrl->add_option("--sup", o.sups, "supervisor model")->required();
  check_ctrl->add_option("--partition", o.partition, "controllability partition to apply to the plant")
      ->check(CLI::IsMember({"sec28", "sec2"}));

  auto* check_conflict = add("check-conflict", "check that supervisors are nonconflicting", cmd_check_conflict);
  check_conflict->add_option("--plant", o.plant, "plant model")->required();
  check_conflict->add_option("--sup", o.sups, "supervisor model (repeatable)");
  check_conflict->add_option("--partition", o.partition, "controllability partition to apply to the plant")
      ->check(CLI::IsMember({"sec28", "sec2"}));

  auto* synth = add("synth", "supremal controllable sublanguage synthesis", cmd_synth);
  synth->add_option("--plant", o.plant, "plant model")->required();
  synth->add_option("--spec", o.spec, "specification (.expr text or .json model)")->required();
  synth->add_option("-o,--output", o.output, "output supervisor model");
  synth->add_option("--name", o.name, "name of the synthesized supervisor");
  synth->add_option("--partition", o.partition, "controllability partition to apply to the plant")
      ->check(CLI::IsMember({"sec28", "sec2"}));

  auto* simulate = add("simulate", "run the closed loop", cmd_simulate);
  simulate->add_option("--plant", o.plant, "plant model")->required();
  simulate->add_option("--sup", o.sups, "supervisor model (repeatable)");
  simulate->add_option("--script", o.script, "event script file");
  simulate->add_flag("--random", o.random, "seeded uniform random policy");
  simulate->add_option("--seed", o.seed, "random seed");
  simulate->add_flag("--interactive", o.interactive, "choose events at the terminal");
  simulate->add_option("--steps", o.steps, "maximum number of steps");
  simulate->add_option("--report", o.report, "write the run report as JSON");

  auto* export_dot = add("export-dot", "write a Graphviz rendering of a model", cmd_export_dot);
  export_dot->add_option("model", o.model, "model file")->required();
  export_dot->add_option("-o,--output", o.output, "output .dot file");

  auto* fms = app.add_subcommand("fms", "reference manufacturing-cell corpus");
  fms->require_subcommand(1);
  auto* emit = fms->add_subcommand("emit", "write the corpus model files");
  emit->add_flag("--json", o.json, "machine-readable output");
  emit->add_option("-o,--output", o.output, "output directory")->required();
  emit->callback([&action] { action = cmd_fms_emit; });

  auto* minimize = add("minimize", "minimize a model", cmd_minimize);
  minimize->add_option("model", o.model, "model file")->required();
  minimize->add_option("-o,--output", o.output, "output model file");

  auto* equivalent = add("equivalent", "compare generated and marked languages", cmd_equivalent);
  equivalent->add_option("a", o.model, "first model")->required();
  equivalent->add_option("b", o.model2, "second model")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    return action(o);
  } catch (const CLI::Error& e) {
    std::cerr << "desctl: " << e.what() << "\n";
    return kInputError;
  } catch (const desctl::parse_error& e) {
    std::cerr << "desctl: syntax error at " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "desctl: " << e.what() << "\n";
    return kInputError;
  }
}
