#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fibcoalg/engine.hpp"

namespace {

std::string default_assets() {
  if (const char* env = std::getenv("FIBCHECK_ASSETS")) return env;
#ifdef FIBCHECK_DEFAULT_ASSETS
  return FIBCHECK_DEFAULT_ASSETS;
#else
  return "models";
#endif
}

// --formula accepts either a file path or literal formula text.
std::string formula_document(const std::string& arg) {
  std::ifstream in(arg, std::ios::binary);
  if (!in) return arg;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int load_stage_exit(const fibcoalg::Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fibred coalgebraic logic checker"};
  app.require_subcommand(1);

  std::string model_path, formula_arg, state;
  std::string assets = default_assets();
  std::string suite;
  std::uint64_t seed = 1;
  double tolerance = 0.0;
  std::size_t max_carrier = 0;
  bool json = false, no_corrections = false;

  auto* check = app.add_subcommand("check", "evaluate a formula over a model");
  check->add_option("--model", model_path, "model file")->required();
  check->add_option("--formula", formula_arg, "formula file or literal text")
      ->required();
  check->add_option("--state", state, "state to decide (default: initial)");
  check->add_option("--tolerance", tolerance, "numeric comparison tolerance");
  check->add_option("--max-carrier", max_carrier, "carrier closure budget");
  check->add_flag("--json", json, "machine-readable report");

  auto* tp = app.add_subcommand("demo-teleport",
                                "teleportation protocol demonstration");
  tp->add_option("--seed", seed, "random input-state seed");
  tp->add_option("--tolerance", tolerance, "numeric comparison tolerance");
  tp->add_option("--assets", assets, "directory with shipped specifications");
  tp->add_flag("--json", json, "machine-readable report");

  auto* sw = app.add_subcommand("demo-swap",
                                "entanglement swapping demonstration");
  sw->add_flag("--no-corrections", no_corrections,
               "drop the conditional corrections");
  sw->add_option("--tolerance", tolerance, "numeric comparison tolerance");
  sw->add_option("--assets", assets, "directory with shipped specifications");
  sw->add_flag("--json", json, "machine-readable report");

  auto* st = app.add_subcommand("selftest", "run a property suite");
  st->add_option("suite", suite,
                 "naturality | separation | translation | invariance | lemmas")
      ->required();
  st->add_option("--seed", seed, "sampling seed");
  st->add_flag("--json", json, "machine-readable report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      fibcoalg::ModelLoadOptions mlo;
      if (tolerance > 0) mlo.epsilon = tolerance;
      if (max_carrier > 0) mlo.max_carrier = max_carrier;
      std::unique_ptr<fibcoalg::BuiltModel> bm;
      try {
        bm = fibcoalg::build_model(fibcoalg::load_model_file(model_path, mlo));
      } catch (const fibcoalg::Error& e) {
        return load_stage_exit(e);
      }
      fibcoalg::CheckOptions opt;
      opt.state = state;
      opt.json = json;
      fibcoalg::CheckReport rep =
          fibcoalg::run_check(*bm, formula_document(formula_arg), opt);
      std::cout << rep.render(json);
      return rep.exit_code;
    }
    fibcoalg::DemoOptions dopt;
    dopt.assets = assets;
    dopt.seed = seed;
    if (tolerance > 0) dopt.tolerance = tolerance;
    dopt.json = json;
    if (tp->parsed()) return fibcoalg::demo_teleport(dopt, std::cout);
    if (sw->parsed()) {
      dopt.corrections = !no_corrections;
      return fibcoalg::demo_swap(dopt, std::cout);
    }
    return fibcoalg::run_selftest(suite, seed, json, std::cout);
  } catch (const fibcoalg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
