#pragma once

#include <memory>
#include <ostream>

#include "fibcoalg/model_format.hpp"
#include "fibcoalg/props.hpp"

namespace fibcoalg {

// A loaded model wired for checking. Classical kinds get the stock
// vocabulary here (exponent keys from the transition labels); quantum
// models arrive fully installed by the loader. Pinned: the structure
// points into the signature.
struct BuiltModel {
  LoadedModel model;
  FibredSignature sig;  // classical kinds only
  Structure st;         // classical kinds only
  Coalgebra coalg;      // classical kinds only; quantum rebuilds on demand

  BuiltModel() = default;
  BuiltModel(const BuiltModel&) = delete;
  BuiltModel& operator=(const BuiltModel&) = delete;

  const FibredSignature& signature() const;
  const Structure& structure() const;
  // Home object of formulas over this model.
  FibObject fibre() const;
  Coalgebra coalgebra() const;
  bool quantum() const { return model.kind == ModelKind::kQuantum; }
};

std::unique_ptr<BuiltModel> build_model(LoadedModel lm);

struct CheckOptions {
  std::string state;  // empty: the model's initial states
  bool json = false;
};

// Exit codes double as process exit codes:
//   0 holds, 1 fails, 2 unparsable input, 3 ill-typed or unresolvable,
//   4 carrier closure exhausted, 5 property counterexample.
struct CheckReport {
  int exit_code = 0;
  std::string error_kind;  // "parse" | "type" | "closure" | "model"
  std::string error;
  std::string model_kind;
  std::string formula;  // pretty-printed after parsing
  std::string fibre;
  std::vector<std::pair<std::string, bool>> states;  // evaluated states
  std::vector<std::string> extent;  // classical kinds: full extent
  bool has_extent = false;
  std::size_t carrier_declared = 0;  // quantum: carrier growth
  std::size_t carrier_closed = 0;
  bool holds = false;  // conjunction over evaluated states

  std::string text() const;
  std::string json() const;
  std::string render(bool as_json) const { return as_json ? json() : text(); }
};

CheckReport run_check(BuiltModel& bm, const std::string& formula_document,
                      const CheckOptions& opt);

std::string model_kind_name(ModelKind k);

struct DemoOptions {
  std::string assets = "models";  // directory with shipped model/formula files
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
  bool json = false;
  bool corrections = true;  // swapping only
};

// Teleportation: five fixed and ten seeded random input states, each
// run through a generated three-qubit model against the shipped full
// and per-outcome specifications. Returns a process exit code.
int demo_teleport(const DemoOptions& opt, std::ostream& out);

// Entanglement swapping over the shipped four-qubit model; with
// corrections disabled the per-outcome specifications are expected to
// fail, and the report says which.
int demo_swap(const DemoOptions& opt, std::ostream& out);

// Property suites: naturality, separation, translation, invariance,
// lemmas. Prints one line per report; exit 0 when every report is
// counterexample-free, else 5.
int run_selftest(const std::string& suite, std::uint64_t seed, bool json,
                 std::ostream& out);

}  // namespace fibcoalg
