#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fibcoalg/classical.hpp"
#include "fibcoalg/parser.hpp"
#include "fibcoalg/quantum.hpp"

namespace fibcoalg {

// Line-oriented model files. '#' starts a comment, blank lines are
// skipped, and the first line picks the backend:
//
//   model kripke
//   states s0 s1 s2          # declares carrier order
//   edges s0: s1 s2          # successor sets; omitted states have none
//   initial s0
//
//   model lts
//   states s0 s1
//   labels a b
//   trans s0 a: s0 s1        # omitted (state, label) rows are empty
//
//   model markov
//   states s0 s1
//   dist s0: s0 1/2, s1 1/2  # rows must be unit mass within epsilon
//
//   model quantum
//   qubits 2                 # before any definition line; at most 5
//   tolerance 1e-9           # optional, before definitions
//   max-states 10000         # optional carrier budget
//   scalar  w := 1/sqrt(2)   # real number
//   state   phi := w*ket(0) + (0.5 + 0.5i)*ket(1)
//   obs     ZZ := kron(Z, Z)
//   unitary fix := embed(X, 2)
//   carrier phi psi          # declared model states, model width, unit norm
//   initial phi              # defaults to the first carrier state
//
// State and gate expressions share one grammar: +, -, *, / with scalars,
// i as the imaginary unit (0.5i works), sqrt(x), ket(01), vec(a, b, ...),
// bell(1..4), bellproj(1..4), bellobs, the gates I X Y Z H CNOT SWAP,
// kron(x, y, ...), proj(state), adj(op), embed(op, pos...) which widens
// op to the model width acting on the listed 1-based qubit positions,
// and any name defined on an earlier line.
//
// Every backend also accepts  def name := <formula>  and
// defm name := <modality>  lines; they become the Definitions handed to
// the formula parser alongside the model.

enum class ModelKind { kKripke, kLts, kMarkov, kQuantum };

// Overrides applied on top of tolerance / max-states lines.
struct ModelLoadOptions {
  std::optional<double> epsilon;
  std::optional<std::size_t> max_carrier;
};

struct LoadedModel {
  ModelKind kind = ModelKind::kKripke;
  Definitions defs;

  KripkeFrame kripke;
  Lts lts;
  MarkovChain markov;
  double epsilon = 1e-9;  // effective epsilon for classical backends

  std::unique_ptr<QuantumModel> quantum;  // populated and installed

  std::vector<std::string> initial;  // state names; may be empty

  const std::vector<std::string>& state_names() const;
  std::optional<std::size_t> state_index(const std::string& name) const;
};

LoadedModel load_model(const std::string& text,
                       const ModelLoadOptions& opt = {});
LoadedModel load_model_file(const std::string& path,
                            const ModelLoadOptions& opt = {});

}  // namespace fibcoalg
