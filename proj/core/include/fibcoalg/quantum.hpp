#pragma once

#include <mutex>

#include "fibcoalg/classical.hpp"
#include "fibcoalg/linalg.hpp"
#include "fibcoalg/parser.hpp"
#include "fibcoalg/semantics.hpp"

namespace fibcoalg {

// Spectral decompositions memoized by matrix value. Exact entrywise
// ordering: identically computed matrices hit the cache, others just
// recompute (idempotent).
class SpectralCache {
 public:
  using Spectrum = std::shared_ptr<const std::vector<SpectralOutcome>>;
  Spectrum get(const MatrixHandle& m, const Tolerances& tol) const;

 private:
  struct Less {
    bool operator()(const ComplexMatrix& a, const ComplexMatrix& b) const;
  };
  mutable std::mutex mu_;
  mutable std::map<ComplexMatrix, Spectrum, Less> cache_;
};

struct BornBranch {
  double outcome;   // representative eigenvalue of the projector group
  double prob;      // > eps; smaller branches are dropped
  PureState post;   // normalized projected state
};

// Measurement-based model over a pure-state carrier. The object Q{m}
// abbreviates the word SA{m}*D*R: an observable-keyed table of
// distributions over (outcome, successor) pairs. Wiring is installed
// once by install_quantum; registries may grow (append-only) while
// formulas are parsed, and the model must stay put, so it is pinned.
struct QuantumModel {
  QuantumModel() = default;
  QuantumModel(const QuantumModel&) = delete;
  QuantumModel& operator=(const QuantumModel&) = delete;

  std::size_t qubits = 1;
  Tolerances tol;
  std::size_t max_carrier = 10000;

  std::vector<std::string> state_names;  // carrier; declared prefix first
  std::vector<PureState> carrier;
  std::size_t declared = 0;  // carrier states named by the model itself
  std::vector<std::size_t> initial;

  std::map<std::string, PureState> state_consts;    // named kets, any width
  std::map<std::string, MatrixHandle> observables;  // Hermitian, named
  std::map<std::string, MatrixHandle> unitaries;    // unitary, named
  std::map<std::string, double> scalars;            // named outcome values

  FibredSignature sig;
  Structure st;
  Definitions defs;
  SpectralCache spectra;

  std::size_t dim() const { return std::size_t(1) << qubits; }
  FibObject fibre() const;  // the word behind Q{qubits}

  // Carrier membership is up to global phase: overlap >= 1 - eps.
  std::optional<std::size_t> find_state(const PureState& s) const;
  // Appends unless already present; enforces max_carrier.
  std::size_t add_state(const PureState& s);
  std::size_t add_carrier_state(const std::string& name, PureState s);

  void add_state_const(const std::string& name, PureState s);
  void add_observable(const std::string& name, ComplexMatrix m);
  void add_unitary(const std::string& name, ComplexMatrix m);

  MatrixHandle observable(const std::string& name) const;
  // Registered observable name for a projector: the named observable if
  // it is idempotent, else the outer-product projector of the named
  // state constant, registered on first use as proj_<name>.
  std::string projector_key(const std::string& name);
  double scalar(const Param& p, const char* what) const;
};

// Declares the SA{1..qubits} generators with Q{j} aliases on top of the
// stock classical vocabulary, the ev/bits morphism schemata, and the
// derived modality macros P / certain / meas / measure.
void install_quantum(QuantumModel& m);

// Born rule at one state: probabilities <ψ|P_j|ψ> over the grouped
// spectrum, branches at most eps dropped, successors normalized.
std::vector<BornBranch> born(const QuantumModel& m, const PureState& psi,
                             const MatrixHandle& obs);

// One coalgebra table row: distribution over (outcome, successor index).
// Throws ClosureError when a successor is missing from the carrier.
Value measurement_value(const QuantumModel& m, std::size_t state,
                        const MatrixHandle& obs);

// gamma(x) is a lazy observable-keyed table backed by measurement_value.
// The coalgebra reads the model through a pointer; close first.
Coalgebra quantum_coalgebra(const QuantumModel& m);

// Extends the carrier with every successor the formula can query:
// observables are collected per application node with their superscript
// key transforms applied, and successor sets are chased level by level
// through the argument nesting, so the carrier grows exactly to the
// formula's modal depth. Adaptations are translated away first.
void close_carrier(QuantumModel& m, const FormulaPtr& f);

// Derived modality constructors (the parse-time macros call these).
// Certainty of a positive outcome when measuring a projector:
//   top . (detcert[1] then-mass deq[1]) over ev[projector]  (0-ary)
ModalityPtr projector_certainty(QuantumModel& m, const std::string& name);
// Mass of (outcome r, successor in the argument) equals p  (unary)
ModalityPtr outcome_mass(QuantumModel& m, double p, double r,
                         const std::string& obs);
// All outcome-r mass lies inside the argument; vacuous when the
// outcome has probability 0  (unary)
ModalityPtr outcome_certainty(QuantumModel& m, double r, const std::string& obs);
// One slot per listed outcome: if outcome r_i occurs, slot i holds.
// Outcomes must lie in the observable's grouped spectrum  (k-ary)
ModalityPtr outcome_cases(QuantumModel& m, const std::string& obs,
                          const std::vector<double>& outcomes);

}  // namespace fibcoalg
