#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fibcoalg/classical.hpp"
#include "fibcoalg/quantum.hpp"

namespace fibcoalg {

// Finite-instance property checks: monotonicity and separation of
// lifting families, naturality of the stock transformations, soundness
// of the adaptation translation, invariance under coalgebra
// homomorphisms, and the suite drivers the self-test command runs.

struct PropertyReport {
  std::string name;
  std::size_t checked = 0;
  std::vector<std::string> counterexamples;  // capped; empty iff holds
  bool holds() const { return counterexamples.empty(); }
};

// Named family of modality expressions sharing one home object.
struct LiftingFamily {
  std::string name;
  std::vector<std::pair<std::string, ModalityPtr>> members;
};

// Subsets of {0..n-1} are bitmask-encoded and enumerated exhaustively,
// so check carriers stay small (n <= 16).
SubsetPred mask_pred(std::uint32_t mask);

// U subseteq V implies membership in the lift of U implies membership
// in the lift of V, for every sampled value and every subset pair.
PropertyReport check_monotone(const Structure& st, const LiftingFamily& fam,
                              std::span<const Value> values,
                              std::size_t carrier);

// Every pair of distinct sampled values is told apart by some member
// and subset; singletons_only restricts the witness subsets.
// max_pairs == 0 checks all pairs, otherwise a seeded sample.
PropertyReport check_separating(const Structure& st, const LiftingFamily& fam,
                                std::span<const Value> values,
                                std::size_t carrier, bool singletons_only,
                                std::size_t max_pairs = 0,
                                std::uint64_t seed = 0);

// Every singleton {t} over the FULL extent `values` is the image of
// some member at some subset.
PropertyReport check_mutually_surjective_on_singletons(
    const Structure& st, const LiftingFamily& fam,
    std::span<const Value> values, std::size_t carrier);

// Naturality of a morphism on sampled source values: mapping the base
// along h commutes with the morphism component.
PropertyReport check_naturality_morphism(const Structure& st,
                                         const MorphismPtr& f,
                                         std::span<const Value> values,
                                         std::size_t carrier_x,
                                         std::size_t carrier_y);

// Naturality of a lifting family at `home`: v in lift(h^-1 U, ...) iff
// map(h, v) in lift(U, ...), over all h and argument subsets.
PropertyReport check_naturality_lifting(const Structure& st,
                                        const LiftingFamily& fam,
                                        const FibObject& home,
                                        std::span<const Value> values,
                                        std::size_t carrier_x,
                                        std::size_t carrier_y);

// The translation discharges the adaptation soundly: evaluating phi
// over the restructured coalgebra, evaluating Adapt(f, phi) directly,
// and evaluating translate(f, phi) over the original coalgebra give the
// same extent.
PropertyReport check_translation_instance(const Structure& st,
                                          const Coalgebra& c,
                                          const MorphismPtr& f,
                                          const FormulaPtr& phi);

// ---------------------------------------------------------------------
// Enumeration of functor values over a carrier of n base points.

std::vector<Value> base_points(std::size_t n);
// All subsets of `points` as Set values, capped.
std::vector<Value> enumerate_sets(std::span<const Value> points,
                                  std::size_t cap = 4096);
// All Pairing(label, point) values.
std::vector<Value> enumerate_pairs(std::span<const Label> labels,
                                   std::span<const Value> points);
// All distributions with masses k/denom, support size 1..max_support.
std::vector<Value> enumerate_dyadic_dists(std::span<const Value> points,
                                          int denom, int max_support);
// All total tables keys -> inner, capped (|inner|^|keys| grows fast).
std::vector<Value> enumerate_tables(std::span<const std::string> keys,
                                    std::span<const Value> inner,
                                    std::size_t cap = 4096);
// All two-component tuples.
std::vector<Value> enumerate_tuples(std::span<const Value> first,
                                    std::span<const Value> second,
                                    std::size_t cap = 4096);

// ---------------------------------------------------------------------
// Seeded generators.

struct Rand {
  std::mt19937_64 rng;
  explicit Rand(std::uint64_t seed) : rng(seed) {}

  std::size_t below(std::size_t n);  // uniform in [0, n)
  double unit();                     // uniform in [0, 1)
  bool flip(double p = 0.5);
};

KripkeFrame random_kripke(Rand& r, std::size_t max_states);
Lts random_lts(Rand& r, std::size_t max_states,
               std::span<const std::string> labels);
// Transition masses are multiples of 1/denom, so the deq family has
// exact witnesses to hit.
MarkovChain random_markov(Rand& r, std::size_t max_states, int denom);

// Random value inhabiting ⟦word⟧(carrier); distributions are dyadic.
Value random_value(Rand& r, const Structure& st, const FibObject& word,
                   std::size_t carrier, int denom, int max_support);

// Modality and morphism vocabulary over the stock classical structure,
// indexed by home object (modalities, with arities) and by source
// object (morphisms, with their targets). Drives the random formula
// generator and the translation suite.
struct BackendPools {
  std::map<FibObject, std::vector<std::pair<ModalityPtr, std::size_t>>>
      modalities;
  std::map<FibObject, std::vector<std::pair<MorphismPtr, FibObject>>>
      morphisms;
};

BackendPools stock_pools(const ClassicalOptions& opt);

// Random well-typed formula at `obj` with modal depth at most `depth`.
FormulaPtr random_formula(Rand& r, const BackendPools& pools,
                          const FibObject& obj, int depth, int size_budget,
                          bool allow_adapt = true);

// Random morphism out of `source`: one or two pool generators composed.
// Returns the morphism with its target object.
std::pair<MorphismPtr, FibObject> random_morphism(Rand& r,
                                                  const BackendPools& pools,
                                                  const FibObject& source);

// ---------------------------------------------------------------------
// Behavioural equivalence.

// Coarsest bisimulation on a frame by partition refinement: block index
// per state.
std::vector<std::size_t> bisimulation_partition(const KripkeFrame& k);
KripkeFrame quotient_frame(const KripkeFrame& k,
                           const std::vector<std::size_t>& block);

// ---------------------------------------------------------------------
// Quantum separation.

// The 1-qubit model whose carrier is the six Pauli eigenstates, with
// observables Z, X, Y.
std::unique_ptr<QuantumModel> six_state_model();

// Every pair of distinct carrier behaviours is separated by some
// outcome-mass lifting with a singleton subset.
PropertyReport check_quantum_singleton_separation(QuantumModel& m);

// ---------------------------------------------------------------------
// Suite drivers (the self-test command and the acceptance gate).

std::vector<PropertyReport> run_naturality_suite(std::uint64_t seed);
std::vector<PropertyReport> run_separation_suite(std::uint64_t seed);
PropertyReport run_translation_suite(std::uint64_t seed, std::size_t count);
PropertyReport run_invariance_suite(std::uint64_t seed, std::size_t frames,
                                    std::size_t formulas_per_frame,
                                    std::size_t max_states, int max_depth);
std::vector<PropertyReport> run_lemma_suite(std::uint64_t seed);

}  // namespace fibcoalg
