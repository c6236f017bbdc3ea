#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

#include "fibcoalg/syntax.hpp"
#include "fibcoalg/value.hpp"

namespace fibcoalg {

// Interpretation of one object generator as a Set-endofunctor, given as
// a shape descriptor; the engine derives the functorial action, shape
// checks, and (where finite) enumeration from it.
struct FunctorInterp {
  struct Powerset {};                      // finite subsets; Value::Set
  struct Exponent {                        // (-)^K for a finite symbolic key set
    std::vector<std::string> keys;
  };
  struct DistF {};                         // finitely supported distributions
  struct LabelProd {                       // L x (-); labels outside the value
    std::vector<Label> labels;             // enumeration universe; may be empty
  };
  struct Product {                         // component-wise product of words
    std::vector<FibObject> components;
  };
  struct ObsTable {                        // (-)^{SA(dim)}: lazy matrix-keyed tables
    std::size_t dim;
  };
  using Desc = std::variant<Powerset, Exponent, DistF, LabelProd, Product, ObsTable>;
  Desc desc;
};

struct Lifting;

struct LiftContext {
  const struct Structure* structure;
  double eps;
};

// Membership procedure of one predicate-lifting family: decides whether
// `v` lies in the lifted subset at the instantiating space, given the
// instance parameters and one subset predicate per arity slot.
using LiftingFn = std::function<bool(const LiftContext&, const std::vector<Param>&,
                                     std::span<const SubsetPred>, const Value&)>;

struct Lifting {
  LiftingFn member;
};

// Value map of a natural transformation; must act uniformly in the
// inner shape so whiskered and nested instantiations stay natural.
struct NatTrans {
  FibObject source, target;
  std::function<Value(const Value&)> map;
};

using MorphismInterpFn = std::function<NatTrans(const std::vector<Param>&)>;

// Interpretation side of a fibred signature: generator functors,
// morphism-generator components, and lifting families. Immutable during
// evaluation; safe for concurrent readers.
struct Structure {
  const FibredSignature* signature = nullptr;
  std::map<std::string, FunctorInterp> functors;
  std::map<std::string, MorphismInterpFn> morphisms;
  std::map<std::string, Lifting> liftings;
  Tolerances tol;

  const FunctorInterp& functor(const std::string& gen) const;
  NatTrans morphism_interp(const std::string& name, const std::vector<Param>& params) const;
  const Lifting& lifting(const std::string& family) const;
};

struct Carrier {
  std::vector<std::string> state_names;

  std::size_t size() const { return state_names.size(); }
  std::size_t index_of(const std::string& name) const;
};

// Finite coalgebra (X, gamma) with gamma value per state; fibre is the
// object whose interpretation the values inhabit.
struct Coalgebra {
  Carrier carrier;
  FibObject fibre;
  std::function<Value(std::size_t)> gamma;

  static Coalgebra from_map(Carrier carrier, FibObject fibre, std::vector<Value> values);
};

// Explicit subset of a carrier.
struct StateSet {
  std::vector<bool> bits;

  static StateSet none(std::size_t n) { return {std::vector<bool>(n, false)}; }
  static StateSet all(std::size_t n) { return {std::vector<bool>(n, true)}; }
  std::size_t size() const { return bits.size(); }
  bool test(std::size_t i) const { return bits[i]; }
  void set(std::size_t i, bool v = true) { bits[i] = v; }
  StateSet complement() const;
  StateSet intersect(const StateSet& o) const;
  std::size_t count() const;
  bool operator==(const StateSet& o) const { return bits == o.bits; }
  std::vector<std::size_t> members() const;

  SubsetPred pred() const;
};

// Applies fn under the layers named by `word`: v inhabits ⟦word⟧(Y) and
// the result inhabits ⟦word⟧(Z) when fn maps Y-values to Z-values.
// Canonicalizes sets and distributions after mapping; wraps lazy tables.
Value map_under(const Structure& st, const FibObject& word,
                const std::function<Value(const Value&)>& fn, const Value& v);

// Functorial action on a base relabeling h : X -> Y.
Value map_functor(const Structure& st, const FibObject& word,
                  const std::vector<std::size_t>& h, const Value& v);

// Component of the interpreted morphism at the space the value lives in.
Value apply_morphism(const Structure& st, const Morphism& m, const Value& v);

// Checked single application at the base carrier.
Value apply_nat_trans(const Structure& st, const NatTrans& nt, const Carrier& carrier,
                      const Value& v);

// Validates that v inhabits ⟦word⟧(X); lazy tables are checked on their
// cached rows only. Throws ShapeError with a path on mismatch.
void check_value_shape(const Structure& st, const FibObject& word, const Value& v,
                       std::size_t carrier_size);

// Membership of v in the lifted subset: the modality-expression
// semantics by structural recursion (negation and conjunction pointwise,
// superscripts through the morphism component, sequencing through an
// intensional intermediate subset, weakening by slot selection).
bool eval_lifting(const Structure& st, const ModalityExpr& e,
                  std::span<const SubsetPred> args, const Value& v);

// Extent of a formula: the set of carrier states satisfying it.
// Adaptations evaluate by restructuring gamma through the morphism.
StateSet eval_formula(const Structure& st, const Formula& f, const Coalgebra& c);

// Demand-driven satisfaction at one state: computes only the
// memberships the formula actually queries, so it also works on
// carriers closed just deep enough for the formula. Agrees with
// eval_formula wherever the carrier is closed under every observable.
bool holds_at(const Structure& st, const Formula& f, const Coalgebra& c,
              std::size_t state);

struct HomReport {
  bool is_homomorphism = false;
  bool invariant = false;
  std::string detail;
};

// Checks h : (X1,g1) -> (X2,g2) is a coalgebra homomorphism (by the
// functorial action) and that the formula's extent is h-invariant:
// eval(c1) == preimage under h of eval(c2).
HomReport check_homomorphism_invariance(const Structure& st, const Coalgebra& c1,
                                        const Coalgebra& c2,
                                        const std::vector<std::size_t>& h,
                                        const Formula& f);

}  // namespace fibcoalg
