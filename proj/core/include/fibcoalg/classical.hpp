#pragma once

#include "fibcoalg/semantics.hpp"

namespace fibcoalg {

// Stock generator names used by the classical backends:
//   P   powerset                        (values: sets)
//   E   (-)^labels, finite exponent     (values: total tables)
//   D   finitely supported distributions
//   R   labels x (-)                    (values: pairs)
//   PR  product of two words            (values: tuples)
//
// Identity-functor liftings (home = unit word):
//   top    0-ary, always true
//   not    1-ary, complement
// Backend liftings:
//   box         at P:  v in box(U) iff v, a set, is included in U
//   deq[p]      at D:  total mass the distribution puts inside U is p
//   detcert[s]  at R:  the pair carries label s and its point lies in U
//
// Morphism generators (minimal homes; whisker into context as needed):
//   ev[k]  : E -> I   table lookup at key k
//   snd    : R -> I   drop the label
//   tag[s] : I -> R   attach label s
//   dirac  : I -> D   point distribution
//   supp   : D -> P   support set
//   flat   : P*P -> P union of a set of sets
//   pr1, pr2 : PR -> component word     (only when PR is installed)

// Installs `top` and `not`; every structure needs them.
void install_identity_liftings(FibredSignature& sig, Structure& st);

struct ClassicalOptions {
  std::vector<std::string> exp_keys = {"a", "b"};
  std::vector<Label> pair_labels = {Label{std::string("u")}, Label{std::string("v")}};
  // When nonempty, installs PR as the product of the two words.
  std::vector<FibObject> product_components;
};

// Declares and interprets the stock generators, liftings, and morphisms.
void install_classical(FibredSignature& sig, Structure& st, const ClassicalOptions& opt);

// Convenience lifting membership tests (the registered families call these).
bool box_member(std::span<const SubsetPred> args, const Value& v);
bool deq_member(double p, double eps, std::span<const SubsetPred> args, const Value& v);
bool detcert_member(const Label& s, double eps, std::span<const SubsetPred> args,
                    const Value& v);

// Derived modality: mass p on outcomes labelled s inside U, built as
// sequencing of the label certificate with the mass test; lives at D*R.
ModalityPtr dreq_modality(double p, const Label& s);

struct KripkeFrame {
  std::vector<std::string> states;
  std::vector<std::vector<std::size_t>> succ;  // successor indices per state
};

struct Lts {
  std::vector<std::string> states;
  std::vector<std::string> labels;
  // succ[state][label index] = successor indices
  std::vector<std::vector<std::vector<std::size_t>>> succ;
};

struct MarkovChain {
  std::vector<std::string> states;
  std::vector<std::vector<std::pair<std::size_t, double>>> trans;
};

// Coalgebras over the stock structure: fibre P, E*P, and D respectively.
Coalgebra kripke_coalgebra(const KripkeFrame& k);
Coalgebra lts_coalgebra(const Lts& l);
Coalgebra markov_coalgebra(const MarkovChain& m, double eps = 1e-9);

// Box along one transition label: box superscripted with the lookup
// morphism ev[label] whiskered by P.
ModalityPtr lts_box_modality(const std::string& label);

}  // namespace fibcoalg
