#pragma once

#include <optional>

#include "fibcoalg/syntax.hpp"

namespace fibcoalg {

// Named abbreviations usable in formula text. Bodies are kept as text
// and parsed at each use site, so type inference sees the surrounding
// context; cycles are rejected.
struct Definitions {
  std::map<std::string, std::string> formulas;    // def name := <formula>
  std::map<std::string, std::string> modalities;  // defm name := <modality expr>
};

// Formula grammar (lowest to highest binding):
//   implication   a -> b               sugar for !(a & !b), right assoc
//   disjunction   a | b                sugar for !(!a & !b)
//   conjunction   a & b
//   negation      !a
//   atoms         T@Obj  F@Obj  T  F  true  false
//                 and(a, b, ...)   or(a, b, ...)
//                 name(args)            adaptation or modality application,
//                                       resolved against the signature
//                 name[p1,...] / name{p1,...}  parameterized instance
//                 <modality expr>(args) explicit modality application
//                 adapt(morphism; a)    adaptation by a composite morphism
//                 (a)
// Objects are '*'-joined generator or alias names; 'I' is the unit.
// Bare T/F/true/false take the expected type of their position.
//
// Modality expression grammar:
//   conjunction   e & e      and(e, ...)
//   negation      !e
//   superscript   e ^ morphism
//   sequencing    e . e
//   weakening     e @ i/k               slot i of k, 1-based
//   base          name / name[params]
// Morphisms: name, name[params], name{params}, id@Obj,
//            wh(Obj; m; Obj) for whiskering, m * m for composition
// (right factor applies first), (m).
//
// When a superscript morphism lands in a proper prefix of the operand's
// object, it is whiskered on the right with the remaining word.
FormulaPtr parse_formula(const std::string& text, const FibredSignature& sig,
                         const Definitions& defs = {},
                         std::optional<FibObject> expected = std::nullopt);

ModalityPtr parse_modality(const std::string& text, const FibredSignature& sig,
                           const Definitions& defs = {});

// Splits leading `def`/`defm` lines from a formula document, merging
// them into `defs`, and returns the formula body text.
std::string strip_definitions(const std::string& document, Definitions& defs);

}  // namespace fibcoalg
