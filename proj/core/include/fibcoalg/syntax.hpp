#pragma once

#include "fibcoalg/signature.hpp"

namespace fibcoalg {

class ModalityExpr;
using ModalityPtr = std::shared_ptr<const ModalityExpr>;

// Typed modality expression. Formation rules:
//   Base      name[params], declared at its home object with an arity
//   Neg       same type as the operand
//   Conj      nonempty finite family, all of one type
//   Sup       e at (B, n) superscripted by f : A -> B gives (A, n)
//   Then      first at (A, n), second at (B, 1) gives (B⊗A, n)
//   Weaken    unary e at A placed at slot i of k gives (A, k)
class ModalityExpr {
public:
  struct Base {
    std::string family;
    std::vector<Param> params;
  };
  struct Neg {
    ModalityPtr inner;
  };
  struct Conj {
    std::vector<ModalityPtr> items;
  };
  struct Sup {
    ModalityPtr inner;
    MorphismPtr f;
  };
  struct Then {
    ModalityPtr first;
    ModalityPtr second;
  };
  struct Weaken {
    ModalityPtr inner;
    std::size_t arity;
    std::size_t index;  // 0-based slot
  };
  using Node = std::variant<Base, Neg, Conj, Sup, Then, Weaken>;

  explicit ModalityExpr(Node n) : node_(std::move(n)) {}
  const Node& node() const { return node_; }

  static ModalityPtr base(std::string family, std::vector<Param> params = {});
  static ModalityPtr neg(ModalityPtr inner);
  static ModalityPtr conj(std::vector<ModalityPtr> items);
  static ModalityPtr sup(ModalityPtr inner, MorphismPtr f);
  static ModalityPtr then(ModalityPtr first, ModalityPtr second);
  static ModalityPtr weaken(ModalityPtr inner, std::size_t arity, std::size_t index);

private:
  Node node_;
};

struct ModalityType {
  FibObject fibre;
  std::size_t arity;

  bool operator==(const ModalityType& o) const {
    return fibre == o.fibre && arity == o.arity;
  }
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Fibred formula:
//   Top    ⊤ at an object
//   Neg, Conj  propositional
//   Adapt  f(φ): f : A -> B carries a B-formula to an A-formula
//   Apply  modality applied to as many same-typed formulas as its arity
class Formula {
public:
  struct Top {
    FibObject fibre;
  };
  struct Neg {
    FormulaPtr inner;
  };
  struct Conj {
    std::vector<FormulaPtr> items;
  };
  struct Adapt {
    MorphismPtr f;
    FormulaPtr inner;
  };
  struct Apply {
    ModalityPtr mod;
    std::vector<FormulaPtr> args;
  };
  using Node = std::variant<Top, Neg, Conj, Adapt, Apply>;

  explicit Formula(Node n) : node_(std::move(n)) {}
  const Node& node() const { return node_; }

  static FormulaPtr top(FibObject fibre);
  static FormulaPtr neg(FormulaPtr inner);
  static FormulaPtr conj(std::vector<FormulaPtr> items);
  static FormulaPtr adapt(MorphismPtr f, FormulaPtr inner);
  static FormulaPtr apply(ModalityPtr mod, std::vector<FormulaPtr> args);

  // Sugar: φ -> ψ is !(φ & !ψ); φ | ψ is !(!φ & !ψ); bottom is !T.
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(std::vector<FormulaPtr> items);
  static FormulaPtr bottom(FibObject fibre);

private:
  Node node_;
};

// Unique derivable type; throws TypeError naming the first failing node.
ModalityType type_of_modality(const ModalityExpr& e, const FibredSignature& sig);
FibObject type_of_formula(const Formula& f, const FibredSignature& sig);

// Adaptation elimination along f : A -> B. For a B-formula yields an
// A-formula with every adaptation absorbed into superscripts:
//   ⊤ goes to ⊤, boolean structure is preserved,
//   ○(φs) goes to ○^f(translated φs),
//   g(φ) recurses along g ∘ f.
FormulaPtr translate(const MorphismPtr& f, const FormulaPtr& phi,
                     const FibredSignature& sig);

bool modality_equal(const ModalityExpr& a, const ModalityExpr& b);
bool formula_equal(const Formula& a, const Formula& b);

std::size_t modal_depth(const Formula& f);
bool has_adapt(const Formula& f);

// Grammar-compatible rendering: parse(to_string(φ)) == φ.
std::string to_string(const ModalityExpr& e);
std::string to_string(const Formula& f);

}  // namespace fibcoalg
