#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fibcoalg/common.hpp"

namespace fibcoalg {

// Object of the free strict monoidal category: a word of generator names.
// The empty word is the monoidal unit. Interpretation composes the
// generator functors outermost-first: [g0, g1] denotes G0 after G1.
struct FibObject {
  std::vector<std::string> word;

  static FibObject unit() { return {}; }
  static FibObject gen(std::string g) { return {{std::move(g)}}; }

  bool is_unit() const { return word.empty(); }
  FibObject tensor(const FibObject& rhs) const;

  bool operator==(const FibObject& o) const { return word == o.word; }
  bool operator!=(const FibObject& o) const { return word != o.word; }
  bool operator<(const FibObject& o) const { return word < o.word; }

  // "I" for the unit, otherwise generators joined with '*'.
  std::string str() const;
};

class Morphism;
using MorphismPtr = std::shared_ptr<const Morphism>;

// Morphism expression of the free category: generator instances,
// identities, sequential composition, whiskering by objects.
class Morphism {
public:
  struct Gen {
    std::string name;
    std::vector<Param> params;
  };
  struct Id {
    FibObject obj;
  };
  struct Compose {  // after ∘ before
    MorphismPtr after, before;
  };
  struct Whisker {  // id_left ⊗ inner ⊗ id_right
    FibObject left;
    MorphismPtr inner;
    FibObject right;
  };
  using Node = std::variant<Gen, Id, Compose, Whisker>;

  explicit Morphism(Node n) : node_(std::move(n)) {}
  const Node& node() const { return node_; }

  static MorphismPtr gen(std::string name, std::vector<Param> params = {});
  static MorphismPtr id(FibObject obj);
  static MorphismPtr compose(MorphismPtr after, MorphismPtr before);
  static MorphismPtr whisker(FibObject left, MorphismPtr inner, FibObject right);

private:
  Node node_;
};

// Atom of a morphism normal form: one generator instance tensored with
// identity context on both sides.
struct WhiskeredGen {
  FibObject left;
  std::string name;
  std::vector<Param> params;
  FibObject right;

  bool operator==(const WhiskeredGen& o) const;
};

// Compositions flattened (outermost last applied first in `atoms`
// back-to-front: atoms[0] applies first), identities removed, nested
// whiskers fused. Two morphisms are equal iff their normal forms are.
struct MorphismNormalForm {
  FibObject source, target;
  std::vector<WhiskeredGen> atoms;

  bool operator==(const MorphismNormalForm& o) const;
};

struct MorphismType {
  FibObject source, target;
};

// Declared typing of one modality-symbol family. A family with fixed
// home describes the symbols {name[params] : params admissible} living
// at a single object; a dispatched family resolves each instance to its
// own home object and arity from the instance parameters, so distinct
// instances may live at distinct objects while the per-object symbol
// sets stay disjoint.
struct ModalityFamilyDecl {
  struct Fixed {
    FibObject home;
    std::size_t arity;
  };
  using Dispatch =
      std::function<std::pair<FibObject, std::size_t>(const std::vector<Param>&)>;
  std::variant<Fixed, Dispatch> rule;

  bool fixed() const { return std::holds_alternative<Fixed>(rule); }
};

struct MorphismGenDecl {
  FibObject source, target;
};

// Morphism-generator family whose typing depends on instance params
// (subsystem restrictions, observable evaluations).
using MorphismGenSchema =
    std::function<MorphismGenDecl(const std::vector<Param>&)>;

struct SignatureViolation {
  std::string message;
};

class ModalityExpr;
using ModalityPtr = std::shared_ptr<const ModalityExpr>;

// Surface abbreviation elaborated at parse time into a composite
// modality expression (the derived measurement vocabulary lives here).
using ModalityMacro = std::function<ModalityPtr(const std::vector<Param>&)>;

// Small monoidal category presentation plus its per-object modal
// signatures. Immutable once a model is loaded.
struct FibredSignature {
  std::set<std::string> object_gens;
  std::map<std::string, FibObject> object_aliases;  // surface name -> word
  std::map<std::string, ModalityFamilyDecl> modalities;
  std::map<std::string, MorphismGenDecl> morphism_gens;
  std::map<std::string, MorphismGenSchema> morphism_schemata;
  std::map<std::string, ModalityMacro> modality_macros;

  bool has_object_gen(const std::string& g) const { return object_gens.count(g) > 0; }
  // Resolve a surface object name: alias, generator, or "I".
  std::optional<FibObject> resolve_object(const std::string& name) const;
  bool valid_object(const FibObject& o) const;

  // Typing of one modality-family instance: (home object, arity).
  std::pair<FibObject, std::size_t> modality_type(
      const std::string& family, const std::vector<Param>& params) const;

  MorphismGenDecl morphism_gen_type(const std::string& name,
                                    const std::vector<Param>& params) const;
};

// Disjointness audit: two fixed-home families sharing a name, a fixed
// family declared at an undeclared object, or a family name colliding
// with a morphism generator. Returns all violations.
std::vector<SignatureViolation> validate_signature(const FibredSignature& sig);

// Source and target of a morphism expression; throws TypeError on
// composition mismatch or unknown generators.
MorphismType morphism_type(const Morphism& m, const FibredSignature& sig);

MorphismNormalForm normal_form(const Morphism& m, const FibredSignature& sig);

bool morphism_equal(const Morphism& a, const Morphism& b, const FibredSignature& sig);

std::string morphism_to_string(const Morphism& m);

}  // namespace fibcoalg
