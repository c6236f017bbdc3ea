#include "fibcoalg/signature.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace fibcoalg {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string label_to_string(const Label& l) {
  if (std::holds_alternative<double>(l)) return format_double(std::get<double>(l));
  return std::get<std::string>(l);
}

std::string param_to_string(const Param& p) {
  if (std::holds_alternative<double>(p)) return format_double(std::get<double>(p));
  return std::get<std::string>(p);
}

FibObject FibObject::tensor(const FibObject& rhs) const {
  FibObject out{word};
  out.word.insert(out.word.end(), rhs.word.begin(), rhs.word.end());
  return out;
}

std::string FibObject::str() const {
  if (word.empty()) return "I";
  std::string s;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) s += "*";
    s += word[i];
  }
  return s;
}

MorphismPtr Morphism::gen(std::string name, std::vector<Param> params) {
  return std::make_shared<Morphism>(Gen{std::move(name), std::move(params)});
}
MorphismPtr Morphism::id(FibObject obj) {
  return std::make_shared<Morphism>(Id{std::move(obj)});
}
MorphismPtr Morphism::compose(MorphismPtr after, MorphismPtr before) {
  return std::make_shared<Morphism>(Compose{std::move(after), std::move(before)});
}
MorphismPtr Morphism::whisker(FibObject left, MorphismPtr inner, FibObject right) {
  return std::make_shared<Morphism>(Whisker{std::move(left), std::move(inner), std::move(right)});
}

bool WhiskeredGen::operator==(const WhiskeredGen& o) const {
  return left == o.left && name == o.name && params == o.params && right == o.right;
}

bool MorphismNormalForm::operator==(const MorphismNormalForm& o) const {
  return source == o.source && target == o.target && atoms == o.atoms;
}

std::optional<FibObject> FibredSignature::resolve_object(const std::string& name) const {
  if (name == "I") return FibObject::unit();
  if (auto it = object_aliases.find(name); it != object_aliases.end()) return it->second;
  if (object_gens.count(name)) return FibObject::gen(name);
  return std::nullopt;
}

bool FibredSignature::valid_object(const FibObject& o) const {
  for (const auto& g : o.word)
    if (!object_gens.count(g)) return false;
  return true;
}

std::pair<FibObject, std::size_t> FibredSignature::modality_type(
    const std::string& family, const std::vector<Param>& params) const {
  auto it = modalities.find(family);
  if (it == modalities.end())
    throw TypeError("modality " + family, "a declared modality symbol", "unknown name");
  if (it->second.fixed()) {
    const auto& f = std::get<ModalityFamilyDecl::Fixed>(it->second.rule);
    return {f.home, f.arity};
  }
  return std::get<ModalityFamilyDecl::Dispatch>(it->second.rule)(params);
}

MorphismGenDecl FibredSignature::morphism_gen_type(
    const std::string& name, const std::vector<Param>& params) const {
  if (auto it = morphism_gens.find(name); it != morphism_gens.end()) {
    if (!params.empty())
      throw TypeError("morphism " + name, "no parameters", std::to_string(params.size()) + " parameters");
    return it->second;
  }
  if (auto it = morphism_schemata.find(name); it != morphism_schemata.end())
    return it->second(params);
  throw TypeError("morphism " + name, "a declared morphism generator", "unknown name");
}

std::vector<SignatureViolation> validate_signature(const FibredSignature& sig) {
  std::vector<SignatureViolation> out;
  // Fixed-home families must live at valid objects; a family name may
  // have only one declaration, so two objects can never share a symbol.
  std::map<std::string, const ModalityFamilyDecl*> seen;
  for (const auto& [name, decl] : sig.modalities) {
    if (decl.fixed()) {
      const auto& f = std::get<ModalityFamilyDecl::Fixed>(decl.rule);
      if (!sig.valid_object(f.home))
        out.push_back({"modality " + name + " declared at undeclared object " + f.home.str()});
    }
    if (sig.morphism_gens.count(name) || sig.morphism_schemata.count(name))
      out.push_back({"name " + name + " declared both as modality and morphism"});
  }
  for (const auto& [name, decl] : sig.morphism_gens) {
    if (!sig.valid_object(decl.source))
      out.push_back({"morphism " + name + " has undeclared source " + decl.source.str()});
    if (!sig.valid_object(decl.target))
      out.push_back({"morphism " + name + " has undeclared target " + decl.target.str()});
  }
  for (const auto& [alias, obj] : sig.object_aliases) {
    if (!sig.valid_object(obj))
      out.push_back({"object alias " + alias + " expands to undeclared object " + obj.str()});
  }
  return out;
}

namespace {

MorphismNormalForm nf_rec(const Morphism& m, const FibredSignature& sig) {
  const auto& n = m.node();
  if (const auto* g = std::get_if<Morphism::Gen>(&n)) {
    auto decl = sig.morphism_gen_type(g->name, g->params);
    return {decl.source, decl.target,
            {WhiskeredGen{FibObject::unit(), g->name, g->params, FibObject::unit()}}};
  }
  if (const auto* i = std::get_if<Morphism::Id>(&n)) {
    if (!sig.valid_object(i->obj))
      throw TypeError("id@" + i->obj.str(), "a declared object", i->obj.str());
    return {i->obj, i->obj, {}};
  }
  if (const auto* c = std::get_if<Morphism::Compose>(&n)) {
    auto before = nf_rec(*c->before, sig);
    auto after = nf_rec(*c->after, sig);
    if (before.target != after.source)
      throw TypeError("composition", after.source.str() + " (source of left factor)",
                      before.target.str() + " (target of right factor)");
    std::vector<WhiskeredGen> atoms = std::move(before.atoms);
    atoms.insert(atoms.end(), after.atoms.begin(), after.atoms.end());
    return {before.source, after.target, std::move(atoms)};
  }
  const auto& w = std::get<Morphism::Whisker>(n);
  if (!sig.valid_object(w.left) || !sig.valid_object(w.right))
    throw TypeError("whisker", "declared context objects",
                    w.left.str() + " | " + w.right.str());
  auto inner = nf_rec(*w.inner, sig);
  MorphismNormalForm out;
  out.source = w.left.tensor(inner.source).tensor(w.right);
  out.target = w.left.tensor(inner.target).tensor(w.right);
  for (auto& a : inner.atoms)
    out.atoms.push_back(WhiskeredGen{w.left.tensor(a.left), a.name, a.params,
                                     a.right.tensor(w.right)});
  return out;
}

}  // namespace

MorphismNormalForm normal_form(const Morphism& m, const FibredSignature& sig) {
  return nf_rec(m, sig);
}

MorphismType morphism_type(const Morphism& m, const FibredSignature& sig) {
  auto nf = nf_rec(m, sig);
  return {nf.source, nf.target};
}

bool morphism_equal(const Morphism& a, const Morphism& b, const FibredSignature& sig) {
  return normal_form(a, sig) == normal_form(b, sig);
}

namespace {

std::string params_suffix(const std::vector<Param>& params, char open, char close) {
  if (params.empty()) return "";
  std::string s(1, open);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ",";
    s += param_to_string(params[i]);
  }
  s += close;
  return s;
}

}  // namespace

std::string morphism_to_string(const Morphism& m) {
  const auto& n = m.node();
  if (const auto* g = std::get_if<Morphism::Gen>(&n)) {
    if (g->name == "bits") return g->name + params_suffix(g->params, '{', '}');
    return g->name + params_suffix(g->params, '[', ']');
  }
  if (const auto* i = std::get_if<Morphism::Id>(&n)) return "id@" + i->obj.str();
  if (const auto* c = std::get_if<Morphism::Compose>(&n)) {
    return "(" + morphism_to_string(*c->after) + " * " + morphism_to_string(*c->before) + ")";
  }
  const auto& w = std::get<Morphism::Whisker>(n);
  return "wh(" + w.left.str() + "; " + morphism_to_string(*w.inner) + "; " + w.right.str() + ")";
}

}  // namespace fibcoalg
