#include "fibcoalg/syntax.hpp"

#include <algorithm>

namespace fibcoalg {

ModalityPtr ModalityExpr::base(std::string family, std::vector<Param> params) {
  return std::make_shared<ModalityExpr>(Node{Base{std::move(family), std::move(params)}});
}
ModalityPtr ModalityExpr::neg(ModalityPtr inner) {
  return std::make_shared<ModalityExpr>(Node{Neg{std::move(inner)}});
}
ModalityPtr ModalityExpr::conj(std::vector<ModalityPtr> items) {
  if (items.empty()) throw TypeError("modality conjunction", "a nonempty family", "empty family");
  return std::make_shared<ModalityExpr>(Node{Conj{std::move(items)}});
}
ModalityPtr ModalityExpr::sup(ModalityPtr inner, MorphismPtr f) {
  return std::make_shared<ModalityExpr>(Node{Sup{std::move(inner), std::move(f)}});
}
ModalityPtr ModalityExpr::then(ModalityPtr first, ModalityPtr second) {
  return std::make_shared<ModalityExpr>(Node{Then{std::move(first), std::move(second)}});
}
ModalityPtr ModalityExpr::weaken(ModalityPtr inner, std::size_t arity, std::size_t index) {
  return std::make_shared<ModalityExpr>(Node{Weaken{std::move(inner), arity, index}});
}

FormulaPtr Formula::top(FibObject fibre) {
  return std::make_shared<Formula>(Node{Top{std::move(fibre)}});
}
FormulaPtr Formula::neg(FormulaPtr inner) {
  return std::make_shared<Formula>(Node{Neg{std::move(inner)}});
}
FormulaPtr Formula::conj(std::vector<FormulaPtr> items) {
  if (items.empty()) throw TypeError("conjunction", "a nonempty family", "empty family");
  return std::make_shared<Formula>(Node{Conj{std::move(items)}});
}
FormulaPtr Formula::adapt(MorphismPtr f, FormulaPtr inner) {
  return std::make_shared<Formula>(Node{Adapt{std::move(f), std::move(inner)}});
}
FormulaPtr Formula::apply(ModalityPtr mod, std::vector<FormulaPtr> args) {
  return std::make_shared<Formula>(Node{Apply{std::move(mod), std::move(args)}});
}
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
  return neg(conj({std::move(a), neg(std::move(b))}));
}
FormulaPtr Formula::disj(std::vector<FormulaPtr> items) {
  std::vector<FormulaPtr> negged;
  negged.reserve(items.size());
  for (auto& i : items) negged.push_back(neg(std::move(i)));
  return neg(conj(std::move(negged)));
}
FormulaPtr Formula::bottom(FibObject fibre) { return neg(top(std::move(fibre))); }

ModalityType type_of_modality(const ModalityExpr& e, const FibredSignature& sig) {
  const auto& n = e.node();
  if (const auto* b = std::get_if<ModalityExpr::Base>(&n)) {
    auto [home, arity] = sig.modality_type(b->family, b->params);
    return {home, arity};
  }
  if (const auto* g = std::get_if<ModalityExpr::Neg>(&n))
    return type_of_modality(*g->inner, sig);
  if (const auto* c = std::get_if<ModalityExpr::Conj>(&n)) {
    auto t = type_of_modality(*c->items.front(), sig);
    for (std::size_t i = 1; i < c->items.size(); ++i) {
      auto u = type_of_modality(*c->items[i], sig);
      if (!(u == t))
        throw TypeError("modality conjunction item " + std::to_string(i + 1),
                        t.fibre.str() + " with arity " + std::to_string(t.arity),
                        u.fibre.str() + " with arity " + std::to_string(u.arity));
    }
    return t;
  }
  if (const auto* s = std::get_if<ModalityExpr::Sup>(&n)) {
    auto t = type_of_modality(*s->inner, sig);
    auto m = morphism_type(*s->f, sig);
    if (m.target != t.fibre)
      throw TypeError("superscript " + morphism_to_string(*s->f),
                      "a morphism into " + t.fibre.str(), "target " + m.target.str());
    return {m.source, t.arity};
  }
  if (const auto* th = std::get_if<ModalityExpr::Then>(&n)) {
    auto t1 = type_of_modality(*th->first, sig);
    auto t2 = type_of_modality(*th->second, sig);
    if (t2.arity != 1)
      throw TypeError("sequencing second operand", "a unary modality",
                      "arity " + std::to_string(t2.arity));
    return {t2.fibre.tensor(t1.fibre), t1.arity};
  }
  const auto& w = std::get<ModalityExpr::Weaken>(n);
  auto t = type_of_modality(*w.inner, sig);
  if (t.arity != 1)
    throw TypeError("weakening operand", "a unary modality", "arity " + std::to_string(t.arity));
  if (w.index >= w.arity)
    throw TypeError("weakening slot", "a slot below " + std::to_string(w.arity),
                    "slot " + std::to_string(w.index + 1));
  return {t.fibre, w.arity};
}

FibObject type_of_formula(const Formula& f, const FibredSignature& sig) {
  const auto& n = f.node();
  if (const auto* t = std::get_if<Formula::Top>(&n)) {
    if (!sig.valid_object(t->fibre))
      throw TypeError("T@" + t->fibre.str(), "a declared object", t->fibre.str());
    return t->fibre;
  }
  if (const auto* g = std::get_if<Formula::Neg>(&n)) return type_of_formula(*g->inner, sig);
  if (const auto* c = std::get_if<Formula::Conj>(&n)) {
    auto t = type_of_formula(*c->items.front(), sig);
    for (std::size_t i = 1; i < c->items.size(); ++i) {
      auto u = type_of_formula(*c->items[i], sig);
      if (u != t)
        throw TypeError("conjunction item " + std::to_string(i + 1), t.str(), u.str());
    }
    return t;
  }
  if (const auto* a = std::get_if<Formula::Adapt>(&n)) {
    auto m = morphism_type(*a->f, sig);
    auto t = type_of_formula(*a->inner, sig);
    if (t != m.target)
      throw TypeError("adaptation " + morphism_to_string(*a->f) + " body",
                      m.target.str(), t.str());
    return m.source;
  }
  const auto& ap = std::get<Formula::Apply>(n);
  auto mt = type_of_modality(*ap.mod, sig);
  if (ap.args.size() != mt.arity)
    throw TypeError("modality application", std::to_string(mt.arity) + " arguments",
                    std::to_string(ap.args.size()) + " arguments");
  for (std::size_t i = 0; i < ap.args.size(); ++i) {
    auto t = type_of_formula(*ap.args[i], sig);
    if (t != mt.fibre)
      throw TypeError("modality argument " + std::to_string(i + 1), mt.fibre.str(), t.str());
  }
  return mt.fibre;
}

FormulaPtr translate(const MorphismPtr& f, const FormulaPtr& phi,
                     const FibredSignature& sig) {
  const auto& n = phi->node();
  if (std::get_if<Formula::Top>(&n)) {
    return Formula::top(morphism_type(*f, sig).source);
  }
  if (const auto* g = std::get_if<Formula::Neg>(&n))
    return Formula::neg(translate(f, g->inner, sig));
  if (const auto* c = std::get_if<Formula::Conj>(&n)) {
    std::vector<FormulaPtr> items;
    items.reserve(c->items.size());
    for (const auto& i : c->items) items.push_back(translate(f, i, sig));
    return Formula::conj(std::move(items));
  }
  if (const auto* a = std::get_if<Formula::Adapt>(&n))
    return translate(Morphism::compose(a->f, f), a->inner, sig);
  const auto& ap = std::get<Formula::Apply>(n);
  std::vector<FormulaPtr> args;
  args.reserve(ap.args.size());
  for (const auto& i : ap.args) args.push_back(translate(f, i, sig));
  return Formula::apply(ModalityExpr::sup(ap.mod, f), std::move(args));
}

namespace {

bool morphism_struct_eq(const Morphism& a, const Morphism& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  if (const auto* g = std::get_if<Morphism::Gen>(&na)) {
    const auto& h = std::get<Morphism::Gen>(nb);
    return g->name == h.name && g->params == h.params;
  }
  if (const auto* i = std::get_if<Morphism::Id>(&na))
    return i->obj == std::get<Morphism::Id>(nb).obj;
  if (const auto* c = std::get_if<Morphism::Compose>(&na)) {
    const auto& d = std::get<Morphism::Compose>(nb);
    return morphism_struct_eq(*c->after, *d.after) && morphism_struct_eq(*c->before, *d.before);
  }
  const auto& w = std::get<Morphism::Whisker>(na);
  const auto& x = std::get<Morphism::Whisker>(nb);
  return w.left == x.left && w.right == x.right && morphism_struct_eq(*w.inner, *x.inner);
}

}  // namespace

bool modality_equal(const ModalityExpr& a, const ModalityExpr& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  if (const auto* x = std::get_if<ModalityExpr::Base>(&na)) {
    const auto& y = std::get<ModalityExpr::Base>(nb);
    return x->family == y.family && x->params == y.params;
  }
  if (const auto* x = std::get_if<ModalityExpr::Neg>(&na))
    return modality_equal(*x->inner, *std::get<ModalityExpr::Neg>(nb).inner);
  if (const auto* x = std::get_if<ModalityExpr::Conj>(&na)) {
    const auto& y = std::get<ModalityExpr::Conj>(nb);
    if (x->items.size() != y.items.size()) return false;
    for (std::size_t i = 0; i < x->items.size(); ++i)
      if (!modality_equal(*x->items[i], *y.items[i])) return false;
    return true;
  }
  if (const auto* x = std::get_if<ModalityExpr::Sup>(&na)) {
    const auto& y = std::get<ModalityExpr::Sup>(nb);
    return modality_equal(*x->inner, *y.inner) && morphism_struct_eq(*x->f, *y.f);
  }
  if (const auto* x = std::get_if<ModalityExpr::Then>(&na)) {
    const auto& y = std::get<ModalityExpr::Then>(nb);
    return modality_equal(*x->first, *y.first) && modality_equal(*x->second, *y.second);
  }
  const auto& x = std::get<ModalityExpr::Weaken>(na);
  const auto& y = std::get<ModalityExpr::Weaken>(nb);
  return x.arity == y.arity && x.index == y.index && modality_equal(*x.inner, *y.inner);
}

bool formula_equal(const Formula& a, const Formula& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  if (const auto* x = std::get_if<Formula::Top>(&na))
    return x->fibre == std::get<Formula::Top>(nb).fibre;
  if (const auto* x = std::get_if<Formula::Neg>(&na))
    return formula_equal(*x->inner, *std::get<Formula::Neg>(nb).inner);
  if (const auto* x = std::get_if<Formula::Conj>(&na)) {
    const auto& y = std::get<Formula::Conj>(nb);
    if (x->items.size() != y.items.size()) return false;
    for (std::size_t i = 0; i < x->items.size(); ++i)
      if (!formula_equal(*x->items[i], *y.items[i])) return false;
    return true;
  }
  if (const auto* x = std::get_if<Formula::Adapt>(&na)) {
    const auto& y = std::get<Formula::Adapt>(nb);
    return morphism_struct_eq(*x->f, *y.f) && formula_equal(*x->inner, *y.inner);
  }
  const auto& x = std::get<Formula::Apply>(na);
  const auto& y = std::get<Formula::Apply>(nb);
  if (!modality_equal(*x.mod, *y.mod) || x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!formula_equal(*x.args[i], *y.args[i])) return false;
  return true;
}

std::size_t modal_depth(const Formula& f) {
  const auto& n = f.node();
  if (std::get_if<Formula::Top>(&n)) return 0;
  if (const auto* g = std::get_if<Formula::Neg>(&n)) return modal_depth(*g->inner);
  if (const auto* c = std::get_if<Formula::Conj>(&n)) {
    std::size_t d = 0;
    for (const auto& i : c->items) d = std::max(d, modal_depth(*i));
    return d;
  }
  if (const auto* a = std::get_if<Formula::Adapt>(&n)) return modal_depth(*a->inner);
  const auto& ap = std::get<Formula::Apply>(n);
  std::size_t d = 0;
  for (const auto& i : ap.args) d = std::max(d, modal_depth(*i));
  return d + 1;
}

bool has_adapt(const Formula& f) {
  const auto& n = f.node();
  if (std::get_if<Formula::Top>(&n)) return false;
  if (const auto* g = std::get_if<Formula::Neg>(&n)) return has_adapt(*g->inner);
  if (const auto* c = std::get_if<Formula::Conj>(&n)) {
    for (const auto& i : c->items)
      if (has_adapt(*i)) return true;
    return false;
  }
  if (std::get_if<Formula::Adapt>(&n)) return true;
  const auto& ap = std::get<Formula::Apply>(n);
  for (const auto& i : ap.args)
    if (has_adapt(*i)) return true;
  return false;
}

namespace {

std::string params_str(const std::vector<Param>& params) {
  if (params.empty()) return "";
  std::string s = "[";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ",";
    s += param_to_string(params[i]);
  }
  return s + "]";
}

bool mod_is_base(const ModalityExpr& e) {
  return std::holds_alternative<ModalityExpr::Base>(e.node());
}

std::string mod_atom_str(const ModalityExpr& e) {
  if (mod_is_base(e)) return to_string(e);
  return "(" + to_string(e) + ")";
}

}  // namespace

std::string to_string(const ModalityExpr& e) {
  const auto& n = e.node();
  if (const auto* b = std::get_if<ModalityExpr::Base>(&n)) return b->family + params_str(b->params);
  if (const auto* g = std::get_if<ModalityExpr::Neg>(&n)) return "!" + mod_atom_str(*g->inner);
  if (const auto* c = std::get_if<ModalityExpr::Conj>(&n)) {
    std::string s = "and(";
    for (std::size_t i = 0; i < c->items.size(); ++i) {
      if (i) s += ", ";
      s += to_string(*c->items[i]);
    }
    return s + ")";
  }
  if (const auto* s = std::get_if<ModalityExpr::Sup>(&n))
    return mod_atom_str(*s->inner) + " ^ " + morphism_to_string(*s->f);
  if (const auto* t = std::get_if<ModalityExpr::Then>(&n))
    return mod_atom_str(*t->first) + " . " + mod_atom_str(*t->second);
  const auto& w = std::get<ModalityExpr::Weaken>(n);
  return mod_atom_str(*w.inner) + " @ " + std::to_string(w.index + 1) + "/" +
         std::to_string(w.arity);
}

namespace {

bool formula_is_atom(const Formula& f) {
  const auto& n = f.node();
  return std::holds_alternative<Formula::Top>(n) || std::holds_alternative<Formula::Conj>(n) ||
         std::holds_alternative<Formula::Adapt>(n) || std::holds_alternative<Formula::Apply>(n);
}

std::string formula_atom_str(const Formula& f) {
  if (formula_is_atom(f)) return to_string(f);
  return "(" + to_string(f) + ")";
}

}  // namespace

std::string to_string(const Formula& f) {
  const auto& n = f.node();
  if (const auto* t = std::get_if<Formula::Top>(&n)) return "T@" + t->fibre.str();
  if (const auto* g = std::get_if<Formula::Neg>(&n)) return "!" + formula_atom_str(*g->inner);
  if (const auto* c = std::get_if<Formula::Conj>(&n)) {
    std::string s = "and(";
    for (std::size_t i = 0; i < c->items.size(); ++i) {
      if (i) s += ", ";
      s += to_string(*c->items[i]);
    }
    return s + ")";
  }
  if (const auto* a = std::get_if<Formula::Adapt>(&n)) {
    const auto& mn = a->f->node();
    if (std::holds_alternative<Morphism::Gen>(mn))
      return morphism_to_string(*a->f) + "(" + to_string(*a->inner) + ")";
    return "adapt(" + morphism_to_string(*a->f) + "; " + to_string(*a->inner) + ")";
  }
  const auto& ap = std::get<Formula::Apply>(n);
  std::string head;
  if (mod_is_base(*ap.mod))
    head = to_string(*ap.mod);
  else
    head = "<" + to_string(*ap.mod) + ">";
  if (ap.args.empty()) return head;
  std::string s = head + "(";
  for (std::size_t i = 0; i < ap.args.size(); ++i) {
    if (i) s += ", ";
    s += to_string(*ap.args[i]);
  }
  return s + ")";
}

}  // namespace fibcoalg
