#include "fibcoalg/semantics.hpp"

#include <algorithm>

#include "fibcoalg/linalg.hpp"

namespace fibcoalg {

const FunctorInterp& Structure::functor(const std::string& gen) const {
  auto it = functors.find(gen);
  if (it == functors.end()) throw ModelError("no functor interpretation for generator " + gen);
  return it->second;
}

NatTrans Structure::morphism_interp(const std::string& name,
                                    const std::vector<Param>& params) const {
  auto it = morphisms.find(name);
  if (it == morphisms.end()) throw ModelError("no interpretation for morphism " + name);
  return it->second(params);
}

const Lifting& Structure::lifting(const std::string& family) const {
  auto it = liftings.find(family);
  if (it == liftings.end()) throw ModelError("no lifting registered for modality " + family);
  return it->second;
}

std::size_t Carrier::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < state_names.size(); ++i)
    if (state_names[i] == name) return i;
  throw ModelError("unknown state " + name);
}

Coalgebra Coalgebra::from_map(Carrier carrier, FibObject fibre, std::vector<Value> values) {
  if (values.size() != carrier.size())
    throw ModelError("coalgebra map size does not match carrier size");
  auto shared = std::make_shared<std::vector<Value>>(std::move(values));
  Coalgebra c;
  c.carrier = std::move(carrier);
  c.fibre = std::move(fibre);
  c.gamma = [shared](std::size_t i) { return shared->at(i); };
  return c;
}

StateSet StateSet::complement() const {
  StateSet o = *this;
  for (std::size_t i = 0; i < o.bits.size(); ++i) o.bits[i] = !o.bits[i];
  return o;
}

StateSet StateSet::intersect(const StateSet& o) const {
  StateSet r = *this;
  for (std::size_t i = 0; i < r.bits.size(); ++i) r.bits[i] = r.bits[i] && o.bits[i];
  return r;
}

std::size_t StateSet::count() const {
  return std::size_t(std::count(bits.begin(), bits.end(), true));
}

std::vector<std::size_t> StateSet::members() const {
  std::vector<std::size_t> m;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) m.push_back(i);
  return m;
}

SubsetPred StateSet::pred() const {
  auto copy = bits;
  return [copy](const Value& v) {
    const auto* b = v.get_if<Value::BaseRef>();
    if (!b) throw ShapeError("carrier subset applied to a non-base value");
    if (b->state >= copy.size()) throw ShapeError("carrier subset applied to foreign state");
    return bool(copy[b->state]);
  };
}

namespace {

FibObject rest_of(const FibObject& word) {
  FibObject r;
  r.word.assign(word.word.begin() + 1, word.word.end());
  return r;
}

}  // namespace

Value map_under(const Structure& st, const FibObject& word,
                const std::function<Value(const Value&)>& fn, const Value& v) {
  if (word.is_unit()) return fn(v);
  const auto& interp = st.functor(word.word.front());
  const FibObject rest = rest_of(word);

  if (std::holds_alternative<FunctorInterp::Powerset>(interp.desc)) {
    const auto& s = v.as<Value::Set>("set");
    std::vector<Value> mapped;
    mapped.reserve(s.elems.size());
    for (const auto& e : s.elems) mapped.push_back(map_under(st, rest, fn, e));
    return Value::set(std::move(mapped));
  }
  if (std::holds_alternative<FunctorInterp::DistF>(interp.desc)) {
    const auto& d = v.as<Value::Dist>("distribution");
    std::vector<std::pair<Value, double>> mapped;
    mapped.reserve(d.mass.size());
    for (const auto& [k, p] : d.mass) mapped.emplace_back(map_under(st, rest, fn, k), p);
    return Value::dist(std::move(mapped), st.tol.eps);
  }
  if (std::holds_alternative<FunctorInterp::LabelProd>(interp.desc)) {
    const auto& p = v.as<Value::Pairing>("pair");
    return Value::pairing(p.label, map_under(st, rest, fn, p.inner));
  }
  if (const auto* prod = std::get_if<FunctorInterp::Product>(&interp.desc)) {
    const auto& t = v.as<Value::Tuple>("tuple");
    if (t.items.size() != prod->components.size())
      throw ShapeError("tuple width does not match product arity");
    std::vector<Value> items;
    items.reserve(t.items.size());
    for (std::size_t i = 0; i < t.items.size(); ++i)
      items.push_back(map_under(st, prod->components[i].tensor(rest), fn, t.items[i]));
    return Value::tuple(std::move(items));
  }
  // Exponent and ObsTable both carry tables.
  const auto& t = v.as<Value::Table>("table");
  std::vector<std::pair<TableKey, Value>> rows;
  rows.reserve(t.rows.size());
  for (const auto& [k, val] : t.rows) rows.emplace_back(k, map_under(st, rest, fn, val));
  std::function<Value(const TableKey&)> wrapped;
  if (t.lookup_fn) {
    auto base = t.lookup_fn;
    // Copies keep the closure self-contained; recomputation is idempotent.
    const Structure* stp = &st;
    wrapped = [stp, rest, fn, base](const TableKey& k) {
      return map_under(*stp, rest, fn, base(k));
    };
  }
  return Value::table(std::move(rows), std::move(wrapped));
}

Value map_functor(const Structure& st, const FibObject& word,
                  const std::vector<std::size_t>& h, const Value& v) {
  return map_under(st, word, [&h](const Value& b) {
    const auto* br = b.get_if<Value::BaseRef>();
    if (!br) throw ShapeError("relabeling applied to a non-base value");
    if (br->state >= h.size()) throw ShapeError("relabeling applied to foreign state");
    return Value::base(h[br->state]);
  }, v);
}

Value apply_morphism(const Structure& st, const Morphism& m, const Value& v) {
  const auto& n = m.node();
  if (const auto* g = std::get_if<Morphism::Gen>(&n))
    return st.morphism_interp(g->name, g->params).map(v);
  if (std::get_if<Morphism::Id>(&n)) return v;
  if (const auto* c = std::get_if<Morphism::Compose>(&n))
    return apply_morphism(st, *c->after, apply_morphism(st, *c->before, v));
  const auto& w = std::get<Morphism::Whisker>(n);
  return map_under(st, w.left,
                   [&](const Value& inner) { return apply_morphism(st, *w.inner, inner); }, v);
}

Value apply_nat_trans(const Structure& st, const NatTrans& nt, const Carrier& carrier,
                      const Value& v) {
  check_value_shape(st, nt.source, v, carrier.size());
  Value out = nt.map(v);
  check_value_shape(st, nt.target, out, carrier.size());
  return out;
}

namespace {

void shape_rec(const Structure& st, const FibObject& word, const Value& v, std::size_t n,
               const std::string& path) {
  if (word.is_unit()) {
    const auto* b = v.get_if<Value::BaseRef>();
    if (!b) throw ShapeError(path + ": expected base state, found " + v.kind_name());
    if (b->state >= n)
      throw ShapeError(path + ": state #" + std::to_string(b->state) + " outside carrier of " +
                       std::to_string(n));
    return;
  }
  const std::string& gen = word.word.front();
  const auto& interp = st.functor(gen);
  const FibObject rest = rest_of(word);
  const std::string here = path + "/" + gen;

  if (std::holds_alternative<FunctorInterp::Powerset>(interp.desc)) {
    const auto* s = v.get_if<Value::Set>();
    if (!s) throw ShapeError(here + ": expected set, found " + v.kind_name());
    for (const auto& e : s->elems) shape_rec(st, rest, e, n, here);
    return;
  }
  if (std::holds_alternative<FunctorInterp::DistF>(interp.desc)) {
    const auto* d = v.get_if<Value::Dist>();
    if (!d) throw ShapeError(here + ": expected distribution, found " + v.kind_name());
    for (const auto& [k, p] : d->mass) shape_rec(st, rest, k, n, here);
    return;
  }
  if (std::holds_alternative<FunctorInterp::LabelProd>(interp.desc)) {
    const auto* p = v.get_if<Value::Pairing>();
    if (!p) throw ShapeError(here + ": expected pair, found " + v.kind_name());
    shape_rec(st, rest, p->inner, n, here);
    return;
  }
  if (const auto* prod = std::get_if<FunctorInterp::Product>(&interp.desc)) {
    const auto* t = v.get_if<Value::Tuple>();
    if (!t) throw ShapeError(here + ": expected tuple, found " + v.kind_name());
    if (t->items.size() != prod->components.size())
      throw ShapeError(here + ": tuple width " + std::to_string(t->items.size()) +
                       " does not match product arity " +
                       std::to_string(prod->components.size()));
    for (std::size_t i = 0; i < t->items.size(); ++i)
      shape_rec(st, prod->components[i].tensor(rest), t->items[i], n, here);
    return;
  }
  if (const auto* ex = std::get_if<FunctorInterp::Exponent>(&interp.desc)) {
    const auto* t = v.get_if<Value::Table>();
    if (!t) throw ShapeError(here + ": expected table, found " + v.kind_name());
    if (!t->lookup_fn) {
      if (t->rows.size() != ex->keys.size())
        throw ShapeError(here + ": table has " + std::to_string(t->rows.size()) +
                         " rows, exponent needs " + std::to_string(ex->keys.size()));
      auto sorted = ex->keys;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto* ks = std::get_if<std::string>(&t->rows[i].first);
        if (!ks || *ks != sorted[i])
          throw ShapeError(here + ": table keys do not match the exponent key set");
      }
    }
    for (const auto& [k, val] : t->rows) shape_rec(st, rest, val, n, here);
    return;
  }
  const auto& ot = std::get<FunctorInterp::ObsTable>(interp.desc);
  const auto* t = v.get_if<Value::Table>();
  if (!t) throw ShapeError(here + ": expected table, found " + v.kind_name());
  for (const auto& [k, val] : t->rows) {
    const auto* mk = std::get_if<MatrixHandle>(&k);
    if (!mk) throw ShapeError(here + ": observable table has a symbolic key");
    if ((*mk)->n != ot.dim)
      throw ShapeError(here + ": observable key dimension " + std::to_string((*mk)->n) +
                       ", expected " + std::to_string(ot.dim));
    shape_rec(st, rest, val, n, here);
  }
}

}  // namespace

void check_value_shape(const Structure& st, const FibObject& word, const Value& v,
                       std::size_t carrier_size) {
  shape_rec(st, word, v, carrier_size, word.str());
}

bool eval_lifting(const Structure& st, const ModalityExpr& e,
                  std::span<const SubsetPred> args, const Value& v) {
  const auto& n = e.node();
  if (const auto* b = std::get_if<ModalityExpr::Base>(&n)) {
    LiftContext ctx{&st, st.tol.eps};
    return st.lifting(b->family).member(ctx, b->params, args, v);
  }
  if (const auto* g = std::get_if<ModalityExpr::Neg>(&n))
    return !eval_lifting(st, *g->inner, args, v);
  if (const auto* c = std::get_if<ModalityExpr::Conj>(&n)) {
    for (const auto& i : c->items)
      if (!eval_lifting(st, *i, args, v)) return false;
    return true;
  }
  if (const auto* s = std::get_if<ModalityExpr::Sup>(&n))
    return eval_lifting(st, *s->inner, args, apply_morphism(st, *s->f, v));
  if (const auto* t = std::get_if<ModalityExpr::Then>(&n)) {
    // Intermediate subset of the first operand's space, kept intensional.
    const ModalityExpr* first = t->first.get();
    SubsetPred inner_subset = [&st, first, args](const Value& w) {
      return eval_lifting(st, *first, args, w);
    };
    return eval_lifting(st, *t->second, std::span<const SubsetPred>(&inner_subset, 1), v);
  }
  const auto& w = std::get<ModalityExpr::Weaken>(n);
  if (args.size() != w.arity)
    throw TypeError("weakened modality", std::to_string(w.arity) + " arguments",
                    std::to_string(args.size()) + " arguments");
  return eval_lifting(st, *w.inner, args.subspan(w.index, 1), v);
}

StateSet eval_formula(const Structure& st, const Formula& f, const Coalgebra& c) {
  const std::size_t n = c.carrier.size();
  const auto& node = f.node();
  if (std::get_if<Formula::Top>(&node)) return StateSet::all(n);
  if (const auto* g = std::get_if<Formula::Neg>(&node))
    return eval_formula(st, *g->inner, c).complement();
  if (const auto* cj = std::get_if<Formula::Conj>(&node)) {
    StateSet out = StateSet::all(n);
    for (const auto& i : cj->items) out = out.intersect(eval_formula(st, *i, c));
    return out;
  }
  if (const auto* a = std::get_if<Formula::Adapt>(&node)) {
    if (!st.signature) throw ModelError("structure has no signature attached");
    Coalgebra restructured;
    restructured.carrier = c.carrier;
    restructured.fibre = morphism_type(*a->f, *st.signature).target;
    const MorphismPtr f2 = a->f;
    auto base_gamma = c.gamma;
    const Structure* stp = &st;
    restructured.gamma = [stp, f2, base_gamma](std::size_t i) {
      return apply_morphism(*stp, *f2, base_gamma(i));
    };
    return eval_formula(st, *a->inner, restructured);
  }
  const auto& ap = std::get<Formula::Apply>(node);
  std::vector<StateSet> argsets;
  argsets.reserve(ap.args.size());
  for (const auto& arg : ap.args) argsets.push_back(eval_formula(st, *arg, c));
  std::vector<SubsetPred> preds;
  preds.reserve(argsets.size());
  for (const auto& s : argsets) preds.push_back(s.pred());
  StateSet out = StateSet::none(n);
  for (std::size_t x = 0; x < n; ++x)
    out.set(x, eval_lifting(st, *ap.mod, preds, c.gamma(x)));
  return out;
}

bool holds_at(const Structure& st, const Formula& f, const Coalgebra& c,
              std::size_t state) {
  const auto& node = f.node();
  if (std::get_if<Formula::Top>(&node)) return true;
  if (const auto* g = std::get_if<Formula::Neg>(&node))
    return !holds_at(st, *g->inner, c, state);
  if (const auto* cj = std::get_if<Formula::Conj>(&node)) {
    for (const auto& i : cj->items)
      if (!holds_at(st, *i, c, state)) return false;
    return true;
  }
  if (const auto* a = std::get_if<Formula::Adapt>(&node)) {
    if (!st.signature) throw ModelError("structure has no signature attached");
    Coalgebra restructured;
    restructured.carrier = c.carrier;
    restructured.fibre = morphism_type(*a->f, *st.signature).target;
    const MorphismPtr f2 = a->f;
    auto base_gamma = c.gamma;
    const Structure* stp = &st;
    restructured.gamma = [stp, f2, base_gamma](std::size_t i) {
      return apply_morphism(*stp, *f2, base_gamma(i));
    };
    return holds_at(st, *a->inner, restructured, state);
  }
  const auto& ap = std::get<Formula::Apply>(node);
  // Argument extents stay intensional: membership at a successor is
  // computed only when a lifting actually asks for it.
  const Structure* stp = &st;
  const Coalgebra* cp = &c;
  std::vector<SubsetPred> preds;
  preds.reserve(ap.args.size());
  for (const auto& arg : ap.args) {
    const FormulaPtr sub = arg;
    preds.push_back([stp, cp, sub](const Value& w) {
      const auto* b = w.get_if<Value::BaseRef>();
      if (!b) throw ShapeError("carrier subset applied to a non-base value");
      if (b->state >= cp->carrier.size())
        throw ShapeError("carrier subset applied to foreign state");
      return holds_at(*stp, *sub, *cp, b->state);
    });
  }
  return eval_lifting(st, *ap.mod, preds, c.gamma(state));
}

HomReport check_homomorphism_invariance(const Structure& st, const Coalgebra& c1,
                                        const Coalgebra& c2,
                                        const std::vector<std::size_t>& h,
                                        const Formula& f) {
  HomReport r;
  if (c1.fibre != c2.fibre) {
    r.detail = "coalgebras live at different objects";
    return r;
  }
  if (h.size() != c1.carrier.size()) {
    r.detail = "map does not cover the source carrier";
    return r;
  }
  for (std::size_t x = 0; x < h.size(); ++x) {
    if (h[x] >= c2.carrier.size()) {
      r.detail = "map leaves the target carrier at state " + c1.carrier.state_names[x];
      return r;
    }
    Value lhs = map_functor(st, c1.fibre, h, c1.gamma(x));
    Value rhs = c2.gamma(h[x]);
    if (!value_approx_eq(lhs, rhs, st.tol.eps)) {
      r.detail = "structure map does not commute at state " + c1.carrier.state_names[x] +
                 ": mapped " + lhs.str() + " vs " + rhs.str();
      return r;
    }
  }
  r.is_homomorphism = true;
  StateSet e1 = eval_formula(st, f, c1);
  StateSet e2 = eval_formula(st, f, c2);
  for (std::size_t x = 0; x < h.size(); ++x) {
    if (e1.test(x) != e2.test(h[x])) {
      r.detail = "formula distinguishes state " + c1.carrier.state_names[x] +
                 " from its image " + c2.carrier.state_names[h[x]];
      return r;
    }
  }
  r.invariant = true;
  r.detail = "ok";
  return r;
}

}  // namespace fibcoalg
