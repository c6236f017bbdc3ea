#include "fibcoalg/props.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fibcoalg {

namespace {

constexpr std::size_t kMaxCounterexamples = 5;

void note(PropertyReport& rep, std::string cx) {
  if (rep.counterexamples.size() < kMaxCounterexamples)
    rep.counterexamples.push_back(std::move(cx));
}

void merge(PropertyReport& into, const PropertyReport& part) {
  into.checked += part.checked;
  for (const auto& cx : part.counterexamples) note(into, cx);
}

std::string mask_str(std::uint32_t mask, std::size_t n) {
  std::string s = "{";
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1u) {
      if (s.size() > 1) s += ",";
      s += std::to_string(i);
    }
  return s + "}";
}

std::size_t member_arity(const Structure& st, const ModalityExpr& e) {
  return type_of_modality(e, *st.signature).arity;
}

// eval_lifting with the same subset in every argument slot.
bool lift_member(const Structure& st, const ModalityExpr& e, std::size_t arity,
                 std::uint32_t mask, const Value& v) {
  std::vector<SubsetPred> preds(arity, mask_pred(mask));
  return eval_lifting(st, e, preds, v);
}

std::string extent_str(const StateSet& s) {
  std::string out = "{";
  for (std::size_t i : s.members()) {
    if (out.size() > 1) out += ",";
    out += std::to_string(i);
  }
  return out + "}";
}

}  // namespace

SubsetPred mask_pred(std::uint32_t mask) {
  return [mask](const Value& v) {
    const auto* b = v.get_if<Value::BaseRef>();
    if (!b) throw ShapeError("subset predicate applied to a non-base value");
    if (b->state >= 32) throw ShapeError("subset predicate carrier overflow");
    return (mask >> b->state & 1u) != 0;
  };
}

PropertyReport check_monotone(const Structure& st, const LiftingFamily& fam,
                              std::span<const Value> values,
                              std::size_t carrier) {
  PropertyReport rep{fam.name + ": monotone"};
  const std::uint32_t subsets = 1u << carrier;
  for (const auto& [label, mod] : fam.members) {
    std::size_t arity = member_arity(st, *mod);
    for (const Value& v : values) {
      std::vector<char> in(subsets);
      for (std::uint32_t u = 0; u < subsets; ++u)
        in[u] = lift_member(st, *mod, arity, u, v);
      for (std::uint32_t big = 0; big < subsets; ++big) {
        // Proper subsets of big, then big itself.
        std::uint32_t u = big;
        do {
          u = (u - 1) & big;
          ++rep.checked;
          if (in[u] && !in[big]) {
            note(rep, label + " value " + v.str() + ": holds at " +
                          mask_str(u, carrier) + " but not at " +
                          mask_str(big, carrier));
            break;
          }
        } while (u != 0);
      }
    }
  }
  return rep;
}

PropertyReport check_separating(const Structure& st, const LiftingFamily& fam,
                                std::span<const Value> values,
                                std::size_t carrier, bool singletons_only,
                                std::size_t max_pairs, std::uint64_t seed) {
  PropertyReport rep{fam.name +
                     (singletons_only ? ": separates by singletons"
                                      : ": separating")};
  std::vector<std::uint32_t> masks;
  if (singletons_only) {
    for (std::size_t i = 0; i < carrier; ++i) masks.push_back(1u << i);
  } else {
    for (std::uint32_t u = 0; u < (1u << carrier); ++u) masks.push_back(u);
  }
  std::vector<std::size_t> arities;
  arities.reserve(fam.members.size());
  for (const auto& [label, mod] : fam.members)
    arities.push_back(member_arity(st, *mod));

  auto check_pair = [&](const Value& a, const Value& b) {
    if (value_approx_eq(a, b, st.tol.eps)) return;
    ++rep.checked;
    for (std::size_t m = 0; m < fam.members.size(); ++m)
      for (std::uint32_t u : masks) {
        bool ia = lift_member(st, *fam.members[m].second, arities[m], u, a);
        bool ib = lift_member(st, *fam.members[m].second, arities[m], u, b);
        if (ia != ib) return;
      }
    note(rep, "indistinguishable: " + a.str() + " vs " + b.str());
  };

  if (max_pairs == 0) {
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = i + 1; j < values.size(); ++j)
        check_pair(values[i], values[j]);
  } else {
    Rand r(seed);
    for (std::size_t k = 0; k < max_pairs && values.size() > 1; ++k) {
      std::size_t i = r.below(values.size());
      std::size_t j = r.below(values.size() - 1);
      if (j >= i) ++j;
      check_pair(values[i], values[j]);
    }
  }
  return rep;
}

PropertyReport check_mutually_surjective_on_singletons(
    const Structure& st, const LiftingFamily& fam,
    std::span<const Value> values, std::size_t carrier) {
  PropertyReport rep{fam.name + ": mutually surjective on singletons"};
  const std::uint32_t subsets = 1u << carrier;
  std::vector<std::size_t> arities;
  for (const auto& [label, mod] : fam.members)
    arities.push_back(member_arity(st, *mod));
  for (std::size_t t = 0; t < values.size(); ++t) {
    ++rep.checked;
    bool found = false;
    for (std::size_t m = 0; m < fam.members.size() && !found; ++m)
      for (std::uint32_t u = 0; u < subsets && !found; ++u) {
        bool image_is_t = true;
        for (std::size_t v = 0; v < values.size(); ++v) {
          bool in = lift_member(st, *fam.members[m].second, arities[m], u,
                                values[v]);
          if (in != (v == t)) {
            image_is_t = false;
            break;
          }
        }
        found = image_is_t;
      }
    if (!found)
      note(rep, "no lifting image equals {" + values[t].str() + "}");
  }
  return rep;
}

namespace {

// Deterministic enumeration of functions X -> Y, strided down to `cap`.
std::vector<std::vector<std::size_t>> all_functions(std::size_t cx,
                                                    std::size_t cy,
                                                    std::size_t cap = 256) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < cx; ++i) {
    if (total > cap * cy) break;
    total *= cy;
  }
  std::size_t step = total > cap ? total / cap : 1;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t code = 0; code < total; code += step) {
    std::vector<std::size_t> h(cx);
    std::size_t c = code;
    for (std::size_t i = 0; i < cx; ++i) {
      h[i] = c % cy;
      c /= cy;
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace

PropertyReport check_naturality_morphism(const Structure& st,
                                         const MorphismPtr& f,
                                         std::span<const Value> values,
                                         std::size_t carrier_x,
                                         std::size_t carrier_y) {
  PropertyReport rep{morphism_to_string(*f) + ": naturality"};
  MorphismType ty = morphism_type(*f, *st.signature);
  for (const auto& h : all_functions(carrier_x, carrier_y)) {
    for (const Value& v : values) {
      ++rep.checked;
      Value lhs = map_functor(st, ty.target, h, apply_morphism(st, *f, v));
      Value rhs = apply_morphism(st, *f, map_functor(st, ty.source, h, v));
      if (!value_approx_eq(lhs, rhs, st.tol.eps))
        note(rep, "value " + v.str() + ": map-then-apply " + rhs.str() +
                      " differs from apply-then-map " + lhs.str());
    }
  }
  return rep;
}

PropertyReport check_naturality_lifting(const Structure& st,
                                        const LiftingFamily& fam,
                                        const FibObject& home,
                                        std::span<const Value> values,
                                        std::size_t carrier_x,
                                        std::size_t carrier_y) {
  PropertyReport rep{fam.name + ": lifting naturality"};
  for (const auto& [label, mod] : fam.members) {
    std::size_t arity = member_arity(st, *mod);
    if (arity > 2) throw ShapeError("naturality check supports arity <= 2");
    std::vector<std::vector<std::uint32_t>> arg_masks;
    std::uint32_t subsets_y = 1u << carrier_y;
    if (arity == 0) {
      arg_masks.push_back({});
    } else if (arity == 1) {
      for (std::uint32_t u = 0; u < subsets_y; ++u) arg_masks.push_back({u});
    } else {
      for (std::uint32_t u = 0; u < subsets_y; ++u)
        for (std::uint32_t w = 0; w < subsets_y; ++w)
          arg_masks.push_back({u, w});
    }
    for (const auto& h : all_functions(carrier_x, carrier_y)) {
      for (const auto& masks_y : arg_masks) {
        std::vector<SubsetPred> preds_y, preds_x;
        for (std::uint32_t uy : masks_y) {
          std::uint32_t ux = 0;
          for (std::size_t i = 0; i < carrier_x; ++i)
            if (uy >> h[i] & 1u) ux |= 1u << i;
          preds_y.push_back(mask_pred(uy));
          preds_x.push_back(mask_pred(ux));
        }
        for (const Value& v : values) {
          ++rep.checked;
          bool below = eval_lifting(st, *mod, preds_x, v);
          bool above =
              eval_lifting(st, *mod, preds_y, map_functor(st, home, h, v));
          if (below != above)
            note(rep, label + " value " + v.str() +
                          ": preimage membership differs from image");
        }
      }
    }
  }
  return rep;
}

PropertyReport check_translation_instance(const Structure& st,
                                          const Coalgebra& c,
                                          const MorphismPtr& f,
                                          const FormulaPtr& phi) {
  PropertyReport rep{"translation instance"};
  MorphismType ty = morphism_type(*f, *st.signature);
  if (c.fibre != ty.source)
    throw TypeError("translation instance", c.fibre.str(), ty.source.str());

  const Structure* stp = &st;
  auto gamma = c.gamma;
  MorphismPtr fp = f;
  Coalgebra restructured{c.carrier, ty.target, [stp, gamma, fp](std::size_t x) {
                           return apply_morphism(*stp, *fp, gamma(x));
                         }};
  StateSet direct = eval_formula(st, *phi, restructured);
  StateSet adapted = eval_formula(st, *Formula::adapt(f, phi), c);
  StateSet translated =
      eval_formula(st, *translate(f, phi, *st.signature), c);
  rep.checked = c.carrier.size();
  if (!(direct == adapted))
    note(rep, "adaptation " + extent_str(adapted) +
                  " differs from restructured evaluation " +
                  extent_str(direct) + " for " + to_string(*phi) + " along " +
                  morphism_to_string(*f));
  if (!(direct == translated))
    note(rep, "translation " + extent_str(translated) +
                  " differs from restructured evaluation " +
                  extent_str(direct) + " for " + to_string(*phi) + " along " +
                  morphism_to_string(*f));
  return rep;
}

// ---------------------------------------------------------------------
// Enumeration.

std::vector<Value> base_points(std::size_t n) {
  std::vector<Value> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(Value::base(i));
  return out;
}

std::vector<Value> enumerate_sets(std::span<const Value> points,
                                  std::size_t cap) {
  if (points.size() > 20) throw ShapeError("set enumeration too large");
  std::size_t total = std::size_t(1) << points.size();
  std::size_t step = total > cap ? total / cap : 1;
  std::vector<Value> out;
  for (std::size_t mask = 0; mask < total; mask += step) {
    std::vector<Value> elems;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (mask >> i & 1u) elems.push_back(points[i]);
    out.push_back(Value::set(std::move(elems)));
  }
  return out;
}

std::vector<Value> enumerate_pairs(std::span<const Label> labels,
                                   std::span<const Value> points) {
  std::vector<Value> out;
  for (const Label& l : labels)
    for (const Value& p : points) out.push_back(Value::pairing(l, p));
  return out;
}

namespace {

void compositions(int total, int parts, std::vector<int>& acc,
                  const std::function<void(const std::vector<int>&)>& emit) {
  if (parts == 1) {
    if (total >= 1) {
      acc.push_back(total);
      emit(acc);
      acc.pop_back();
    }
    return;
  }
  for (int first = 1; first + (parts - 1) <= total; ++first) {
    acc.push_back(first);
    compositions(total - first, parts - 1, acc, emit);
    acc.pop_back();
  }
}

void subsets_of_size(std::size_t n, std::size_t k, std::vector<std::size_t>& acc,
                     std::size_t from,
                     const std::function<void(const std::vector<std::size_t>&)>& emit) {
  if (acc.size() == k) {
    emit(acc);
    return;
  }
  for (std::size_t i = from; i + (k - acc.size()) <= n; ++i) {
    acc.push_back(i);
    subsets_of_size(n, k, acc, i + 1, emit);
    acc.pop_back();
  }
}

}  // namespace

std::vector<Value> enumerate_dyadic_dists(std::span<const Value> points,
                                          int denom, int max_support) {
  std::vector<Value> out;
  int limit = std::min<int>(max_support, int(points.size()));
  for (int s = 1; s <= limit; ++s) {
    std::vector<std::size_t> chosen;
    subsets_of_size(points.size(), std::size_t(s), chosen, 0,
                    [&](const std::vector<std::size_t>& idx) {
                      std::vector<int> acc;
                      compositions(denom, s, acc, [&](const std::vector<int>& parts) {
                        std::vector<std::pair<Value, double>> mass;
                        for (int i = 0; i < s; ++i)
                          mass.push_back({points[idx[std::size_t(i)]],
                                          double(parts[std::size_t(i)]) / denom});
                        out.push_back(Value::dist(std::move(mass)));
                      });
                    });
  }
  return out;
}

std::vector<Value> enumerate_tables(std::span<const std::string> keys,
                                    std::span<const Value> inner,
                                    std::size_t cap) {
  if (inner.empty()) throw ShapeError("table enumeration over empty range");
  std::size_t total = 1;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (total > cap * inner.size()) break;
    total *= inner.size();
  }
  std::size_t step = total > cap ? total / cap : 1;
  std::vector<Value> out;
  for (std::size_t code = 0; code < total; code += step) {
    std::vector<std::pair<TableKey, Value>> rows;
    std::size_t c = code;
    for (const std::string& k : keys) {
      rows.push_back({TableKey{k}, inner[c % inner.size()]});
      c /= inner.size();
    }
    out.push_back(Value::table(std::move(rows)));
  }
  return out;
}

std::vector<Value> enumerate_tuples(std::span<const Value> first,
                                    std::span<const Value> second,
                                    std::size_t cap) {
  std::vector<Value> out;
  for (const Value& a : first) {
    for (const Value& b : second) {
      if (out.size() >= cap) return out;
      out.push_back(Value::tuple({a, b}));
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// Generators.

std::size_t Rand::below(std::size_t n) {
  std::uniform_int_distribution<std::size_t> d(0, n - 1);
  return d(rng);
}

double Rand::unit() {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  return d(rng);
}

bool Rand::flip(double p) { return unit() < p; }

KripkeFrame random_kripke(Rand& r, std::size_t max_states) {
  std::size_t n = 1 + r.below(max_states);
  KripkeFrame k;
  for (std::size_t i = 0; i < n; ++i)
    k.states.push_back("s" + std::to_string(i));
  k.succ.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (r.flip(0.35)) k.succ[i].push_back(j);
  return k;
}

Lts random_lts(Rand& r, std::size_t max_states,
               std::span<const std::string> labels) {
  std::size_t n = 1 + r.below(max_states);
  Lts l;
  for (std::size_t i = 0; i < n; ++i)
    l.states.push_back("s" + std::to_string(i));
  l.labels.assign(labels.begin(), labels.end());
  l.succ.assign(n, std::vector<std::vector<std::size_t>>(labels.size()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < labels.size(); ++a)
      for (std::size_t j = 0; j < n; ++j)
        if (r.flip(0.3)) l.succ[i][a].push_back(j);
  return l;
}

namespace {

// Composition of denom into `parts` positive integers, uniformly from
// the cut-point construction.
std::vector<int> random_composition(Rand& r, int denom, int parts) {
  std::vector<int> cuts;
  while (int(cuts.size()) < parts - 1) {
    int c = 1 + int(r.below(std::size_t(denom - 1)));
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end())
      cuts.push_back(c);
  }
  cuts.push_back(0);
  cuts.push_back(denom);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> out;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    out.push_back(cuts[i] - cuts[i - 1]);
  return out;
}

}  // namespace

MarkovChain random_markov(Rand& r, std::size_t max_states, int denom) {
  std::size_t n = 1 + r.below(max_states);
  MarkovChain mc;
  for (std::size_t i = 0; i < n; ++i)
    mc.states.push_back("s" + std::to_string(i));
  mc.trans.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int support = 1 + int(r.below(std::min<std::size_t>(3, n)));
    std::vector<std::size_t> targets;
    while (int(targets.size()) < support) {
      std::size_t t = r.below(n);
      if (std::find(targets.begin(), targets.end(), t) == targets.end())
        targets.push_back(t);
    }
    auto parts = random_composition(r, denom, support);
    for (int s = 0; s < support; ++s)
      mc.trans[i].push_back(
          {targets[std::size_t(s)], double(parts[std::size_t(s)]) / denom});
  }
  return mc;
}

Value random_value(Rand& r, const Structure& st, const FibObject& word,
                   std::size_t carrier, int denom, int max_support) {
  if (word.is_unit()) return Value::base(r.below(carrier));
  FibObject rest{std::vector<std::string>(word.word.begin() + 1,
                                          word.word.end())};
  const auto& desc = st.functor(word.word.front()).desc;
  auto inner = [&] { return random_value(r, st, rest, carrier, denom, max_support); };
  if (std::holds_alternative<FunctorInterp::Powerset>(desc)) {
    std::size_t k = r.below(4);
    std::vector<Value> elems;
    for (std::size_t i = 0; i < k; ++i) elems.push_back(inner());
    return Value::set(std::move(elems));
  }
  if (const auto* e = std::get_if<FunctorInterp::Exponent>(&desc)) {
    std::vector<std::pair<TableKey, Value>> rows;
    for (const auto& k : e->keys) rows.push_back({TableKey{k}, inner()});
    return Value::table(std::move(rows));
  }
  if (std::holds_alternative<FunctorInterp::DistF>(desc)) {
    int support = 1 + int(r.below(std::size_t(max_support)));
    std::vector<Value> points;
    for (int tries = 0; tries < 24 && int(points.size()) < support; ++tries) {
      Value v = inner();
      bool dup = false;
      for (const Value& p : points)
        if (value_eq(p, v)) dup = true;
      if (!dup) points.push_back(std::move(v));
    }
    auto parts = random_composition(r, denom, int(points.size()));
    std::vector<std::pair<Value, double>> mass;
    for (std::size_t i = 0; i < points.size(); ++i)
      mass.push_back({points[i], double(parts[i]) / denom});
    return Value::dist(std::move(mass));
  }
  if (const auto* lp = std::get_if<FunctorInterp::LabelProd>(&desc)) {
    if (lp->labels.empty())
      throw ShapeError("cannot sample pairs without a label universe");
    return Value::pairing(lp->labels[r.below(lp->labels.size())], inner());
  }
  if (const auto* pr = std::get_if<FunctorInterp::Product>(&desc)) {
    std::vector<Value> items;
    for (const FibObject& comp : pr->components)
      items.push_back(random_value(r, st, comp.tensor(rest), carrier, denom,
                                   max_support));
    return Value::tuple(std::move(items));
  }
  throw ShapeError("cannot sample observable tables");
}

// ---------------------------------------------------------------------
// Pools and random syntax.

BackendPools stock_pools(const ClassicalOptions& opt) {
  const FibObject P = FibObject::gen("P"), D = FibObject::gen("D"),
                  R = FibObject::gen("R"), E = FibObject::gen("E"),
                  I = FibObject::unit();
  const FibObject EP = E.tensor(P), PRw = P.tensor(R), PD = P.tensor(D),
                  DR = D.tensor(R), PP = P.tensor(P);
  const Param l0 = opt.pair_labels.at(0);
  const Param l1 =
      opt.pair_labels.size() > 1 ? Param{opt.pair_labels[1]} : l0;

  auto box = ModalityExpr::base("box");
  auto notm = ModalityExpr::base("not");

  BackendPools p;
  p.modalities[P] = {
      {box, 1},
      {ModalityExpr::then(box, notm), 1},
      {ModalityExpr::weaken(box, 2, 0), 2},
      {ModalityExpr::conj({ModalityExpr::weaken(box, 2, 0),
                           ModalityExpr::weaken(box, 2, 1)}),
       2},
  };
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0})
    p.modalities[D].push_back({ModalityExpr::base("deq", {Param{q}}), 1});
  p.modalities[D].push_back(
      {ModalityExpr::then(ModalityExpr::base("deq", {Param{0.5}}), notm), 1});
  for (const std::string& k : opt.exp_keys)
    p.modalities[EP].push_back({lts_box_modality(k), 1});
  p.modalities[PRw] = {
      {ModalityExpr::then(ModalityExpr::base("detcert", {l0}), box), 1},
      {ModalityExpr::sup(box,
                         Morphism::whisker(P, Morphism::gen("snd"), I)),
       1},
  };
  p.modalities[PD] = {
      {ModalityExpr::then(ModalityExpr::base("deq", {Param{0.5}}), box), 1}};
  for (double q : {0.0, 0.5, 1.0}) {
    p.modalities[DR].push_back({dreq_modality(q, opt.pair_labels.at(0)), 1});
    if (opt.pair_labels.size() > 1)
      p.modalities[DR].push_back({dreq_modality(q, opt.pair_labels[1]), 1});
  }
  p.modalities[R] = {{ModalityExpr::base("detcert", {l0}), 1},
                     {ModalityExpr::base("detcert", {l1}), 1}};
  p.modalities[PP] = {{ModalityExpr::then(box, box), 1}};
  p.modalities[I] = {{notm, 1}};

  p.morphisms[P] = {
      {Morphism::whisker(P, Morphism::gen("tag", {l0}), I), PRw},
      {Morphism::whisker(P, Morphism::gen("dirac"), I), PD},
  };
  p.morphisms[PRw] = {{Morphism::whisker(P, Morphism::gen("snd"), I), P}};
  p.morphisms[PD] = {{Morphism::whisker(P, Morphism::gen("supp"), I), PP}};
  p.morphisms[PP] = {{Morphism::gen("flat"), P}};
  p.morphisms[D] = {
      {Morphism::gen("supp"), P},
      {Morphism::whisker(D, Morphism::gen("tag", {l1}), I), DR},
  };
  for (const std::string& k : opt.exp_keys)
    p.morphisms[EP].push_back(
        {Morphism::whisker(I, Morphism::gen("ev", {Param{k}}), P), P});
  p.morphisms[R] = {{Morphism::gen("snd"), I}};
  p.morphisms[I] = {
      {Morphism::gen("tag", {l0}), R},
      {Morphism::gen("dirac"), D},
  };
  return p;
}

FormulaPtr random_formula(Rand& r, const BackendPools& pools,
                          const FibObject& obj, int depth, int size_budget,
                          bool allow_adapt) {
  if (size_budget <= 1) return Formula::top(obj);
  auto mods = pools.modalities.find(obj);
  bool can_apply = depth > 0 && mods != pools.modalities.end() &&
                   !mods->second.empty();
  auto mors = pools.morphisms.find(obj);
  bool can_adapt =
      allow_adapt && mors != pools.morphisms.end() && !mors->second.empty();

  // Weighted choice: top 1, neg 2, conj 2, apply 4, adapt 3.
  std::size_t total = 5 + (can_apply ? 4 : 0) + (can_adapt ? 3 : 0);
  std::size_t roll = r.below(total);
  if (roll < 1) return Formula::top(obj);
  if (roll < 3)
    return Formula::neg(
        random_formula(r, pools, obj, depth, size_budget - 1, allow_adapt));
  if (roll < 5) {
    int half = (size_budget - 1) / 2;
    return Formula::conj(
        {random_formula(r, pools, obj, depth, half, allow_adapt),
         random_formula(r, pools, obj, depth, half, allow_adapt)});
  }
  if (can_apply && roll < 5 + 4u) {
    const auto& [mod, arity] = mods->second[r.below(mods->second.size())];
    std::vector<FormulaPtr> args;
    int share = arity ? (size_budget - 1) / int(arity) : 0;
    for (std::size_t i = 0; i < arity; ++i)
      args.push_back(
          random_formula(r, pools, obj, depth - 1, share, allow_adapt));
    return Formula::apply(mod, std::move(args));
  }
  const auto& [f, target] = mors->second[r.below(mors->second.size())];
  return Formula::adapt(
      f, random_formula(r, pools, target, depth, size_budget - 2, allow_adapt));
}

std::pair<MorphismPtr, FibObject> random_morphism(Rand& r,
                                                  const BackendPools& pools,
                                                  const FibObject& source) {
  auto it = pools.morphisms.find(source);
  if (it == pools.morphisms.end() || it->second.empty())
    return {Morphism::id(source), source};
  if (r.flip(0.25)) return {Morphism::id(source), source};
  auto [f1, t1] = it->second[r.below(it->second.size())];
  auto next = pools.morphisms.find(t1);
  if (r.flip(0.5) || next == pools.morphisms.end() || next->second.empty())
    return {f1, t1};
  auto [f2, t2] = next->second[r.below(next->second.size())];
  return {Morphism::compose(f2, f1), t2};
}

// ---------------------------------------------------------------------
// Behavioural equivalence.

std::vector<std::size_t> bisimulation_partition(const KripkeFrame& k) {
  std::size_t n = k.states.size();
  std::vector<std::size_t> block(n, 0);
  for (;;) {
    // Signature: own block is irrelevant for bisimilarity on plain
    // frames; states split by the set of successor blocks.
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> next(n);
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<std::size_t> sig{block[x]};
      std::vector<std::size_t> succ_blocks;
      for (std::size_t t : k.succ[x]) succ_blocks.push_back(block[t]);
      std::sort(succ_blocks.begin(), succ_blocks.end());
      succ_blocks.erase(
          std::unique(succ_blocks.begin(), succ_blocks.end()),
          succ_blocks.end());
      sig.insert(sig.end(), succ_blocks.begin(), succ_blocks.end());
      auto [it, inserted] = ids.emplace(sig, ids.size());
      next[x] = it->second;
    }
    if (next == block) return block;
    block = std::move(next);
  }
}

KripkeFrame quotient_frame(const KripkeFrame& k,
                           const std::vector<std::size_t>& block) {
  std::size_t m = block.empty()
                      ? 0
                      : 1 + *std::max_element(block.begin(), block.end());
  KripkeFrame q;
  for (std::size_t b = 0; b < m; ++b)
    q.states.push_back("b" + std::to_string(b));
  q.succ.resize(m);
  std::vector<bool> done(m, false);
  for (std::size_t x = 0; x < k.states.size(); ++x) {
    std::size_t b = block[x];
    if (done[b]) continue;
    done[b] = true;
    std::vector<std::size_t> succ;
    for (std::size_t t : k.succ[x]) succ.push_back(block[t]);
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    q.succ[b] = std::move(succ);
  }
  return q;
}

// ---------------------------------------------------------------------
// Quantum separation.

std::unique_ptr<QuantumModel> six_state_model() {
  auto m = std::make_unique<QuantumModel>();
  m->qubits = 1;
  install_quantum(*m);
  m->add_observable("Z", gate_Z());
  m->add_observable("X", gate_X());
  m->add_observable("Y", gate_Y());
  const double s = 1.0 / std::sqrt(2.0);
  auto ket = [](cplx a, cplx b) { return PureState{{a, b}}; };
  std::vector<std::pair<std::string, PureState>> states = {
      {"z0", ket(1, 0)},          {"z1", ket(0, 1)},
      {"xp", ket(s, s)},          {"xm", ket(s, -s)},
      {"yp", ket(s, cplx(0, s))}, {"ym", ket(s, cplx(0, -s))},
  };
  for (auto& [name, v] : states) {
    m->add_state_const(name, v);
    m->add_carrier_state(name, v);
  }
  m->initial.push_back(0);
  return m;
}

PropertyReport check_quantum_singleton_separation(QuantumModel& m) {
  PropertyReport rep{"six-state singleton separation"};
  Coalgebra c = quantum_coalgebra(m);
  std::vector<std::string> obs;
  for (const auto& [name, h] : m.observables) obs.push_back(name);
  const double ps[] = {0.0, 0.5, 1.0};
  const double rs[] = {1.0, -1.0};
  for (std::size_t x = 0; x < m.declared; ++x) {
    for (std::size_t y = x + 1; y < m.declared; ++y) {
      ++rep.checked;
      bool found = false;
      for (const auto& a : obs) {
        for (double rr : rs) {
          for (double p : ps) {
            ModalityPtr mod = outcome_mass(m, p, rr, a);
            for (std::size_t z = 0; z < m.carrier.size() && !found; ++z) {
              SubsetPred pred = mask_pred(1u << z);
              std::vector<SubsetPred> args{pred};
              bool ix = eval_lifting(m.st, *mod, args, c.gamma(x));
              bool iy = eval_lifting(m.st, *mod, args, c.gamma(y));
              found = ix != iy;
            }
            if (found) break;
          }
          if (found) break;
        }
        if (found) break;
      }
      if (!found)
        note(rep, "behaviours of " + m.state_names[x] + " and " +
                      m.state_names[y] + " are indistinguishable");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------
// Suites.

namespace {

struct StockWorld {
  FibredSignature sig;
  Structure st;
  ClassicalOptions opt;

  explicit StockWorld(ClassicalOptions o = {}) : opt(std::move(o)) {
    install_classical(sig, st, opt);
    st.signature = &sig;
  }
  StockWorld(const StockWorld&) = delete;
};

}  // namespace

std::vector<PropertyReport> run_naturality_suite(std::uint64_t seed) {
  ClassicalOptions opt;
  opt.product_components = {FibObject::gen("P"), FibObject::gen("D")};
  StockWorld w(opt);
  const FibObject P = FibObject::gen("P"), D = FibObject::gen("D"),
                  R = FibObject::gen("R"), E = FibObject::gen("E"),
                  I = FibObject::unit(), PR = FibObject::gen("PR");

  struct Subject {
    MorphismPtr f;
    FibObject source;
  };
  std::vector<Subject> morphisms = {
      {Morphism::gen("ev", {Param{std::string("a")}}), E},
      {Morphism::gen("ev", {Param{std::string("b")}}), E},
      {Morphism::gen("snd"), R},
      {Morphism::gen("tag", {w.opt.pair_labels[0]}), I},
      {Morphism::gen("dirac"), I},
      {Morphism::gen("supp"), D},
      {Morphism::gen("flat"), P.tensor(P)},
      {Morphism::gen("pr1"), PR},
      {Morphism::gen("pr2"), PR},
      {Morphism::whisker(P, Morphism::gen("snd"), I), P.tensor(R)},
      {Morphism::whisker(I, Morphism::gen("ev", {Param{std::string("a")}}), P),
       E.tensor(P)},
  };

  auto values_at = [&](const FibObject& word, std::size_t n) {
    auto pts = base_points(n);
    if (word == E) {
      std::vector<std::string> keys = w.opt.exp_keys;
      return enumerate_tables(keys, pts);
    }
    if (word == R) return enumerate_pairs(w.opt.pair_labels, pts);
    if (word == I) return pts;
    if (word == D) return enumerate_dyadic_dists(pts, 4, 3);
    if (word == P) return enumerate_sets(pts);
    if (word == P.tensor(P)) {
      auto sets = enumerate_sets(pts);
      return enumerate_sets(sets, 300);
    }
    if (word == P.tensor(R)) {
      auto pairs = enumerate_pairs(w.opt.pair_labels, pts);
      return enumerate_sets(pairs, 300);
    }
    if (word == E.tensor(P)) {
      auto sets = enumerate_sets(pts);
      std::vector<std::string> keys = w.opt.exp_keys;
      return enumerate_tables(keys, sets, 300);
    }
    if (word == PR) {
      auto sets = enumerate_sets(pts);
      auto dists = enumerate_dyadic_dists(pts, 4, 2);
      return enumerate_tuples(sets, dists, 300);
    }
    throw ShapeError("no enumeration for " + word.str());
  };

  std::vector<PropertyReport> out;
  const std::pair<std::size_t, std::size_t> combos[] = {{3, 3}, {3, 2}, {2, 3}};
  for (const auto& s : morphisms) {
    PropertyReport rep{morphism_to_string(*s.f) + ": naturality"};
    for (auto [cx, cy] : combos) {
      auto vals = values_at(s.source, cx);
      merge(rep, check_naturality_morphism(w.st, s.f, vals, cx, cy));
    }
    Rand r(seed);
    std::vector<Value> sampled;
    for (int i = 0; i < 10; ++i)
      sampled.push_back(random_value(r, w.st, s.source, 5, 4, 3));
    merge(rep, check_naturality_morphism(w.st, s.f, sampled, 5, 4));
    out.push_back(std::move(rep));
  }

  struct LiftSubject {
    LiftingFamily fam;
    FibObject home;
  };
  std::vector<LiftSubject> liftings;
  liftings.push_back({{"box", {{"box", ModalityExpr::base("box")}}}, P});
  {
    LiftingFamily deqf{"deq", {}};
    for (double q : {0.0, 0.25, 0.5, 1.0})
      deqf.members.push_back(
          {"deq[" + format_double(q) + "]", ModalityExpr::base("deq", {Param{q}})});
    liftings.push_back({deqf, D});
  }
  {
    LiftingFamily dc{"detcert", {}};
    for (const Label& l : w.opt.pair_labels)
      dc.members.push_back({"detcert[" + label_to_string(l) + "]",
                            ModalityExpr::base("detcert", {Param{l}})});
    liftings.push_back({dc, R});
  }
  liftings.push_back({{"not", {{"not", ModalityExpr::base("not")}}}, I});
  liftings.push_back({{"top", {{"top", ModalityExpr::base("top")}}}, I});

  for (const auto& s : liftings) {
    PropertyReport rep{s.fam.name + ": lifting naturality"};
    for (auto [cx, cy] : combos) {
      auto vals = values_at(s.home, cx);
      merge(rep, check_naturality_lifting(w.st, s.fam, s.home, vals, cx, cy));
    }
    out.push_back(std::move(rep));
  }
  return out;
}

namespace {

LiftingFamily deq_family(int denom) {
  LiftingFamily fam{"deq", {}};
  for (int k = 0; k <= denom; ++k)
    fam.members.push_back({"deq[" + std::to_string(k) + "/" + std::to_string(denom) + "]",
                           ModalityExpr::base("deq", {Param{double(k) / denom}})});
  return fam;
}

LiftingFamily detcert_family(std::span<const Label> labels) {
  LiftingFamily fam{"detcert", {}};
  for (const Label& l : labels)
    fam.members.push_back({"detcert[" + label_to_string(l) + "]",
                           ModalityExpr::base("detcert", {Param{l}})});
  return fam;
}

LiftingFamily dreq_family(int denom, std::span<const Label> labels) {
  LiftingFamily fam{"dreq", {}};
  for (const Label& l : labels)
    for (int k = 0; k <= denom; ++k)
      fam.members.push_back(
          {"dreq[" + std::to_string(k) + "/" + std::to_string(denom) + "," +
               label_to_string(l) + "]",
           dreq_modality(double(k) / denom, l)});
  return fam;
}

std::vector<Value> random_values(Rand& r, const Structure& st,
                                 const FibObject& word, std::size_t carrier,
                                 std::size_t count, int denom,
                                 int max_support) {
  std::vector<Value> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(random_value(r, st, word, carrier, denom, max_support));
  return out;
}

}  // namespace

std::vector<PropertyReport> run_separation_suite(std::uint64_t seed) {
  StockWorld w;
  const FibObject D = FibObject::gen("D"), R = FibObject::gen("R");
  std::vector<PropertyReport> out;

  auto pts3 = base_points(3);
  auto dists3 = enumerate_dyadic_dists(pts3, 8, 3);
  out.push_back(
      check_separating(w.st, deq_family(8), dists3, 3, /*singletons=*/true));

  auto pairs3 = enumerate_pairs(w.opt.pair_labels, pts3);
  out.push_back(check_mutually_surjective_on_singletons(
      w.st, detcert_family(w.opt.pair_labels), pairs3, 3));

  auto pair_dists3 = enumerate_dyadic_dists(pairs3, 8, 3);
  out.push_back(check_separating(w.st, dreq_family(8, w.opt.pair_labels),
                                 pair_dists3, 3, /*singletons=*/false,
                                 /*max_pairs=*/20000, seed));

  auto six = six_state_model();
  out.push_back(check_quantum_singleton_separation(*six));
  return out;
}

PropertyReport run_translation_suite(std::uint64_t seed, std::size_t count) {
  StockWorld w;
  BackendPools pools = stock_pools(w.opt);
  Rand r(seed);
  PropertyReport rep{"translation soundness"};
  rep.checked = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Coalgebra c;
    switch (i % 3) {
      case 0: c = kripke_coalgebra(random_kripke(r, 6)); break;
      case 1: c = lts_coalgebra(random_lts(r, 6, w.opt.exp_keys)); break;
      default: c = markov_coalgebra(random_markov(r, 6, 8), w.st.tol.eps);
    }
    auto [f, target] = random_morphism(r, pools, c.fibre);
    FormulaPtr phi = random_formula(r, pools, target, 2, 10, true);
    PropertyReport part = check_translation_instance(w.st, c, f, phi);
    ++rep.checked;
    for (const auto& cx : part.counterexamples)
      note(rep, "instance " + std::to_string(i) + ": " + cx);
  }
  return rep;
}

PropertyReport run_invariance_suite(std::uint64_t seed, std::size_t frames,
                                    std::size_t formulas_per_frame,
                                    std::size_t max_states, int max_depth) {
  StockWorld w;
  BackendPools pools = stock_pools(w.opt);
  Rand r(seed);
  PropertyReport rep{"behavioural invariance"};
  const FibObject P = FibObject::gen("P");
  for (std::size_t i = 0; i < frames; ++i) {
    KripkeFrame k = random_kripke(r, max_states);
    auto block = bisimulation_partition(k);
    KripkeFrame q = quotient_frame(k, block);
    Coalgebra c1 = kripke_coalgebra(k);
    Coalgebra c2 = kripke_coalgebra(q);
    for (std::size_t j = 0; j < formulas_per_frame; ++j) {
      FormulaPtr phi = random_formula(r, pools, P, max_depth, 12, true);
      HomReport hr = check_homomorphism_invariance(w.st, c1, c2, block, *phi);
      ++rep.checked;
      if (!hr.is_homomorphism) {
        note(rep, "frame " + std::to_string(i) +
                      ": quotient map is not a homomorphism: " + hr.detail);
      } else if (!hr.invariant) {
        note(rep, "frame " + std::to_string(i) + ": " + to_string(*phi) +
                      " is not invariant: " + hr.detail);
      }
    }
  }
  return rep;
}

std::vector<PropertyReport> run_lemma_suite(std::uint64_t seed) {
  ClassicalOptions opt;
  opt.product_components = {FibObject::gen("P"), FibObject::gen("D")};
  StockWorld w(opt);
  const FibObject P = FibObject::gen("P"), D = FibObject::gen("D"),
                  R = FibObject::gen("R"), E = FibObject::gen("E"),
                  I = FibObject::unit(), PR = FibObject::gen("PR");
  std::vector<PropertyReport> out;
  Rand r(seed);

  // deq separates by singletons: exhaustive then size-5 random pairs.
  {
    auto pts = base_points(3);
    auto dists = enumerate_dyadic_dists(pts, 8, 3);
    PropertyReport rep =
        check_separating(w.st, deq_family(8), dists, 3, true);
    auto rnd = random_values(r, w.st, D, 5, 1000, 8, 3);
    merge(rep, check_separating(w.st, deq_family(8), rnd, 5, true, 1000, seed));
    out.push_back(std::move(rep));
  }

  // detcert: monotone and mutually surjective on singletons.
  {
    auto fam = detcert_family(w.opt.pair_labels);
    auto pairs3 = enumerate_pairs(w.opt.pair_labels, base_points(3));
    PropertyReport mono = check_monotone(w.st, fam, pairs3, 3);
    auto rnd = random_values(r, w.st, R, 5, 1000, 8, 3);
    merge(mono, check_monotone(w.st, fam, rnd, 5));
    out.push_back(std::move(mono));

    PropertyReport msos =
        check_mutually_surjective_on_singletons(w.st, fam, pairs3, 3);
    auto pairs5 = enumerate_pairs(w.opt.pair_labels, base_points(5));
    merge(msos,
          check_mutually_surjective_on_singletons(w.st, fam, pairs5, 5));
    out.push_back(std::move(msos));
  }

  // dreq separating (the sequencing separation lemma instance).
  {
    auto fam = dreq_family(8, w.opt.pair_labels);
    auto pair_dists =
        enumerate_dyadic_dists(enumerate_pairs(w.opt.pair_labels, base_points(3)), 8, 3);
    PropertyReport rep =
        check_separating(w.st, fam, pair_dists, 3, false, 20000, seed);
    auto rnd = random_values(r, w.st, D.tensor(R), 5, 1000, 8, 3);
    merge(rep, check_separating(w.st, fam, rnd, 5, false, 1000, seed + 1));
    out.push_back(std::move(rep));
  }

  // Evaluation separation: key-indexed tables of distributions are
  // separated by deq superscripted with the lookups.
  {
    LiftingFamily fam{"deq over lookups", {}};
    for (const std::string& k : w.opt.exp_keys)
      for (int q = 0; q <= 4; ++q)
        fam.members.push_back(
            {"deq[" + std::to_string(q) + "/4]^ev[" + k + "]",
             ModalityExpr::sup(
                 ModalityExpr::base("deq", {Param{double(q) / 4}}),
                 Morphism::whisker(I, Morphism::gen("ev", {Param{k}}), D))});
    auto dists = enumerate_dyadic_dists(base_points(3), 4, 2);
    auto tables = enumerate_tables(w.opt.exp_keys, dists, 4096);
    PropertyReport rep =
        check_separating(w.st, fam, tables, 3, false, 20000, seed);
    auto rnd = random_values(r, w.st, E.tensor(D), 5, 1000, 4, 2);
    merge(rep, check_separating(w.st, fam, rnd, 5, false, 1000, seed + 2));
    out.push_back(std::move(rep));
  }

  // Product separation: projection-superscripted families separate
  // tuples of sets and distributions.
  {
    LiftingFamily fam{"projected box and deq", {}};
    fam.members.push_back(
        {"box^pr1",
         ModalityExpr::sup(ModalityExpr::base("box"), Morphism::gen("pr1"))});
    for (int q = 0; q <= 4; ++q)
      fam.members.push_back(
          {"deq[" + std::to_string(q) + "/4]^pr2",
           ModalityExpr::sup(ModalityExpr::base("deq", {Param{double(q) / 4}}),
                             Morphism::gen("pr2"))});
    auto pts = base_points(3);
    auto tuples = enumerate_tuples(enumerate_sets(pts),
                                   enumerate_dyadic_dists(pts, 4, 2), 4096);
    PropertyReport rep =
        check_separating(w.st, fam, tuples, 3, false, 20000, seed);
    auto rnd = random_values(r, w.st, PR, 5, 1000, 4, 2);
    merge(rep, check_separating(w.st, fam, rnd, 5, false, 1000, seed + 3));
    out.push_back(std::move(rep));
  }

  // Sequencing preserves monotonicity.
  {
    LiftingFamily fam{"monotone compositions", {}};
    fam.members.push_back(
        {"box after detcert",
         ModalityExpr::then(ModalityExpr::base("detcert", {w.opt.pair_labels[0]}),
                            ModalityExpr::base("box"))});
    auto pairs = enumerate_pairs(w.opt.pair_labels, base_points(3));
    auto sets_of_pairs = enumerate_sets(pairs, 4096);
    PropertyReport rep = check_monotone(w.st, fam, sets_of_pairs, 3);

    LiftingFamily fam2{"monotone compositions", {}};
    fam2.members.push_back(
        {"box after box", ModalityExpr::then(ModalityExpr::base("box"),
                                             ModalityExpr::base("box"))});
    auto sets_of_sets = enumerate_sets(enumerate_sets(base_points(3)), 300);
    merge(rep, check_monotone(w.st, fam2, sets_of_sets, 3));

    auto rnd = random_values(r, w.st, P.tensor(R), 5, 500, 4, 2);
    merge(rep, check_monotone(w.st, fam, rnd, 5));
    auto rnd2 = random_values(r, w.st, P.tensor(P), 5, 500, 4, 2);
    merge(rep, check_monotone(w.st, fam2, rnd2, 5));
    out.push_back(std::move(rep));
  }

  return out;
}

}  // namespace fibcoalg
