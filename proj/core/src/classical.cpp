#include "fibcoalg/classical.hpp"

#include <cmath>

namespace fibcoalg {

namespace {

double param_number(const Param& p, const char* what) {
  if (!std::holds_alternative<double>(p))
    throw TypeError(what, "a numeric parameter", std::get<std::string>(p));
  return std::get<double>(p);
}

Label param_label(const Param& p) {
  if (std::holds_alternative<double>(p)) return Label{std::get<double>(p)};
  return Label{std::get<std::string>(p)};
}

bool label_matches(const Label& a, const Label& b, double eps) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<double>(a))
    return std::abs(std::get<double>(a) - std::get<double>(b)) <= eps;
  return std::get<std::string>(a) == std::get<std::string>(b);
}

}  // namespace

bool box_member(std::span<const SubsetPred> args, const Value& v) {
  const auto& s = v.as<Value::Set>("set");
  for (const auto& e : s.elems)
    if (!args[0](e)) return false;
  return true;
}

bool deq_member(double p, double eps, std::span<const SubsetPred> args, const Value& v) {
  const auto& d = v.as<Value::Dist>("distribution");
  double mass = 0;
  for (const auto& [k, q] : d.mass)
    if (args[0](k)) mass += q;
  return std::abs(mass - p) <= eps;
}

bool detcert_member(const Label& s, double eps, std::span<const SubsetPred> args,
                    const Value& v) {
  const auto& pr = v.as<Value::Pairing>("pair");
  return label_matches(pr.label, s, eps) && args[0](pr.inner);
}

void install_identity_liftings(FibredSignature& sig, Structure& st) {
  sig.modalities["top"] =
      ModalityFamilyDecl{ModalityFamilyDecl::Fixed{FibObject::unit(), 0}};
  sig.modalities["not"] =
      ModalityFamilyDecl{ModalityFamilyDecl::Fixed{FibObject::unit(), 1}};
  st.liftings["top"] = Lifting{[](const LiftContext&, const std::vector<Param>&,
                                  std::span<const SubsetPred>, const Value&) { return true; }};
  st.liftings["not"] = Lifting{[](const LiftContext&, const std::vector<Param>&,
                                  std::span<const SubsetPred> args, const Value& v) {
    return !args[0](v);
  }};
}

ModalityPtr dreq_modality(double p, const Label& s) {
  Param sp = std::holds_alternative<double>(s) ? Param{std::get<double>(s)}
                                               : Param{std::get<std::string>(s)};
  return ModalityExpr::then(ModalityExpr::base("detcert", {sp}),
                            ModalityExpr::base("deq", {Param{p}}));
}

void install_classical(FibredSignature& sig, Structure& st, const ClassicalOptions& opt) {
  install_identity_liftings(sig, st);

  sig.object_gens.insert({"P", "E", "D", "R"});
  st.functors["P"] = FunctorInterp{FunctorInterp::Powerset{}};
  st.functors["E"] = FunctorInterp{FunctorInterp::Exponent{opt.exp_keys}};
  st.functors["D"] = FunctorInterp{FunctorInterp::DistF{}};
  st.functors["R"] = FunctorInterp{FunctorInterp::LabelProd{opt.pair_labels}};

  sig.modalities["box"] =
      ModalityFamilyDecl{ModalityFamilyDecl::Fixed{FibObject::gen("P"), 1}};
  st.liftings["box"] = Lifting{[](const LiftContext&, const std::vector<Param>& params,
                                  std::span<const SubsetPred> args, const Value& v) {
    if (!params.empty()) throw TypeError("box", "no parameters", "parameters");
    return box_member(args, v);
  }};

  sig.modalities["deq"] =
      ModalityFamilyDecl{ModalityFamilyDecl::Fixed{FibObject::gen("D"), 1}};
  st.liftings["deq"] = Lifting{[](const LiftContext& ctx, const std::vector<Param>& params,
                                  std::span<const SubsetPred> args, const Value& v) {
    if (params.size() != 1) throw TypeError("deq", "one parameter p", "none or several");
    double p = param_number(params[0], "deq probability");
    if (p < 0 || p > 1)
      throw ModelError("deq probability " + format_double(p) + " outside [0,1]");
    return deq_member(p, ctx.eps, args, v);
  }};

  sig.modalities["detcert"] =
      ModalityFamilyDecl{ModalityFamilyDecl::Fixed{FibObject::gen("R"), 1}};
  st.liftings["detcert"] = Lifting{[](const LiftContext& ctx, const std::vector<Param>& params,
                                      std::span<const SubsetPred> args, const Value& v) {
    if (params.size() != 1) throw TypeError("detcert", "one label parameter", "none or several");
    return detcert_member(param_label(params[0]), ctx.eps, args, v);
  }};

  // ev[k] : E -> I
  sig.morphism_schemata["ev"] = [](const std::vector<Param>& params) {
    if (params.size() != 1)
      throw TypeError("ev", "one key parameter", "none or several");
    return MorphismGenDecl{FibObject::gen("E"), FibObject::unit()};
  };
  st.morphisms["ev"] = [](const std::vector<Param>& params) {
    std::string key = std::holds_alternative<std::string>(params.at(0))
                          ? std::get<std::string>(params[0])
                          : param_to_string(params[0]);
    return NatTrans{FibObject::gen("E"), FibObject::unit(),
                    [key](const Value& v) { return v.lookup(TableKey{key}); }};
  };

  // snd : R -> I
  sig.morphism_gens["snd"] = MorphismGenDecl{FibObject::gen("R"), FibObject::unit()};
  st.morphisms["snd"] = [](const std::vector<Param>&) {
    return NatTrans{FibObject::gen("R"), FibObject::unit(),
                    [](const Value& v) { return v.as<Value::Pairing>("pair").inner; }};
  };

  // tag[s] : I -> R
  sig.morphism_schemata["tag"] = [](const std::vector<Param>& params) {
    if (params.size() != 1) throw TypeError("tag", "one label parameter", "none or several");
    return MorphismGenDecl{FibObject::unit(), FibObject::gen("R")};
  };
  st.morphisms["tag"] = [](const std::vector<Param>& params) {
    Label s = param_label(params.at(0));
    return NatTrans{FibObject::unit(), FibObject::gen("R"),
                    [s](const Value& v) { return Value::pairing(s, v); }};
  };

  // dirac : I -> D
  sig.morphism_gens["dirac"] = MorphismGenDecl{FibObject::unit(), FibObject::gen("D")};
  st.morphisms["dirac"] = [](const std::vector<Param>&) {
    return NatTrans{FibObject::unit(), FibObject::gen("D"),
                    [](const Value& v) { return Value::dist({{v, 1.0}}); }};
  };

  // supp : D -> P
  sig.morphism_gens["supp"] = MorphismGenDecl{FibObject::gen("D"), FibObject::gen("P")};
  st.morphisms["supp"] = [](const std::vector<Param>&) {
    return NatTrans{FibObject::gen("D"), FibObject::gen("P"), [](const Value& v) {
      const auto& d = v.as<Value::Dist>("distribution");
      std::vector<Value> elems;
      elems.reserve(d.mass.size());
      for (const auto& [k, p] : d.mass) elems.push_back(k);
      return Value::set(std::move(elems));
    }};
  };

  // flat : P*P -> P
  sig.morphism_gens["flat"] =
      MorphismGenDecl{FibObject{{"P", "P"}}, FibObject::gen("P")};
  st.morphisms["flat"] = [](const std::vector<Param>&) {
    return NatTrans{FibObject{{"P", "P"}}, FibObject::gen("P"), [](const Value& v) {
      const auto& outer = v.as<Value::Set>("set");
      std::vector<Value> elems;
      for (const auto& inner : outer.elems) {
        const auto& s = inner.as<Value::Set>("set");
        elems.insert(elems.end(), s.elems.begin(), s.elems.end());
      }
      return Value::set(std::move(elems));
    }};
  };

  if (opt.product_components.size() == 2) {
    sig.object_gens.insert("PR");
    st.functors["PR"] = FunctorInterp{FunctorInterp::Product{opt.product_components}};
    for (std::size_t i = 0; i < 2; ++i) {
      std::string name = i == 0 ? "pr1" : "pr2";
      sig.morphism_gens[name] =
          MorphismGenDecl{FibObject::gen("PR"), opt.product_components[i]};
      st.morphisms[name] = [i, comp = opt.product_components[i]](const std::vector<Param>&) {
        return NatTrans{FibObject::gen("PR"), comp, [i](const Value& v) {
          return v.as<Value::Tuple>("tuple").items.at(i);
        }};
      };
    }
  }
}

Coalgebra kripke_coalgebra(const KripkeFrame& k) {
  Carrier carrier{k.states};
  std::vector<Value> values;
  values.reserve(k.states.size());
  for (const auto& succ : k.succ) {
    std::vector<Value> elems;
    elems.reserve(succ.size());
    for (auto s : succ) elems.push_back(Value::base(s));
    values.push_back(Value::set(std::move(elems)));
  }
  return Coalgebra::from_map(std::move(carrier), FibObject::gen("P"), std::move(values));
}

Coalgebra lts_coalgebra(const Lts& l) {
  Carrier carrier{l.states};
  std::vector<Value> values;
  values.reserve(l.states.size());
  for (const auto& per_state : l.succ) {
    std::vector<std::pair<TableKey, Value>> rows;
    for (std::size_t li = 0; li < l.labels.size(); ++li) {
      std::vector<Value> elems;
      for (auto s : per_state.at(li)) elems.push_back(Value::base(s));
      rows.emplace_back(TableKey{l.labels[li]}, Value::set(std::move(elems)));
    }
    values.push_back(Value::table(std::move(rows)));
  }
  return Coalgebra::from_map(std::move(carrier), FibObject{{"E", "P"}}, std::move(values));
}

Coalgebra markov_coalgebra(const MarkovChain& m, double eps) {
  Carrier carrier{m.states};
  std::vector<Value> values;
  values.reserve(m.states.size());
  for (const auto& row : m.trans) {
    std::vector<std::pair<Value, double>> mass;
    mass.reserve(row.size());
    for (const auto& [s, p] : row) mass.emplace_back(Value::base(s), p);
    values.push_back(Value::dist(std::move(mass), eps));
  }
  return Coalgebra::from_map(std::move(carrier), FibObject::gen("D"), std::move(values));
}

ModalityPtr lts_box_modality(const std::string& label) {
  auto lookup = Morphism::whisker(FibObject::unit(),
                                  Morphism::gen("ev", {Param{label}}), FibObject::gen("P"));
  return ModalityExpr::sup(ModalityExpr::base("box"), lookup);
}

}  // namespace fibcoalg
