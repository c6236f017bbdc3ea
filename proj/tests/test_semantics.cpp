#include <catch2/catch_amalgamated.hpp>

#include "fibcoalg/classical.hpp"
#include "fibcoalg/props.hpp"
#include "support/stock.hpp"

using namespace fibcoalg;

namespace {
const FibObject P = FibObject::gen("P");
const FibObject D = FibObject::gen("D");
const FibObject R = FibObject::gen("R");

Value b(std::size_t i) { return Value::base(i); }
Label lu() { return Label{std::string("u")}; }
Label lv() { return Label{std::string("v")}; }

SubsetPred in_set(std::vector<Value> elems) {
  auto held = std::make_shared<std::vector<Value>>(std::move(elems));
  return [held](const Value& v) {
    for (const Value& e : *held)
      if (value_eq(e, v)) return true;
    return false;
  };
}

KripkeFrame demo_frame() {
  // s0 -> s1 s2, s1 -> s0, s2 deadlock, s3 -> s3
  KripkeFrame k;
  k.states = {"s0", "s1", "s2", "s3"};
  k.succ = {{1, 2}, {0}, {}, {3}};
  return k;
}
}  // namespace

TEST_CASE("box membership is set inclusion", "[semantics]") {
  testsupport::Stock w;
  auto box = ModalityExpr::base("box");
  SubsetPred u = in_set({b(0), b(1)});
  std::vector<SubsetPred> args = {u};
  CHECK(eval_lifting(w.st, *box, args, Value::set({b(0), b(1)})));
  CHECK(eval_lifting(w.st, *box, args, Value::set({b(1)})));
  CHECK(eval_lifting(w.st, *box, args, Value::set({})));
  CHECK_FALSE(eval_lifting(w.st, *box, args, Value::set({b(0), b(2)})));
}

TEST_CASE("deq membership compares mass inside the subset", "[semantics]") {
  testsupport::Stock w;
  // Distribution over pairs: (u, x0) at 1/2, (v, x1) at 1/2; the subset
  // holds the pairs whose point is x0.
  Value d = Value::dist({{Value::pairing(lu(), b(0)), 0.5},
                         {Value::pairing(lv(), b(1)), 0.5}});
  SubsetPred u = [](const Value& v) {
    const auto* pr = v.get_if<Value::Pairing>();
    return pr && value_eq(pr->inner, b(0));
  };
  std::vector<SubsetPred> args = {u};
  auto deq_at = [&](double p) {
    return eval_lifting(w.st, *ModalityExpr::base("deq", {Param{p}}), args, d);
  };
  CHECK(deq_at(0.5));
  CHECK_FALSE(deq_at(1.0));
  CHECK_FALSE(deq_at(0.0));
  CHECK_FALSE(deq_at(0.25));
}

TEST_CASE("deq is exact equality of mass within eps", "[semantics]") {
  testsupport::Stock w;
  Value d = Value::dist({{b(0), 0.25}, {b(1), 0.75}});
  std::vector<SubsetPred> args = {in_set({b(0)})};
  CHECK(eval_lifting(w.st, *ModalityExpr::base("deq", {Param{0.25}}), args, d));
  CHECK_FALSE(eval_lifting(w.st, *ModalityExpr::base("deq", {Param{0.25 + 1e-6}}), args, d));
  CHECK(eval_lifting(w.st, *ModalityExpr::base("deq", {Param{0.25 + 1e-10}}), args, d));
}

TEST_CASE("detcert checks the label and the point together", "[semantics]") {
  testsupport::Stock w;
  std::vector<SubsetPred> args = {in_set({b(0)})};
  auto detcert_u = ModalityExpr::base("detcert", {Param{std::string("u")}});
  CHECK(eval_lifting(w.st, *detcert_u, args, Value::pairing(lu(), b(0))));
  CHECK_FALSE(eval_lifting(w.st, *detcert_u, args, Value::pairing(lv(), b(0))));
  CHECK_FALSE(eval_lifting(w.st, *detcert_u, args, Value::pairing(lu(), b(1))));
}

TEST_CASE("negation and weakening act pointwise on liftings", "[semantics]") {
  testsupport::Stock w;
  auto box = ModalityExpr::base("box");
  std::vector<SubsetPred> args = {in_set({b(0)})};
  Value v = Value::set({b(1)});
  CHECK_FALSE(eval_lifting(w.st, *box, args, v));
  CHECK(eval_lifting(w.st, *ModalityExpr::neg(box), args, v));

  // Binary weakening at slot 2 ignores the first argument entirely.
  auto wk = ModalityExpr::weaken(box, 2, 1);
  std::vector<SubsetPred> two = {in_set({}), in_set({b(1)})};
  CHECK(eval_lifting(w.st, *wk, two, v));
  std::vector<SubsetPred> two_rev = {in_set({b(1)}), in_set({})};
  CHECK_FALSE(eval_lifting(w.st, *wk, two_rev, v));
}

TEST_CASE("superscript membership factors through the morphism", "[semantics]") {
  testsupport::Stock w;
  auto lifted = ModalityExpr::sup(ModalityExpr::base("box"), Morphism::gen("supp"));
  std::vector<SubsetPred> args = {in_set({b(0), b(1)})};
  CHECK(eval_lifting(w.st, *lifted, args, Value::dist({{b(0), 0.5}, {b(1), 0.5}})));
  CHECK_FALSE(eval_lifting(w.st, *lifted, args,
                           Value::dist({{b(0), 0.5}, {b(2), 0.5}})));
}

TEST_CASE("sequencing goes through an intensional intermediate subset", "[semantics]") {
  testsupport::Stock w;
  // detcert[u] . deq[1/2] at D*R: exactly half the mass sits on pairs
  // labelled u whose point lies in the subset.
  auto m = dreq_modality(0.5, lu());
  CHECK(type_of_modality(*m, w.sig) == ModalityType{D.tensor(R), 1});
  std::vector<SubsetPred> args = {in_set({b(0)})};
  Value good = Value::dist({{Value::pairing(lu(), b(0)), 0.5},
                            {Value::pairing(lv(), b(0)), 0.5}});
  CHECK(eval_lifting(w.st, *m, args, good));
  Value wrong_label = Value::dist({{Value::pairing(lv(), b(0)), 1.0}});
  CHECK_FALSE(eval_lifting(w.st, *m, args, wrong_label));
  Value wrong_point = Value::dist({{Value::pairing(lu(), b(1)), 0.5},
                                   {Value::pairing(lu(), b(0)), 0.5}});
  CHECK(eval_lifting(w.st, *m, args, wrong_point));
  Value full = Value::dist({{Value::pairing(lu(), b(0)), 1.0}});
  CHECK_FALSE(eval_lifting(w.st, *m, args, full));
}

TEST_CASE("formula extents over a frame", "[semantics]") {
  testsupport::Stock w;
  Coalgebra c = kripke_coalgebra(demo_frame());
  auto box = ModalityExpr::base("box");
  auto dead = Formula::apply(box, {Formula::bottom(P)});

  StateSet ext = eval_formula(w.st, *dead, c);
  CHECK(ext.members() == std::vector<std::size_t>{2});

  // box(dead): every successor is a deadlock.
  StateSet ext2 = eval_formula(w.st, *Formula::apply(box, {dead}), c);
  CHECK(ext2.members() == std::vector<std::size_t>{2});

  // s0 has a deadlock successor: !box(!dead).
  auto can_reach_dead = Formula::neg(Formula::apply(box, {Formula::neg(dead)}));
  CHECK(eval_formula(w.st, *can_reach_dead, c).members() == std::vector<std::size_t>{0});
}

TEST_CASE("demand-driven satisfaction agrees with the extent", "[semantics]") {
  testsupport::Stock w;
  Coalgebra c = kripke_coalgebra(demo_frame());
  auto box = ModalityExpr::base("box");
  auto dead = Formula::apply(box, {Formula::bottom(P)});
  std::vector<FormulaPtr> formulas = {
      dead,
      Formula::apply(box, {dead}),
      Formula::neg(Formula::apply(box, {Formula::neg(dead)})),
      Formula::implies(dead, Formula::apply(box, {Formula::top(P)})),
  };
  for (const auto& f : formulas) {
    StateSet ext = eval_formula(w.st, *f, c);
    for (std::size_t s = 0; s < c.carrier.size(); ++s) {
      INFO(to_string(*f) << " at state " << s);
      CHECK(holds_at(w.st, *f, c, s) == ext.test(s));
    }
  }
}

TEST_CASE("adaptation evaluates by restructuring the coalgebra", "[semantics]") {
  testsupport::Stock w;
  // Markov chain: m0 -> m1 with certainty, m1 splits evenly.
  MarkovChain mc;
  mc.states = {"m0", "m1"};
  mc.trans = {{{1, 1.0}}, {{0, 0.5}, {1, 0.5}}};
  Coalgebra c = markov_coalgebra(mc);

  // supp : D -> P, then ask box over the support.
  auto phi = Formula::apply(ModalityExpr::base("box"),
                            {Formula::neg(Formula::top(P))});
  auto adapted = Formula::adapt(Morphism::gen("supp"), phi);
  StateSet ext = eval_formula(w.st, *adapted, c);
  CHECK(ext.count() == 0);

  auto t = Formula::apply(ModalityExpr::base("box"), {Formula::top(P)});
  CHECK(eval_formula(w.st, *Formula::adapt(Morphism::gen("supp"), t), c).count() == 2);
}

TEST_CASE("translation agrees with direct adaptation on an instance", "[semantics]") {
  testsupport::Stock w;
  MarkovChain mc;
  mc.states = {"m0", "m1", "m2"};
  mc.trans = {{{1, 0.5}, {2, 0.5}}, {{1, 1.0}}, {{0, 0.25}, {2, 0.75}}};
  Coalgebra c = markov_coalgebra(mc);
  auto supp = Morphism::gen("supp");
  auto phi = Formula::apply(ModalityExpr::base("box"),
                            {Formula::apply(ModalityExpr::base("box"), {Formula::top(P)})});
  auto rep = check_translation_instance(w.st, c, supp, phi);
  CHECK(rep.holds());
  CHECK(rep.checked > 0);
}

TEST_CASE("homomorphism invariance over a quotient", "[semantics]") {
  testsupport::Stock w;
  // Two-cycle folded onto a self-loop: h is a homomorphism.
  KripkeFrame k2;
  k2.states = {"a", "b"};
  k2.succ = {{1}, {0}};
  KripkeFrame k1;
  k1.states = {"x"};
  k1.succ = {{0}};
  Coalgebra c2 = kripke_coalgebra(k2);
  Coalgebra c1 = kripke_coalgebra(k1);
  std::vector<std::size_t> h = {0, 0};

  auto box = ModalityExpr::base("box");
  auto f = Formula::apply(box, {Formula::apply(box, {Formula::bottom(P)})});
  HomReport rep = check_homomorphism_invariance(w.st, c2, c1, h, *f);
  CHECK(rep.is_homomorphism);
  CHECK(rep.invariant);

  // Breaking the frame breaks the precondition, not the invariance claim.
  // A deadlock cannot map onto a live state: P(h) sends {} to {}, never {0}.
  KripkeFrame broken = k2;
  broken.succ = {{1}, {}};
  Coalgebra cb = kripke_coalgebra(broken);
  HomReport bad = check_homomorphism_invariance(w.st, cb, c1, h, *f);
  CHECK_FALSE(bad.is_homomorphism);
  CHECK_FALSE(bad.detail.empty());
}
