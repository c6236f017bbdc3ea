#include <catch2/catch_amalgamated.hpp>

#include "fibcoalg/syntax.hpp"
#include "support/stock.hpp"

using namespace fibcoalg;

namespace {
const FibObject P = FibObject::gen("P");
const FibObject D = FibObject::gen("D");
const FibObject R = FibObject::gen("R");
Param lbl(const char* s) { return Param{std::string(s)}; }
}  // namespace

TEST_CASE("modality typing follows the formation rules", "[syntax]") {
  testsupport::Stock w;
  auto box = ModalityExpr::base("box");
  auto deq_half = ModalityExpr::base("deq", {Param{0.5}});
  auto detcert_u = ModalityExpr::base("detcert", {lbl("u")});

  SECTION("base symbols carry their family typing") {
    CHECK(type_of_modality(*box, w.sig) == ModalityType{P, 1});
    CHECK(type_of_modality(*deq_half, w.sig) == ModalityType{D, 1});
    CHECK(type_of_modality(*detcert_u, w.sig) == ModalityType{R, 1});
  }
  SECTION("negation and conjunction preserve the type") {
    CHECK(type_of_modality(*ModalityExpr::neg(box), w.sig) == ModalityType{P, 1});
    CHECK(type_of_modality(*ModalityExpr::conj({box, ModalityExpr::neg(box)}), w.sig) ==
          ModalityType{P, 1});
  }
  SECTION("conjunction of mismatched types is rejected") {
    CHECK_THROWS_AS(type_of_modality(*ModalityExpr::conj({box, deq_half}), w.sig), TypeError);
  }
  SECTION("superscript moves the home along the morphism") {
    auto m = ModalityExpr::sup(box, Morphism::gen("supp"));
    CHECK(type_of_modality(*m, w.sig) == ModalityType{D, 1});
  }
  SECTION("superscript target must match the operand home") {
    auto m = ModalityExpr::sup(box, Morphism::gen("dirac"));
    CHECK_THROWS_AS(type_of_modality(*m, w.sig), TypeError);
  }
  SECTION("sequencing tensors the homes") {
    CHECK(type_of_modality(*ModalityExpr::then(detcert_u, box), w.sig) ==
          ModalityType{P.tensor(R), 1});
    CHECK(type_of_modality(*ModalityExpr::then(detcert_u, deq_half), w.sig) ==
          ModalityType{D.tensor(R), 1});
    CHECK(type_of_modality(*ModalityExpr::then(box, box), w.sig) ==
          ModalityType{P.tensor(P), 1});
  }
  SECTION("sequencing requires a unary second stage") {
    auto wide = ModalityExpr::weaken(box, 2, 0);
    CHECK_THROWS_AS(type_of_modality(*ModalityExpr::then(box, wide), w.sig), TypeError);
  }
  SECTION("weakening pads the arity at a chosen slot") {
    CHECK(type_of_modality(*ModalityExpr::weaken(box, 3, 1), w.sig) == ModalityType{P, 3});
  }
  SECTION("weakening requires a unary operand and a slot in range") {
    auto wide = ModalityExpr::weaken(box, 2, 0);
    CHECK_THROWS_AS(type_of_modality(*ModalityExpr::weaken(wide, 3, 0), w.sig), TypeError);
    CHECK_THROWS_AS(type_of_modality(*ModalityExpr::weaken(box, 2, 2), w.sig), TypeError);
  }
}

TEST_CASE("formula typing", "[syntax]") {
  testsupport::Stock w;
  auto box = ModalityExpr::base("box");

  SECTION("top lives at its annotation") {
    CHECK(type_of_formula(*Formula::top(P), w.sig) == P);
    CHECK(type_of_formula(*Formula::neg(Formula::top(D)), w.sig) == D);
  }
  SECTION("conjunction needs one shared fibre") {
    CHECK_THROWS_AS(
        type_of_formula(*Formula::conj({Formula::top(P), Formula::top(D)}), w.sig),
        TypeError);
  }
  SECTION("application takes arity-many arguments at the home object") {
    auto f = Formula::apply(box, {Formula::top(P)});
    CHECK(type_of_formula(*f, w.sig) == P);
    CHECK_THROWS_AS(type_of_formula(*Formula::apply(box, {}), w.sig), TypeError);
    CHECK_THROWS_AS(type_of_formula(*Formula::apply(box, {Formula::top(D)}), w.sig),
                    TypeError);
  }
  SECTION("adaptation pulls a target formula back to the source") {
    auto f = Formula::adapt(Morphism::gen("supp"), Formula::top(P));
    CHECK(type_of_formula(*f, w.sig) == D);
    CHECK_THROWS_AS(
        type_of_formula(*Formula::adapt(Morphism::gen("supp"), Formula::top(D)), w.sig),
        TypeError);
  }
}

TEST_CASE("implication and disjunction are negation sugar", "[syntax]") {
  auto a = Formula::top(P);
  auto b = Formula::neg(Formula::top(P));
  CHECK(formula_equal(*Formula::implies(a, b),
                      *Formula::neg(Formula::conj({a, Formula::neg(b)}))));
  CHECK(formula_equal(*Formula::disj({a, b}),
                      *Formula::neg(Formula::conj({Formula::neg(a), Formula::neg(b)}))));
  CHECK(formula_equal(*Formula::bottom(P), *Formula::neg(Formula::top(P))));
}

TEST_CASE("translation eliminates adaptations", "[syntax]") {
  testsupport::Stock w;
  auto box = ModalityExpr::base("box");
  auto supp = Morphism::gen("supp");  // D -> P

  SECTION("top translates to top at the source") {
    auto out = translate(supp, Formula::top(P), w.sig);
    CHECK(formula_equal(*out, *Formula::top(D)));
  }
  SECTION("application gains a superscript and recurses") {
    auto phi = Formula::apply(box, {Formula::top(P)});
    auto out = translate(supp, phi, w.sig);
    auto expect = Formula::apply(ModalityExpr::sup(box, supp), {Formula::top(D)});
    CHECK(formula_equal(*out, *expect));
    CHECK(type_of_formula(*out, w.sig) == D);
  }
  SECTION("boolean structure is preserved") {
    auto phi = Formula::neg(Formula::conj({Formula::top(P), Formula::top(P)}));
    auto out = translate(supp, phi, w.sig);
    CHECK(formula_equal(*out,
                        *Formula::neg(Formula::conj({Formula::top(D), Formula::top(D)}))));
  }
  SECTION("inner adaptations compose onto the path") {
    // g : P -> P*D appends a point distribution on the right.
    auto g = Morphism::whisker(P, Morphism::gen("dirac"), FibObject::unit());
    auto phi = Formula::adapt(g, Formula::top(P.tensor(D)));
    auto out = translate(supp, phi, w.sig);
    CHECK(formula_equal(*out, *Formula::top(D)));
    CHECK_FALSE(has_adapt(*out));
  }
  SECTION("translated formulas never contain adaptations") {
    auto g = Morphism::whisker(P, Morphism::gen("dirac"), FibObject::unit());
    auto phi = Formula::conj(
        {Formula::apply(box, {Formula::adapt(g, Formula::top(P.tensor(D)))}),
         Formula::neg(Formula::top(P))});
    CHECK(has_adapt(*phi));
    auto out = translate(supp, phi, w.sig);
    CHECK_FALSE(has_adapt(*out));
    CHECK(type_of_formula(*out, w.sig) == D);
  }
}

TEST_CASE("modal depth counts application nesting", "[syntax]") {
  auto box = ModalityExpr::base("box");
  auto t = Formula::top(P);
  CHECK(modal_depth(*t) == 0);
  auto one = Formula::apply(box, {t});
  auto two = Formula::apply(box, {one});
  CHECK(modal_depth(*two) == 2);
  CHECK(modal_depth(*Formula::conj({one, two})) == 2);
  CHECK(modal_depth(*Formula::neg(two)) == 2);
}

TEST_CASE("rendering is grammar-shaped", "[syntax]") {
  auto box = ModalityExpr::base("box");
  CHECK(to_string(*Formula::top(P)) == "T@P");
  CHECK(to_string(*Formula::neg(Formula::top(P))) == "!T@P");
  CHECK(to_string(*Formula::apply(box, {Formula::top(P)})) == "box(T@P)");
  CHECK(to_string(*ModalityExpr::then(ModalityExpr::base("detcert", {lbl("u")}),
                                      ModalityExpr::base("deq", {Param{0.5}}))) ==
        "detcert[u] . deq[0.5]");
  auto lifted = ModalityExpr::sup(box, Morphism::gen("supp"));
  std::string s = to_string(*Formula::apply(lifted, {Formula::top(D)}));
  CHECK(s.find("box ^ supp") != std::string::npos);
  CHECK(s.front() == '<');
}
