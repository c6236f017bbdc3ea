#include <catch2/catch_amalgamated.hpp>

#include "fibcoalg/semantics.hpp"
#include "support/stock.hpp"

using namespace fibcoalg;

namespace {
const FibObject P = FibObject::gen("P");
const FibObject D = FibObject::gen("D");
Value b(std::size_t i) { return Value::base(i); }
}  // namespace

TEST_CASE("sets canonicalize to sorted duplicate-free form", "[values]") {
  Value s1 = Value::set({b(2), b(0), b(2), b(1)});
  Value s2 = Value::set({b(0), b(1), b(2)});
  CHECK(value_eq(s1, s2));
  CHECK(s1.as<Value::Set>("set").elems.size() == 3);
  CHECK(Value::set({}).as<Value::Set>("set").elems.empty());
}

TEST_CASE("distributions merge mass and enforce unit total", "[values]") {
  Value d1 = Value::dist({{b(0), 0.25}, {b(1), 0.5}, {b(0), 0.25}});
  REQUIRE(d1.as<Value::Dist>("dist").mass.size() == 2);
  CHECK(d1.as<Value::Dist>("dist").mass[0].second == Catch::Approx(0.5));
  CHECK_THROWS_AS(Value::dist({{b(0), 0.4}}), ShapeError);
  CHECK_THROWS_AS(Value::dist({{b(0), 1.5}, {b(1), -0.5}}), ShapeError);
  // Slack within eps is accepted and kept.
  CHECK_NOTHROW(Value::dist({{b(0), 1.0 + 5e-10}}));
}

TEST_CASE("value ordering is total and structural", "[values]") {
  Value s0 = Value::set({b(0)});
  Value s01 = Value::set({b(0), b(1)});
  CHECK(value_lt(s0, s01) != value_lt(s01, s0));
  CHECK(compare_values(s0, s0) == 0);
  Value pu = Value::pairing(Label{std::string("u")}, b(0));
  Value pv = Value::pairing(Label{std::string("v")}, b(0));
  CHECK(compare_values(pu, pv) != 0);
  CHECK_FALSE(value_eq(b(0), s0));
}

TEST_CASE("approximate equality allows eps slack on masses", "[values]") {
  Value d1 = Value::dist({{b(0), 0.5}, {b(1), 0.5}});
  Value d2 = Value::dist({{b(0), 0.5 + 1e-12}, {b(1), 0.5 - 1e-12}});
  CHECK(value_approx_eq(d1, d2, 1e-9));
  Value d3 = Value::dist({{b(0), 0.6}, {b(1), 0.4}});
  CHECK_FALSE(value_approx_eq(d1, d3, 1e-9));
  CHECK(value_approx_eq(b(3), b(3), 0));
}

TEST_CASE("tables answer cached rows and fall back to the lookup", "[values]") {
  int calls = 0;
  Value t = Value::table({{TableKey{std::string("a")}, b(1)}},
                         [&calls](const TableKey&) {
                           ++calls;
                           return b(9);
                         });
  CHECK(value_eq(t.lookup(TableKey{std::string("a")}), b(1)));
  CHECK(calls == 0);
  CHECK(value_eq(t.lookup(TableKey{std::string("zzz")}), b(9)));
  CHECK(calls == 1);

  Value total = Value::table({{TableKey{std::string("a")}, b(1)},
                              {TableKey{std::string("b")}, b(2)}});
  CHECK(value_eq(total.lookup(TableKey{std::string("b")}), b(2)));
  CHECK_THROWS_AS(total.lookup(TableKey{std::string("c")}), ModelError);
  CHECK_THROWS_AS(Value::table({{TableKey{std::string("a")}, b(1)},
                                {TableKey{std::string("a")}, b(2)}}),
                  ShapeError);
}

TEST_CASE("functorial action relabels under every layer", "[values]") {
  testsupport::Stock w;
  std::vector<std::size_t> h = {2, 0, 0};  // 0->2, 1->0, 2->0
  SECTION("sets re-canonicalize after mapping") {
    Value v = Value::set({b(1), b(2)});
    Value out = map_functor(w.st, P, h, v);
    CHECK(value_eq(out, Value::set({b(0)})));
  }
  SECTION("distributions merge collided points") {
    Value v = Value::dist({{b(1), 0.5}, {b(2), 0.5}});
    Value out = map_functor(w.st, D, h, v);
    CHECK(value_eq(out, Value::dist({{b(0), 1.0}})));
  }
  SECTION("nested words map the inside") {
    Value v = Value::set({Value::dist({{b(0), 1.0}}), Value::dist({{b(1), 1.0}})});
    Value out = map_functor(w.st, P.tensor(D), h, v);
    CHECK(value_eq(out, Value::set({Value::dist({{b(2), 1.0}}),
                                    Value::dist({{b(0), 1.0}})})));
  }
  SECTION("pair labels are untouched") {
    Value v = Value::pairing(Label{std::string("u")}, b(1));
    Value out = map_functor(w.st, FibObject::gen("R"), h, v);
    CHECK(value_eq(out, Value::pairing(Label{std::string("u")}, b(0))));
  }
}

TEST_CASE("map_under applies a function below the word", "[values]") {
  testsupport::Stock w;
  Value v = Value::set({b(0), b(1)});
  Value out = map_under(w.st, P, [](const Value& x) { return Value::set({x}); }, v);
  CHECK(value_eq(out, Value::set({Value::set({b(0)}), Value::set({b(1)})})));
}

TEST_CASE("shape checking matches values against words", "[values]") {
  testsupport::Stock w;
  CHECK_NOTHROW(check_value_shape(w.st, P, Value::set({b(0)}), 2));
  CHECK_NOTHROW(check_value_shape(w.st, FibObject::unit(), b(1), 2));
  CHECK_THROWS_AS(check_value_shape(w.st, P, b(0), 2), ShapeError);
  CHECK_THROWS_AS(check_value_shape(w.st, D, Value::set({}), 2), ShapeError);
  // Base references must stay inside the carrier.
  CHECK_THROWS_AS(check_value_shape(w.st, P, Value::set({b(5)}), 2), ShapeError);
  // Exponent tables must cover exactly the declared keys.
  Value partial = Value::table({{TableKey{std::string("a")}, Value::set({b(0)})}});
  CHECK_THROWS_AS(check_value_shape(w.st, FibObject::gen("E").tensor(P), partial, 2),
                  ShapeError);
}
