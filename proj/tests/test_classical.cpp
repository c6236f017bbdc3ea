#include <catch2/catch_amalgamated.hpp>

#include "fibcoalg/props.hpp"
#include "support/stock.hpp"

using namespace fibcoalg;

namespace {
const FibObject P = FibObject::gen("P");
Value b(std::size_t i) { return Value::base(i); }
}  // namespace

TEST_CASE("kripke coalgebra carries successor sets", "[classical]") {
  KripkeFrame k;
  k.states = {"s0", "s1"};
  k.succ = {{0, 1}, {}};
  Coalgebra c = kripke_coalgebra(k);
  CHECK(c.fibre == P);
  CHECK(c.carrier.size() == 2);
  CHECK(c.carrier.index_of("s1") == 1);
  CHECK(value_eq(c.gamma(0), Value::set({b(0), b(1)})));
  CHECK(value_eq(c.gamma(1), Value::set({})));
}

TEST_CASE("lts coalgebra is a labelled table of successor sets", "[classical]") {
  Lts l;
  l.states = {"s0", "s1"};
  l.labels = {"a", "b"};
  l.succ = {{{1}, {}}, {{0, 1}, {1}}};
  Coalgebra c = lts_coalgebra(l);
  CHECK(c.fibre == FibObject::gen("E").tensor(P));
  Value row0 = c.gamma(0);
  CHECK(value_eq(row0.lookup(TableKey{std::string("a")}), Value::set({b(1)})));
  CHECK(value_eq(row0.lookup(TableKey{std::string("b")}), Value::set({})));
  Value row1 = c.gamma(1);
  CHECK(value_eq(row1.lookup(TableKey{std::string("a")}), Value::set({b(0), b(1)})));
}

TEST_CASE("markov coalgebra validates unit mass", "[classical]") {
  MarkovChain m;
  m.states = {"s0", "s1"};
  m.trans = {{{0, 0.5}, {1, 0.5}}, {{1, 1.0}}};
  Coalgebra c = markov_coalgebra(m);
  CHECK(c.fibre == FibObject::gen("D"));
  CHECK(value_eq(c.gamma(0), Value::dist({{b(0), 0.5}, {b(1), 0.5}})));

  MarkovChain badm;
  badm.states = {"s0"};
  badm.trans = {{{0, 0.7}}};
  CHECK_THROWS_AS(markov_coalgebra(badm), ShapeError);
}

TEST_CASE("labelled box evaluates one transition relation", "[classical]") {
  ClassicalOptions opt;
  opt.exp_keys = {"a", "b"};
  testsupport::Stock w(opt);
  Lts l;
  l.states = {"s0", "s1", "s2"};
  l.labels = {"a", "b"};
  // a: s0 -> s1, s1 -> s2; b: s0 -> s2
  l.succ = {{{1}, {2}}, {{2}, {}}, {{}, {}}};
  Coalgebra c = lts_coalgebra(l);

  FibObject ep = FibObject::gen("E").tensor(P);
  auto after = [&](const char* label, FormulaPtr arg) {
    return Formula::apply(lts_box_modality(label), {arg});
  };
  // [a][a] false holds where no a-a path leaves: s1 and s2.
  auto f = after("a", after("a", Formula::bottom(ep)));
  CHECK(eval_formula(w.st, *f, c).members() == std::vector<std::size_t>{1, 2});
  // [b] false: no b-successor anywhere but s0.
  auto g = after("b", Formula::bottom(ep));
  CHECK(eval_formula(w.st, *g, c).members() == std::vector<std::size_t>{1, 2});
}

TEST_CASE("lifting member helpers", "[classical]") {
  SECTION("box is inclusion") {
    std::vector<SubsetPred> args = {[](const Value& v) {
      return v.as<ValueBaseRef>("base").state < 2;
    }};
    CHECK(box_member(args, Value::set({b(0), b(1)})));
    CHECK_FALSE(box_member(args, Value::set({b(2)})));
  }
  SECTION("deq matches mass exactly within eps") {
    std::vector<SubsetPred> args = {[](const Value& v) {
      return v.as<ValueBaseRef>("base").state == 0;
    }};
    Value d = Value::dist({{b(0), 0.25}, {b(1), 0.75}});
    CHECK(deq_member(0.25, 1e-9, args, d));
    CHECK_FALSE(deq_member(0.5, 1e-9, args, d));
  }
  SECTION("detcert needs the right label") {
    std::vector<SubsetPred> args = {[](const Value&) { return true; }};
    CHECK(detcert_member(Label{std::string("u")}, 1e-9, args,
                         Value::pairing(Label{std::string("u")}, b(0))));
    CHECK_FALSE(detcert_member(Label{std::string("u")}, 1e-9, args,
                               Value::pairing(Label{std::string("v")}, b(0))));
    CHECK(detcert_member(Label{1.0}, 1e-9, args, Value::pairing(Label{1.0 + 1e-12}, b(0))));
  }
}

TEST_CASE("partition refinement finds the coarsest bisimulation", "[classical]") {
  SECTION("two bisimilar cycles collapse") {
    KripkeFrame k;
    k.states = {"a0", "a1", "b0", "b1"};
    k.succ = {{1}, {0}, {3}, {2}};
    auto block = bisimulation_partition(k);
    CHECK(block[0] == block[1]);
    CHECK(block[0] == block[2]);
    CHECK(block[0] == block[3]);
  }
  SECTION("deadlocks separate from live states") {
    KripkeFrame k;
    k.states = {"live", "dead", "dead2"};
    k.succ = {{1}, {}, {}};
    auto block = bisimulation_partition(k);
    CHECK(block[1] == block[2]);
    CHECK(block[0] != block[1]);
  }
  SECTION("depth distinctions survive refinement") {
    // x0 -> x1 -> dead, y0 -> dead: x0 and y0 differ at depth two.
    KripkeFrame k;
    k.states = {"x0", "x1", "y0", "dead"};
    k.succ = {{1}, {3}, {3}, {}};
    auto block = bisimulation_partition(k);
    CHECK(block[1] == block[2]);
    CHECK(block[0] != block[2]);
    CHECK(block[3] != block[0]);
  }
}

TEST_CASE("quotient frame evaluates like the original", "[classical]") {
  testsupport::Stock w;
  KripkeFrame k;
  k.states = {"a0", "a1", "b0", "b1", "dead"};
  k.succ = {{1}, {0}, {3}, {2}, {}};
  auto block = bisimulation_partition(k);
  KripkeFrame q = quotient_frame(k, block);
  CHECK(q.states.size() < k.states.size());

  Coalgebra ck = kripke_coalgebra(k);
  Coalgebra cq = kripke_coalgebra(q);
  auto box = ModalityExpr::base("box");
  auto f = Formula::apply(box, {Formula::apply(box, {Formula::bottom(P)})});
  HomReport rep = check_homomorphism_invariance(w.st, ck, cq, block, *f);
  CHECK(rep.is_homomorphism);
  CHECK(rep.invariant);
}
