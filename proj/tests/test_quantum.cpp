#include <catch2/catch_amalgamated.hpp>

#include "fibcoalg/model_format.hpp"
#include "fibcoalg/props.hpp"

using namespace fibcoalg;

namespace {

const char* kOneQubit =
    "model quantum\n"
    "qubits 1\n"
    "state z0 := ket(0)\n"
    "state z1 := ket(1)\n"
    "state xp := (ket(0) + ket(1)) / sqrt(2)\n"
    "state xm := (ket(0) - ket(1)) / sqrt(2)\n"
    "obs Z := Z\n"
    "obs X := X\n"
    "carrier z0 z1 xp xm\n"
    "initial z0\n";

const char* kAmplitudes =
    "model quantum\n"
    "qubits 1\n"
    "state z0 := ket(0)\n"
    "state z1 := ket(1)\n"
    "state psi := 0.6*ket(0) + 0.8*ket(1)\n"
    "obs Z := Z\n"
    "carrier psi z0 z1\n"
    "initial psi\n";

FormulaPtr parse_q(const LoadedModel& lm, const std::string& text) {
  return parse_formula(text, lm.quantum->sig, lm.defs, lm.quantum->fibre());
}

bool quantum_holds(LoadedModel& lm, const std::string& text, const std::string& state) {
  QuantumModel& qm = *lm.quantum;
  FormulaPtr f = parse_q(lm, text);
  close_carrier(qm, f);
  Coalgebra c = quantum_coalgebra(qm);
  return holds_at(qm.st, *f, c, c.carrier.index_of(state));
}

}  // namespace

TEST_CASE("born rule on one qubit", "[quantum]") {
  LoadedModel lm = load_model(kOneQubit);
  QuantumModel& qm = *lm.quantum;

  SECTION("an eigenstate measures with certainty") {
    auto branches = born(qm, qm.carrier[0], qm.observable("Z"));
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].outcome == Catch::Approx(1.0).margin(1e-10));
    CHECK(branches[0].prob == Catch::Approx(1.0).margin(1e-12));
    CHECK(overlap(branches[0].post, qm.carrier[0]) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("a balanced superposition splits evenly") {
    auto branches = born(qm, qm.carrier[2], qm.observable("Z"));
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].outcome == Catch::Approx(-1.0).margin(1e-10));
    CHECK(branches[0].prob == Catch::Approx(0.5).margin(1e-12));
    CHECK(branches[1].prob == Catch::Approx(0.5).margin(1e-12));
    CHECK(overlap(branches[0].post, qm.carrier[1]) == Catch::Approx(1.0).margin(1e-12));
    CHECK(overlap(branches[1].post, qm.carrier[0]) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("amplitudes square to probabilities") {
    LoadedModel amp = load_model(kAmplitudes);
    auto branches = born(*amp.quantum, amp.quantum->carrier[0], amp.quantum->observable("Z"));
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].prob == Catch::Approx(0.64).margin(1e-12));  // outcome -1, post |1>
    CHECK(branches[1].prob == Catch::Approx(0.36).margin(1e-12));  // outcome +1, post |0>
  }
}

TEST_CASE("teleportation input measures uniformly", "[quantum]") {
  // (0.6|0> + 0.8|1>) (x) Bell1 under the Bell observable on (1, 2).
  PureState phi{{cplx(0.6, 0), cplx(0.8, 0)}};
  PureState psi = kron(phi, bell_state(1));
  LoadedModel lm = load_model(
      "model quantum\n"
      "qubits 3\n"
      "state phi := vec(0.6, 0.8)\n"
      "state init := kron(phi, bell(1))\n"
      "obs A_bell := bellobs\n"
      "carrier init\n");
  QuantumModel& qm = *lm.quantum;
  REQUIRE(overlap(qm.carrier[0], psi) == Catch::Approx(1.0).margin(1e-12));

  auto handle = std::make_shared<const ComplexMatrix>(
      embed_operator(bell_observable(), {1, 2}, 3));
  auto branches = born(qm, qm.carrier[0], handle);
  REQUIRE(branches.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(branches[i].outcome == Catch::Approx(double(i + 1)).margin(1e-8));
    CHECK(branches[i].prob == Catch::Approx(0.25).margin(1e-9));
  }
}

TEST_CASE("coalgebra rows are lazy born tables", "[quantum]") {
  LoadedModel lm = load_model(kOneQubit);
  QuantumModel& qm = *lm.quantum;
  CHECK(qm.fibre().str() == "SA1*D*R");

  Coalgebra c = quantum_coalgebra(qm);
  Value row = c.gamma(2);  // xp
  Value dist = row.lookup(TableKey{qm.observable("Z")});
  Value expect = Value::dist({{Value::pairing(Label{1.0}, Value::base(0)), 0.5},
                              {Value::pairing(Label{-1.0}, Value::base(1)), 0.5}});
  CHECK(value_approx_eq(dist, expect, 1e-9));

  SECTION("lazy rows agree with direct measurement on every state and observable") {
    for (std::size_t s = 0; s < qm.carrier.size(); ++s) {
      for (const char* obs : {"Z", "X"}) {
        Value direct = measurement_value(qm, s, qm.observable(obs));
        Value lazy = c.gamma(s).lookup(TableKey{qm.observable(obs)});
        CHECK(value_approx_eq(direct, lazy, 1e-9));
      }
    }
  }
}

TEST_CASE("measurement needs its successors in the carrier", "[quantum]") {
  LoadedModel lm = load_model(
      "model quantum\n"
      "qubits 1\n"
      "state xp := (ket(0) + ket(1)) / sqrt(2)\n"
      "obs Z := Z\n"
      "carrier xp\n");
  QuantumModel& qm = *lm.quantum;
  CHECK_THROWS_AS(measurement_value(qm, 0, qm.observable("Z")), ClosureError);
}

TEST_CASE("carrier closure grows exactly to the formula's needs", "[quantum]") {
  SECTION("a closed carrier stays put") {
    LoadedModel lm = load_model(kOneQubit);
    QuantumModel& qm = *lm.quantum;
    auto f = parse_q(lm, "meas[1/2, 1, Z](T)");
    close_carrier(qm, f);
    CHECK(qm.carrier.size() == 4);
    CHECK(qm.declared == 4);
  }
  SECTION("missing posts are appended") {
    LoadedModel lm = load_model(
        "model quantum\n"
        "qubits 1\n"
        "state z0 := ket(0)\n"
        "obs X := X\n"
        "carrier z0\n");
    QuantumModel& qm = *lm.quantum;
    auto f = parse_q(lm, "meas[1/2, 1, X](T)");
    close_carrier(qm, f);
    CHECK(qm.declared == 1);
    CHECK(qm.carrier.size() == 3);  // z0 plus both Hadamard eigenstates
  }
  SECTION("nesting chases successors level by level") {
    LoadedModel lm = load_model(
        "model quantum\n"
        "qubits 1\n"
        "state z0 := ket(0)\n"
        "obs Z := Z\n"
        "obs X := X\n"
        "carrier z0\n");
    QuantumModel& qm = *lm.quantum;
    auto f = parse_q(lm, "certain[1, X](meas[1/2, 1, Z](T))");
    close_carrier(qm, f);
    // X posts from z0 give both Hadamard states; Z posts from those add |1>.
    CHECK(qm.carrier.size() == 4);
  }
  SECTION("restriction transforms the chased observable") {
    LoadedModel lm = load_model(
        "model quantum\n"
        "qubits 2\n"
        "state b1 := bell(1)\n"
        "obs Z := Z\n"
        "carrier b1\n");
    QuantumModel& qm = *lm.quantum;
    auto f = parse_q(lm, "bits{1}(meas[1/2, 1, Z](T))");
    close_carrier(qm, f);
    CHECK(qm.carrier.size() == 3);  // b1, |00>, |11>
  }
  SECTION("the budget caps closure growth") {
    LoadedModel lm = load_model(
        "model quantum\n"
        "qubits 1\n"
        "state z0 := ket(0)\n"
        "obs X := X\n"
        "carrier z0\n",
        ModelLoadOptions{std::nullopt, std::size_t{2}});
    QuantumModel& qm = *lm.quantum;
    auto f = parse_q(lm, "meas[1/2, 1, X](T)");
    CHECK_THROWS_AS(close_carrier(qm, f), ClosureError);
  }
}

TEST_CASE("projector certainty and outcome masses", "[quantum]") {
  LoadedModel lm = load_model(kOneQubit);
  SECTION("projector certainty recognizes its state") {
    CHECK(quantum_holds(lm, "P[z0]", "z0"));
    CHECK_FALSE(quantum_holds(lm, "P[z0]", "z1"));
    CHECK_FALSE(quantum_holds(lm, "P[z0]", "xp"));
    CHECK(quantum_holds(lm, "P[xp]", "xp"));
  }
  SECTION("outcome mass is exact equality") {
    CHECK(quantum_holds(lm, "meas[1/2, 1, Z](P[z0])", "xp"));
    CHECK_FALSE(quantum_holds(lm, "meas[1/4, 1, Z](P[z0])", "xp"));
    CHECK(quantum_holds(lm, "meas[0, 1, Z](P[z1])", "xp"));
    CHECK(quantum_holds(lm, "meas[1, 1, Z](P[z0])", "z0"));
  }
  SECTION("closed-form masses for unbalanced amplitudes") {
    LoadedModel amp = load_model(kAmplitudes);
    CHECK(quantum_holds(amp, "meas[0.36, 1, Z](T)", "psi"));
    CHECK(quantum_holds(amp, "meas[0.64, -1, Z](T)", "psi"));
    CHECK_FALSE(quantum_holds(amp, "meas[1/2, 1, Z](T)", "psi"));
    CHECK(quantum_holds(amp, "meas[0.36, 1, Z](P[z0])", "psi"));
  }
  SECTION("repeated measurement is certain") {
    CHECK(quantum_holds(lm, "certain[1, Z](P[z0])", "xp"));
    CHECK(quantum_holds(lm, "certain[-1, Z](P[z1])", "xp"));
    CHECK_FALSE(quantum_holds(lm, "certain[-1, Z](P[z0])", "xp"));
  }
  SECTION("certainty of an impossible outcome is vacuous") {
    CHECK(quantum_holds(lm, "certain[-1, Z](F)", "z0"));
    CHECK_FALSE(quantum_holds(lm, "certain[1, Z](F)", "z0"));
  }
}

TEST_CASE("unitary adaptation rotates the queried state", "[quantum]") {
  LoadedModel lm = load_model(
      "model quantum\n"
      "qubits 1\n"
      "state z0 := ket(0)\n"
      "state z1 := ket(1)\n"
      "unitary flip := X\n"
      "obs Z := Z\n"
      "carrier z0 z1\n");
  // flip(P[z0]) at s asks P[z0] at X s.
  CHECK(quantum_holds(lm, "flip(P[z0])", "z1"));
  CHECK_FALSE(quantum_holds(lm, "flip(P[z0])", "z0"));
  CHECK(quantum_holds(lm, "flip(P[z1])", "z0"));
}

TEST_CASE("measure cases reduce to outcome certainty when single", "[quantum]") {
  LoadedModel lm = load_model(kOneQubit);
  auto a = parse_q(lm, "<measure[Z, 1]>(P[z0])");
  auto b = parse_q(lm, "certain[1, Z](P[z0])");
  CHECK(formula_equal(*a, *b));
}

TEST_CASE("projector macro expands through the derived vocabulary", "[quantum]") {
  LoadedModel lm = load_model(kOneQubit);
  auto f = parse_q(lm, "P[z0]");
  CHECK(to_string(*f) == "<top . ((detcert[1] . deq[1]) ^ ev[proj_z0])>");
  CHECK(type_of_formula(*f, lm.quantum->sig) == lm.quantum->fibre());
}

TEST_CASE("six Pauli eigenstates are separated by singleton masses", "[quantum]") {
  auto m = six_state_model();
  REQUIRE(m->carrier.size() == 6);
  PropertyReport rep = check_quantum_singleton_separation(*m);
  CHECK(rep.holds());
  CHECK(rep.checked == 15);
}
