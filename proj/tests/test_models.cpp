#include <catch2/catch_amalgamated.hpp>

#include "fibcoalg/model_format.hpp"

using namespace fibcoalg;

TEST_CASE("shipped model files load", "[models]") {
  SECTION("kripke") {
    LoadedModel m = load_model_file(FIBCOALG_MODELS_DIR "/kripke_demo.model");
    CHECK(m.kind == ModelKind::kKripke);
    CHECK(m.kripke.states.size() == 4);
    CHECK(m.state_index("s2").has_value());
  }
  SECTION("lts") {
    LoadedModel m = load_model_file(FIBCOALG_MODELS_DIR "/lts_demo.model");
    CHECK(m.kind == ModelKind::kLts);
    CHECK(m.lts.labels == std::vector<std::string>{"a", "b"});
  }
  SECTION("markov") {
    LoadedModel m = load_model_file(FIBCOALG_MODELS_DIR "/markov_demo.model");
    CHECK(m.kind == ModelKind::kMarkov);
    CHECK(m.markov.states.size() == 3);
  }
  SECTION("quantum") {
    LoadedModel m = load_model_file(FIBCOALG_MODELS_DIR "/qubit1.model");
    REQUIRE(m.kind == ModelKind::kQuantum);
    REQUIRE(m.quantum != nullptr);
    CHECK(m.quantum->qubits == 1);
    CHECK(m.quantum->declared == 6);
    CHECK(m.initial == std::vector<std::string>{"z0"});
  }
  SECTION("teleportation and swapping assets") {
    LoadedModel sw = load_model_file(FIBCOALG_MODELS_DIR "/swap.model");
    CHECK(sw.quantum->qubits == 4);
    CHECK(sw.quantum->unitaries.count("C1") == 1);
    CHECK(sw.quantum->observables.count("A_bell") == 1);
  }
}

TEST_CASE("kripke text form", "[models]") {
  LoadedModel m = load_model(
      "model kripke\n"
      "# comment line\n"
      "states a b c\n"
      "edges a: b c\n"
      "edges b: b\n"
      "initial b\n");
  CHECK(m.kripke.succ[0] == std::vector<std::size_t>{1, 2});
  CHECK(m.kripke.succ[2].empty());
  CHECK(m.initial == std::vector<std::string>{"b"});
  CHECK(m.state_names() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("initial defaults to the first state", "[models]") {
  LoadedModel m = load_model("model kripke\nstates x y\nedges x: y\n");
  CHECK(m.initial == std::vector<std::string>{"x"});
}

TEST_CASE("markov rows must be unit mass", "[models]") {
  CHECK_THROWS_WITH(load_model("model markov\n"
                               "states a b\n"
                               "dist a: a 1/2, b 1/3\n"),
                    Catch::Matchers::ContainsSubstring("sum to"));
  LoadedModel ok = load_model(
      "model markov\n"
      "states a b\n"
      "dist a: a 1/2, b 1/2\n"
      "dist b: b 1\n");
  CHECK(ok.markov.trans[0].size() == 2);
}

TEST_CASE("loader rejects malformed documents", "[models]") {
  CHECK_THROWS_AS(load_model("model starship\n"), ParseError);
  CHECK_THROWS_AS(load_model(""), ParseError);
  CHECK_THROWS_AS(load_model("model kripke\nedges a: b\n"), ParseError);
  CHECK_THROWS_AS(load_model("model kripke\nstates a\nedges a: zz\n"), ParseError);
  CHECK_THROWS_AS(load_model("model lts\nstates a\nlabels l\ntrans a q: a\n"),
                  ParseError);
}

TEST_CASE("quantum declarations validate", "[models]") {
  SECTION("carrier states must be unit norm") {
    CHECK_THROWS_WITH(load_model("model quantum\n"
                                 "qubits 1\n"
                                 "state bad := vec(1, 1)\n"
                                 "obs Z := Z\n"
                                 "carrier bad\n"),
                      Catch::Matchers::ContainsSubstring("not normalized"));
  }
  SECTION("observables must be hermitian") {
    CHECK_THROWS_WITH(load_model("model quantum\n"
                                 "qubits 1\n"
                                 "state z0 := ket(0)\n"
                                 "obs bad := X*Z\n"
                                 "carrier z0\n"),
                      Catch::Matchers::ContainsSubstring("not Hermitian"));
  }
  SECTION("unitaries must be unitary") {
    CHECK_THROWS_WITH(load_model("model quantum\n"
                                 "qubits 1\n"
                                 "state z0 := ket(0)\n"
                                 "unitary bad := X + Z\n"
                                 "carrier z0\n"),
                      Catch::Matchers::ContainsSubstring("not unitary"));
  }
  SECTION("width is capped") {
    CHECK_THROWS_AS(load_model("model quantum\nqubits 6\n"), ParseError);
  }
  SECTION("a carrier line is required") {
    CHECK_THROWS_WITH(load_model("model quantum\n"
                                 "qubits 1\n"
                                 "state z0 := ket(0)\n"),
                      Catch::Matchers::ContainsSubstring("carrier"));
  }
  SECTION("duplicate carrier states up to phase are rejected") {
    CHECK_THROWS_WITH(load_model("model quantum\n"
                                 "qubits 1\n"
                                 "state z0 := ket(0)\n"
                                 "state z0b := -1 * ket(0)\n"
                                 "carrier z0 z0b\n"),
                      Catch::Matchers::ContainsSubstring("duplicates"));
  }
}

TEST_CASE("state and gate expressions evaluate", "[models]") {
  LoadedModel m = load_model(
      "model quantum\n"
      "qubits 2\n"
      "scalar w := 1/sqrt(2)\n"
      "state phi := w*ket(00) + (0.5 + 0.5i)*kron(vec(0, 1), vec(0, 1))\n"
      "state viabell := bell(3)\n"
      "obs ZZ := kron(Z, Z)\n"
      "obs PB := bellproj(1)\n"
      "unitary fix := embed(X, 2)\n"
      "unitary alt := adj(CNOT)\n"
      "carrier phi viabell\n");
  QuantumModel& qm = *m.quantum;
  CHECK(qm.scalars.count("w") == 1);
  CHECK(qm.scalars.at("w") == Catch::Approx(1.0 / std::sqrt(2.0)));
  // phi = (1/sqrt2, 0, 0, 0.5 + 0.5i): unit norm.
  CHECK(std::abs(qm.carrier[0].amp[0] - cplx(1.0 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(qm.carrier[0].amp[3] - cplx(0.5, 0.5)) < 1e-12);
  CHECK(overlap(qm.carrier[1], bell_state(3)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(qm.observables.at("ZZ")->max_abs_diff(kron(gate_Z(), gate_Z())) < 1e-12);
  CHECK(qm.observables.at("PB")->max_abs_diff(bell_projector(1)) < 1e-12);
  CHECK(qm.unitaries.at("fix")->max_abs_diff(kron(gate_I(), gate_X())) < 1e-12);
  CHECK(qm.unitaries.at("alt")->max_abs_diff(gate_CNOT().adjoint()) < 1e-12);
}

TEST_CASE("tolerance and budget lines with overrides", "[models]") {
  const char* text =
      "model quantum\n"
      "qubits 1\n"
      "tolerance 1e-6\n"
      "max-states 42\n"
      "state z0 := ket(0)\n"
      "carrier z0\n";
  LoadedModel m = load_model(text);
  CHECK(m.quantum->tol.eps == Catch::Approx(1e-6));
  CHECK(m.quantum->max_carrier == 42);

  ModelLoadOptions opt;
  opt.epsilon = 1e-3;
  opt.max_carrier = 7;
  LoadedModel o = load_model(text, opt);
  CHECK(o.quantum->tol.eps == Catch::Approx(1e-3));
  CHECK(o.quantum->max_carrier == 7);
}

TEST_CASE("definition lines ride along with the model", "[models]") {
  LoadedModel m = load_model(
      "model kripke\n"
      "states a b\n"
      "edges a: b\n"
      "def dead := box(F)\n"
      "defm bb := box . box\n");
  CHECK(m.defs.formulas.at("dead") == "box(F)");
  CHECK(m.defs.modalities.at("bb") == "box . box");

  LoadedModel q = load_model(
      "model quantum\n"
      "qubits 1\n"
      "state z0 := ket(0)\n"
      "def ground := P[z0]\n"
      "carrier z0\n");
  CHECK(q.defs.formulas.at("ground") == "P[z0]");
  CHECK(q.quantum->defs.formulas.at("ground") == "P[z0]");
}
