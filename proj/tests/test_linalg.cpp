#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fibcoalg/linalg.hpp"

using namespace fibcoalg;

namespace {
bool unitary(const ComplexMatrix& m) {
  ComplexMatrix prod = m.adjoint() * m;
  return prod.max_abs_diff(ComplexMatrix::identity(m.n)) < 1e-12;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.at(i, i) = cplx(u(rng), 0);
    for (std::size_t j = i + 1; j < n; ++j) {
      cplx v(u(rng), u(rng));
      m.at(i, j) = v;
      m.at(j, i) = std::conj(v);
    }
  }
  return m;
}
}  // namespace

TEST_CASE("fixed gates have the expected algebra", "[linalg]") {
  CHECK(unitary(gate_X()));
  CHECK(unitary(gate_Y()));
  CHECK(unitary(gate_Z()));
  CHECK(unitary(gate_H()));
  CHECK(unitary(gate_CNOT()));
  CHECK(unitary(gate_SWAP()));
  CHECK((gate_X() * gate_X()).max_abs_diff(ComplexMatrix::identity(2)) < 1e-15);
  // X Z = -Z X
  CHECK((gate_X() * gate_Z() + gate_Z() * gate_X()).max_abs() < 1e-15);
  CHECK(gate_Z().is_hermitian(1e-15));
  CHECK_FALSE((gate_X() * gate_Z()).is_hermitian(1e-10));
}

TEST_CASE("kron composes dimensions and entries", "[linalg]") {
  ComplexMatrix zx = kron(gate_Z(), gate_X());
  CHECK(zx.n == 4);
  CHECK(zx.at(0, 1) == cplx(1, 0));
  CHECK(zx.at(2, 3) == cplx(-1, 0));
  PureState k0{{1, 0}}, k1{{0, 1}};
  PureState k01 = kron(k0, k1);
  REQUIRE(k01.dim() == 4);
  CHECK(std::abs(k01.amp[1] - cplx(1, 0)) < 1e-15);
}

TEST_CASE("jacobi eigendecomposition on small gates", "[linalg]") {
  SECTION("Z is already diagonal") {
    auto eig = hermitian_eigendecomposition(gate_Z());
    REQUIRE(eig.size() == 2);
    CHECK(eig[0].value == Catch::Approx(-1.0).margin(1e-12));
    CHECK(eig[1].value == Catch::Approx(1.0).margin(1e-12));
    // Eigenvector of +1 is |0> up to phase.
    CHECK(std::abs(eig[1].vector.amp[0]) == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("X diagonalizes to the Hadamard basis") {
    auto eig = hermitian_eigendecomposition(gate_X());
    REQUIRE(eig.size() == 2);
    CHECK(eig[0].value == Catch::Approx(-1.0).margin(1e-12));
    CHECK(eig[1].value == Catch::Approx(1.0).margin(1e-12));
    PureState plus{{cplx(1 / std::sqrt(2.0), 0), cplx(1 / std::sqrt(2.0), 0)}};
    CHECK(overlap(eig[1].vector, plus) == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("eigenvectors reconstruct the matrix") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
      ComplexMatrix m = random_hermitian(rng, n);
      auto eig = hermitian_eigendecomposition(m);
      REQUIRE(eig.size() == n);
      ComplexMatrix rebuilt(n);
      for (const auto& e : eig)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            rebuilt.at(i, j) += e.value * e.vector.amp[i] * std::conj(e.vector.amp[j]);
      CHECK(rebuilt.max_abs_diff(m) < 1e-8);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          double expect = a == b ? 1.0 : 0.0;
          CHECK(std::abs(inner_product(eig[a].vector, eig[b].vector)) ==
                Catch::Approx(expect).margin(1e-9));
        }
    }
  }
}

TEST_CASE("spectral decomposition groups degenerate eigenvalues", "[linalg]") {
  SECTION("projectors of Z") {
    auto spec = spectral_decomposition(gate_Z());
    REQUIRE(spec.size() == 2);
    CHECK(spec[0].value == Catch::Approx(-1.0).margin(1e-10));
    CHECK(spec[1].value == Catch::Approx(1.0).margin(1e-10));
    ComplexMatrix sum = spec[0].projector + spec[1].projector;
    CHECK(sum.max_abs_diff(ComplexMatrix::identity(2)) < 1e-10);
  }
  SECTION("embedded Bell observable has four rank-4 projectors") {
    // bellobs on qubits (1,2) of a 4-qubit space: eigenvalues 1..4,
    // each with multiplicity 4.
    ComplexMatrix m = embed_operator(bell_observable(), {1, 2}, 4);
    auto spec = spectral_decomposition(m);
    REQUIRE(spec.size() == 4);
    ComplexMatrix sum(16);
    ComplexMatrix rebuilt(16);
    for (std::size_t g = 0; g < 4; ++g) {
      CHECK(spec[g].value == Catch::Approx(double(g + 1)).margin(1e-8));
      // Rank = trace for a projector.
      cplx tr = 0;
      for (std::size_t i = 0; i < 16; ++i) tr += spec[g].projector.at(i, i);
      CHECK(tr.real() == Catch::Approx(4.0).margin(1e-8));
      // Idempotent and mutually orthogonal.
      CHECK((spec[g].projector * spec[g].projector).max_abs_diff(spec[g].projector) < 1e-8);
      for (std::size_t h = 0; h < g; ++h)
        CHECK((spec[g].projector * spec[h].projector).max_abs() < 1e-8);
      sum = sum + spec[g].projector;
      rebuilt = rebuilt + spec[g].projector.scaled(spec[g].value);
    }
    CHECK(sum.max_abs_diff(ComplexMatrix::identity(16)) < 1e-8);
    CHECK(rebuilt.max_abs_diff(m) < 1e-8);
  }
}

TEST_CASE("operator embedding places factors by position", "[linalg]") {
  SECTION("single qubit positions") {
    CHECK(embed_operator(gate_X(), {1}, 2).max_abs_diff(kron(gate_X(), gate_I())) < 1e-15);
    CHECK(embed_operator(gate_X(), {2}, 2).max_abs_diff(kron(gate_I(), gate_X())) < 1e-15);
  }
  SECTION("adjacent block") {
    CHECK(embed_operator(gate_CNOT(), {2, 3}, 3)
              .max_abs_diff(kron(gate_I(), gate_CNOT())) < 1e-15);
  }
  SECTION("non-adjacent positions act through the permutation") {
    // CNOT with control qubit 1 and target qubit 3: check the action on
    // basis kets directly.
    ComplexMatrix m = embed_operator(gate_CNOT(), {1, 3}, 3);
    for (std::size_t idx = 0; idx < 8; ++idx) {
      PureState in;
      in.amp.assign(8, cplx(0, 0));
      in.amp[idx] = 1;
      PureState out = apply(m, in);
      std::size_t c = (idx >> 2) & 1;
      std::size_t expect = c ? idx ^ 1u : idx;  // flip qubit 3 when qubit 1 is set
      CHECK(std::abs(out.amp[expect] - cplx(1, 0)) < 1e-12);
    }
  }
  SECTION("reversed positions transpose the factor roles") {
    // X on position 2 via a two-qubit op with reversed slots.
    ComplexMatrix xi = kron(gate_X(), gate_I());
    ComplexMatrix m = embed_operator(xi, {2, 1}, 2);
    CHECK(m.max_abs_diff(kron(gate_I(), gate_X())) < 1e-12);
  }
}

TEST_CASE("bell basis is orthonormal and complete", "[linalg]") {
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs(inner_product(bell_state(i), bell_state(j))) ==
            Catch::Approx(expect).margin(1e-12));
    }
  }
  ComplexMatrix sum(4);
  for (int i = 1; i <= 4; ++i) sum = sum + bell_projector(i);
  CHECK(sum.max_abs_diff(ComplexMatrix::identity(4)) < 1e-12);

  // The observable's spectrum names the outcomes 1..4.
  auto spec = spectral_decomposition(bell_observable());
  REQUIRE(spec.size() == 4);
  for (std::size_t g = 0; g < 4; ++g) {
    CHECK(spec[g].value == Catch::Approx(double(g + 1)).margin(1e-8));
    CHECK(spec[g].projector.max_abs_diff(bell_projector(int(g + 1))) < 1e-8);
  }
}

TEST_CASE("pure state helpers", "[linalg]") {
  PureState v{{cplx(3, 0), cplx(0, 4)}};
  CHECK(v.norm() == Catch::Approx(5.0));
  v.normalize();
  CHECK(v.norm() == Catch::Approx(1.0));
  PureState w{{cplx(0, 3), cplx(4, 0)}};
  w.normalize();
  // <v|w> = 9i/25 - 16i/25; the overlap takes the magnitude.
  CHECK(overlap(v, w) == Catch::Approx(7.0 / 25.0));
}
