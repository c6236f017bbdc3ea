#pragma once

#include <complex>
#include <vector>

#include "fibcoalg/common.hpp"

namespace fibcoalg {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major.
struct ComplexMatrix {
  std::size_t n = 0;
  std::vector<cplx> a;

  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n(n), a(n * n, cplx(0, 0)) {}

  cplx& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static ComplexMatrix identity(std::size_t n);

  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix operator+(const ComplexMatrix& rhs) const;
  ComplexMatrix operator-(const ComplexMatrix& rhs) const;
  ComplexMatrix scaled(cplx s) const;
  ComplexMatrix adjoint() const;

  bool is_hermitian(double eps) const;
  // max entrywise |a_ij - b_ij|
  double max_abs_diff(const ComplexMatrix& rhs) const;
  double max_abs() const;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct PureState {
  std::vector<cplx> amp;

  std::size_t dim() const { return amp.size(); }
  double norm() const;
  void normalize();
};

cplx inner_product(const PureState& a, const PureState& b);  // <a|b>
PureState kron(const PureState& a, const PureState& b);
PureState apply(const ComplexMatrix& m, const PureState& v);
// |<a|b>|; 1 means identical up to global phase for unit vectors.
double overlap(const PureState& a, const PureState& b);

struct EigenPair {
  double value;
  PureState vector;
};

// Complex Hermitian eigendecomposition by Jacobi rotations: each step
// annihilates the largest off-diagonal pair; stops when the off-diagonal
// Frobenius norm falls below `offdiag_threshold` or after `max_sweeps`
// sweeps of n(n-1)/2 rotations. Pairs returned sorted by eigenvalue.
std::vector<EigenPair> hermitian_eigendecomposition(const ComplexMatrix& m,
                                                    double offdiag_threshold = 1e-12,
                                                    std::size_t max_sweeps = 100);

struct SpectralOutcome {
  double value;            // representative eigenvalue of the group
  ComplexMatrix projector; // sum of vv* over the grouped eigenvectors
};

// Groups eigenvalues with |r_i - r_j| <= group_tol * max(1, |r_i|) and
// sums rank-one projectors per group.
std::vector<SpectralOutcome> spectral_decomposition(const ComplexMatrix& m,
                                                    const Tolerances& tol = {});

// Operator acting as `op` on the listed qubit positions (1-based,
// qubit 1 = leftmost tensor factor) and as identity elsewhere.
ComplexMatrix embed_operator(const ComplexMatrix& op, const std::vector<int>& positions,
                             int total_qubits);

// Fixed gate set.
const ComplexMatrix& gate_I();
const ComplexMatrix& gate_X();
const ComplexMatrix& gate_Y();
const ComplexMatrix& gate_Z();
const ComplexMatrix& gate_H();
const ComplexMatrix& gate_CNOT();
const ComplexMatrix& gate_SWAP();

// Bell basis: 1 -> (|00>+|11>)/sqrt2, 2 -> (|00>-|11>)/sqrt2,
// 3 -> (|01>+|10>)/sqrt2, 4 -> (|01>-|10>)/sqrt2.
PureState bell_state(int index);
ComplexMatrix bell_projector(int index);
// sum_i i * bell_projector(i): eigenvalues 1..4 name the Bell outcomes.
ComplexMatrix bell_observable();

}  // namespace fibcoalg
