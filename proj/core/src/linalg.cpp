#include "fibcoalg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fibcoalg {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (n != rhs.n) throw ModelError("matrix product dimension mismatch");
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      cplx aik = at(i, k);
      if (aik == cplx(0, 0)) continue;
      for (std::size_t j = 0; j < n; ++j) out.at(i, j) += aik * rhs.at(k, j);
    }
  return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
  if (n != rhs.n) throw ModelError("matrix sum dimension mismatch");
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = a[i] + rhs.a[i];
  return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
  if (n != rhs.n) throw ModelError("matrix difference dimension mismatch");
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = a[i] - rhs.a[i];
  return out;
}

ComplexMatrix ComplexMatrix::scaled(cplx s) const {
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = a[i] * s;
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = std::conj(at(j, i));
  return out;
}

bool ComplexMatrix::is_hermitian(double eps) const {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (std::abs(at(i, j) - std::conj(at(j, i))) > eps) return false;
  return true;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& rhs) const {
  if (n != rhs.n) throw ModelError("matrix comparison dimension mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - rhs.a[i]));
  return m;
}

double ComplexMatrix::max_abs() const {
  double m = 0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.n * b.n);
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; j < a.n; ++j) {
      cplx aij = a.at(i, j);
      if (aij == cplx(0, 0)) continue;
      for (std::size_t k = 0; k < b.n; ++k)
        for (std::size_t l = 0; l < b.n; ++l)
          out.at(i * b.n + k, j * b.n + l) = aij * b.at(k, l);
    }
  return out;
}

double PureState::norm() const {
  double s = 0;
  for (const auto& c : amp) s += std::norm(c);
  return std::sqrt(s);
}

void PureState::normalize() {
  double n = norm();
  if (n == 0) throw ModelError("cannot normalize the zero vector");
  for (auto& c : amp) c /= n;
}

cplx inner_product(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw ModelError("state inner product dimension mismatch");
  cplx s(0, 0);
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
  return s;
}

PureState kron(const PureState& a, const PureState& b) {
  PureState out;
  out.amp.resize(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) out.amp[i * b.dim() + j] = a.amp[i] * b.amp[j];
  return out;
}

PureState apply(const ComplexMatrix& m, const PureState& v) {
  if (m.n != v.dim()) throw ModelError("operator application dimension mismatch");
  PureState out;
  out.amp.assign(m.n, cplx(0, 0));
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) out.amp[i] += m.at(i, j) * v.amp[j];
  return out;
}

double overlap(const PureState& a, const PureState& b) {
  return std::abs(inner_product(a, b));
}

namespace {

double offdiag_norm(const ComplexMatrix& m) {
  double s = 0;
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (i != j) s += std::norm(m.at(i, j));
  return std::sqrt(s);
}

}  // namespace

std::vector<EigenPair> hermitian_eigendecomposition(const ComplexMatrix& m,
                                                    double offdiag_threshold,
                                                    std::size_t max_sweeps) {
  if (m.n == 0) return {};
  if (!m.is_hermitian(1e-10 * std::max(1.0, m.max_abs())))
    throw ModelError("eigendecomposition requires a Hermitian matrix");
  const std::size_t n = m.n;
  ComplexMatrix a = m;
  ComplexMatrix v = ComplexMatrix::identity(n);
  // Threshold scales with the matrix so convergence is attainable in
  // double precision for any input magnitude.
  const double threshold = offdiag_threshold * std::max(1.0, m.max_abs());
  const std::size_t rotations_per_sweep = std::max<std::size_t>(1, n * (n - 1) / 2);
  std::size_t rotations = 0;

  while (offdiag_norm(a) > threshold) {
    if (rotations >= max_sweeps * rotations_per_sweep)
      throw ModelError("eigendecomposition did not converge");
    // Largest off-diagonal pair.
    std::size_t p = 0, q = 1;
    double best = -1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a.at(i, j)) > best) { best = std::abs(a.at(i, j)); p = i; q = j; }
    if (best <= 0) break;

    const cplx apq = a.at(p, q);
    const double mag = std::abs(apq);
    const cplx phase = apq / mag;  // e^{i phi}
    const double alpha = a.at(p, p).real();
    const double delta = a.at(q, q).real();
    const double theta = (delta - alpha) / (2 * mag);
    const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
    const double c = 1.0 / std::sqrt(t * t + 1);
    const double s = t * c;

    // A <- J* A J with J acting on columns p,q:
    //   col_p' = c col_p - s e^{-i phi} col_q
    //   col_q' = s e^{i phi} col_p + c col_q
    for (std::size_t i = 0; i < n; ++i) {
      if (i == p || i == q) continue;
      const cplx aip = a.at(i, p), aiq = a.at(i, q);
      a.at(i, p) = c * aip - s * std::conj(phase) * aiq;
      a.at(i, q) = s * phase * aip + c * aiq;
      a.at(p, i) = std::conj(a.at(i, p));
      a.at(q, i) = std::conj(a.at(i, q));
    }
    const double new_pp = alpha * c * c - 2 * s * c * mag + delta * s * s;
    const double new_qq = alpha * s * s + 2 * s * c * mag + delta * c * c;
    a.at(p, p) = new_pp;
    a.at(q, q) = new_qq;
    a.at(p, q) = 0;
    a.at(q, p) = 0;

    for (std::size_t i = 0; i < n; ++i) {
      const cplx vip = v.at(i, p), viq = v.at(i, q);
      v.at(i, p) = c * vip - s * std::conj(phase) * viq;
      v.at(i, q) = s * phase * vip + c * viq;
    }
    ++rotations;
  }

  std::vector<EigenPair> pairs(n);
  for (std::size_t j = 0; j < n; ++j) {
    pairs[j].value = a.at(j, j).real();
    pairs[j].vector.amp.resize(n);
    for (std::size_t i = 0; i < n; ++i) pairs[j].vector.amp[i] = v.at(i, j);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const EigenPair& x, const EigenPair& y) { return x.value < y.value; });
  return pairs;
}

std::vector<SpectralOutcome> spectral_decomposition(const ComplexMatrix& m,
                                                    const Tolerances& tol) {
  auto pairs = hermitian_eigendecomposition(m, tol.offdiag);
  std::vector<SpectralOutcome> out;
  std::size_t i = 0;
  while (i < pairs.size()) {
    std::size_t j = i + 1;
    while (j < pairs.size() &&
           std::abs(pairs[j].value - pairs[j - 1].value) <=
               tol.spectral * std::max(1.0, std::abs(pairs[j].value)))
      ++j;
    SpectralOutcome o;
    double sum = 0;
    o.projector = ComplexMatrix(m.n);
    for (std::size_t k = i; k < j; ++k) {
      sum += pairs[k].value;
      for (std::size_t r = 0; r < m.n; ++r)
        for (std::size_t c = 0; c < m.n; ++c)
          o.projector.at(r, c) += pairs[k].vector.amp[r] * std::conj(pairs[k].vector.amp[c]);
    }
    o.value = sum / double(j - i);
    out.push_back(std::move(o));
    i = j;
  }
  return out;
}

ComplexMatrix embed_operator(const ComplexMatrix& op, const std::vector<int>& positions,
                             int total_qubits) {
  const int k = total_qubits;
  const int mq = int(positions.size());
  if (k < 1 || k > 16) throw ModelError("unsupported qubit count");
  if (op.n != (std::size_t(1) << mq))
    throw ModelError("embedded operator dimension does not match position count");
  std::vector<bool> seen(std::size_t(k) + 1, false);
  for (int p : positions) {
    if (p < 1 || p > k) throw ModelError("qubit position out of range");
    if (seen[std::size_t(p)]) throw ModelError("duplicate qubit position");
    seen[std::size_t(p)] = true;
  }
  const std::size_t dim = std::size_t(1) << k;
  auto sub_index = [&](std::size_t b) {
    std::size_t s = 0;
    for (int j = 0; j < mq; ++j) {
      std::size_t bit = (b >> (k - positions[std::size_t(j)])) & 1u;
      s |= bit << (mq - 1 - j);
    }
    return s;
  };
  auto rest_mask = [&](std::size_t b) {
    std::size_t r = b;
    for (int j = 0; j < mq; ++j) r &= ~(std::size_t(1) << (k - positions[std::size_t(j)]));
    return r;
  };
  ComplexMatrix out(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if (rest_mask(r) == rest_mask(c)) out.at(r, c) = op.at(sub_index(r), sub_index(c));
  return out;
}

namespace {

ComplexMatrix make2(cplx a, cplx b, cplx c, cplx d) {
  ComplexMatrix m(2);
  m.at(0, 0) = a; m.at(0, 1) = b; m.at(1, 0) = c; m.at(1, 1) = d;
  return m;
}

}  // namespace

const ComplexMatrix& gate_I() {
  static const ComplexMatrix m = ComplexMatrix::identity(2);
  return m;
}
const ComplexMatrix& gate_X() {
  static const ComplexMatrix m = make2(0, 1, 1, 0);
  return m;
}
const ComplexMatrix& gate_Y() {
  static const ComplexMatrix m = make2(0, cplx(0, -1), cplx(0, 1), 0);
  return m;
}
const ComplexMatrix& gate_Z() {
  static const ComplexMatrix m = make2(1, 0, 0, -1);
  return m;
}
const ComplexMatrix& gate_H() {
  static const ComplexMatrix m = make2(1, 1, 1, -1).scaled(1.0 / std::sqrt(2.0));
  return m;
}
const ComplexMatrix& gate_CNOT() {
  static const ComplexMatrix m = [] {
    ComplexMatrix c(4);
    c.at(0, 0) = 1; c.at(1, 1) = 1; c.at(2, 3) = 1; c.at(3, 2) = 1;
    return c;
  }();
  return m;
}
const ComplexMatrix& gate_SWAP() {
  static const ComplexMatrix m = [] {
    ComplexMatrix c(4);
    c.at(0, 0) = 1; c.at(1, 2) = 1; c.at(2, 1) = 1; c.at(3, 3) = 1;
    return c;
  }();
  return m;
}

PureState bell_state(int index) {
  const double r = 1.0 / std::sqrt(2.0);
  PureState s;
  s.amp.assign(4, cplx(0, 0));
  switch (index) {
    case 1: s.amp[0] = r; s.amp[3] = r; break;
    case 2: s.amp[0] = r; s.amp[3] = -r; break;
    case 3: s.amp[1] = r; s.amp[2] = r; break;
    case 4: s.amp[1] = r; s.amp[2] = -r; break;
    default: throw ModelError("Bell index must be 1..4");
  }
  return s;
}

ComplexMatrix bell_projector(int index) {
  PureState b = bell_state(index);
  ComplexMatrix p(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) p.at(i, j) = b.amp[i] * std::conj(b.amp[j]);
  return p;
}

ComplexMatrix bell_observable() {
  ComplexMatrix m(4);
  for (int i = 1; i <= 4; ++i) m = m + bell_projector(i).scaled(double(i));
  return m;
}

}  // namespace fibcoalg
