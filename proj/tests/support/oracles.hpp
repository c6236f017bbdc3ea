#pragma once

// Reference computations the tests compare the engine against. Written
// directly from the protocol and logic definitions on top of bare
// std::complex vectors and adjacency lists; shares no code with the
// library so an error in the engine cannot cancel out here.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using cx = std::complex<double>;
using state_vec = std::vector<cx>;

// Qubit 1 is the leftmost tensor factor: the most significant bit of
// the basis index.
inline int bit_at(std::size_t index, int qubit, int total) {
  return int(index >> (total - qubit)) & 1;
}

inline double norm2(const state_vec& v) {
  double s = 0;
  for (const cx& a : v) s += std::norm(a);
  return s;
}

inline cx dot(const state_vec& a, const state_vec& b) {  // <a|b>
  cx s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// |<a|b>|^2 for unit vectors: 1 iff equal up to global phase.
inline double overlap2(const state_vec& a, const state_vec& b) {
  return std::norm(dot(a, b));
}

// Bell amplitudes over two qubits, index 1..4.
inline state_vec bell(int m) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (m) {
    case 1: return {s, 0, 0, s};
    case 2: return {s, 0, 0, -s};
    case 3: return {0, s, s, 0};
    default: return {0, s, -s, 0};
  }
}

using gate2 = std::array<cx, 4>;  // row-major 2x2

inline gate2 g_I() { return {1, 0, 0, 1}; }
inline gate2 g_X() { return {0, 1, 1, 0}; }
inline gate2 g_Z() { return {1, 0, 0, -1}; }
inline gate2 g_XZ() {  // X * Z
  return {0, -1, 1, 0};
}

// Applies a one-qubit gate at the given position of an n-qubit vector.
inline state_vec apply1(const gate2& g, const state_vec& v, int qubit, int total) {
  state_vec out(v.size(), cx(0));
  for (std::size_t i = 0; i < v.size(); ++i) {
    int b = bit_at(i, qubit, total);
    std::size_t flip = i ^ (std::size_t(1) << (total - qubit));
    out[i] += g[std::size_t(b) * 2 + std::size_t(b)] * v[i];
    out[i] += g[std::size_t(b) * 2 + std::size_t(1 - b)] * v[flip];
  }
  return out;
}

struct BellBranch {
  double prob;     // <v| P_m |v>
  state_vec post;  // normalized projection; zero vector when prob == 0
};

// Projects onto |B_m><B_m| at qubit positions (q1, q2), identity elsewhere.
inline BellBranch bell_project(const state_vec& v, int q1, int q2, int total, int m) {
  state_vec bm = bell(m);
  state_vec post(v.size(), cx(0));
  std::size_t rest = v.size() >> 2;
  // Enumerate assignments of the remaining qubits via a compressed index.
  std::vector<int> others;
  for (int q = 1; q <= total; ++q)
    if (q != q1 && q != q2) others.push_back(q);
  for (std::size_t r = 0; r < rest; ++r) {
    auto full_index = [&](int b1, int b2) {
      std::size_t idx = 0;
      idx |= std::size_t(b1) << (total - q1);
      idx |= std::size_t(b2) << (total - q2);
      for (std::size_t k = 0; k < others.size(); ++k) {
        int bit = int(r >> (others.size() - 1 - k)) & 1;
        idx |= std::size_t(bit) << (total - others[k]);
      }
      return idx;
    };
    cx c = 0;
    for (int b1 = 0; b1 < 2; ++b1)
      for (int b2 = 0; b2 < 2; ++b2)
        c += std::conj(bm[std::size_t(b1) * 2 + std::size_t(b2)]) * v[full_index(b1, b2)];
    for (int b1 = 0; b1 < 2; ++b1)
      for (int b2 = 0; b2 < 2; ++b2)
        post[full_index(b1, b2)] += bm[std::size_t(b1) * 2 + std::size_t(b2)] * c;
  }
  double p = norm2(post);
  if (p > 1e-15) {
    double inv = 1.0 / std::sqrt(p);
    for (cx& a : post) a *= inv;
  }
  return {p, post};
}

struct TeleportBranch {
  double prob;     // Bell outcome probability
  double overlap;  // |<B_m (x) phi | corrected post>|^2
};

// Teleportation of phi = a|0> + b|1> through a Bell pair on qubits
// (2, 3), Bell measurement on (1, 2), correction on qubit 3.
inline std::vector<TeleportBranch> teleport(cx a, cx b) {
  state_vec phi = {a, b};
  state_vec b1 = bell(1);
  state_vec psi(8, cx(0));
  for (std::size_t q1 = 0; q1 < 2; ++q1)
    for (std::size_t q23 = 0; q23 < 4; ++q23)
      psi[(q1 << 2) | q23] = phi[q1] * b1[q23];
  const gate2 fix[4] = {g_I(), g_Z(), g_X(), g_XZ()};
  std::vector<TeleportBranch> out;
  for (int m = 1; m <= 4; ++m) {
    BellBranch br = bell_project(psi, 1, 2, 3, m);
    state_vec corrected = apply1(fix[m - 1], br.post, 3, 3);
    state_vec expected(8, cx(0));
    state_vec bm = bell(m);
    for (std::size_t q12 = 0; q12 < 4; ++q12)
      for (std::size_t q3 = 0; q3 < 2; ++q3)
        expected[(q12 << 1) | q3] = bm[q12] * phi[q3];
    out.push_back({br.prob, br.prob > 1e-15 ? overlap2(expected, corrected) : 1.0});
  }
  return out;
}

struct SwapBranch {
  double prob;
  double overlap_corrected;    // against B1 on (1,4) (x) B1 on (2,3)
  double overlap_uncorrected;  // same target, no correction applied
};

// Entanglement swapping: Bell pairs on (1,2) and (3,4), Bell
// measurement on (2,3), correction gate G_m on qubits 1 and 2.
inline std::vector<SwapBranch> entanglement_swap() {
  state_vec b1 = bell(1);
  state_vec psi(16, cx(0));
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t q = 0; q < 4; ++q)
      psi[(p << 2) | q] = b1[p] * b1[q];
  state_vec expected(16, cx(0));
  for (std::size_t i = 0; i < 16; ++i) {
    int i1 = bit_at(i, 1, 4), i2 = bit_at(i, 2, 4);
    int i3 = bit_at(i, 3, 4), i4 = bit_at(i, 4, 4);
    expected[i] = b1[std::size_t(i1) * 2 + std::size_t(i4)] *
                  b1[std::size_t(i2) * 2 + std::size_t(i3)];
  }
  const gate2 fix[4] = {g_I(), g_Z(), g_X(), g_XZ()};
  std::vector<SwapBranch> out;
  for (int m = 1; m <= 4; ++m) {
    BellBranch br = bell_project(psi, 2, 3, 4, m);
    state_vec corrected = apply1(fix[m - 1], br.post, 1, 4);
    corrected = apply1(fix[m - 1], corrected, 2, 4);
    out.push_back({br.prob, overlap2(expected, corrected), overlap2(expected, br.post)});
  }
  return out;
}

// ---------------------------------------------------------------------
// Direct evaluator for box formulas over a labelled transition system.

struct DirectLts {
  int n = 0;
  std::vector<std::map<std::string, std::vector<int>>> succ;  // per state
};

struct BoxForm {
  enum Kind { kTop, kNeg, kConj, kBox } kind = kTop;
  std::string label;           // kBox only
  std::vector<BoxForm> kids;   // kNeg: 1, kConj: >= 1, kBox: 1
};

inline std::vector<bool> eval_box_form(const DirectLts& l, const BoxForm& f) {
  std::vector<bool> out(std::size_t(l.n), true);
  switch (f.kind) {
    case BoxForm::kTop:
      break;
    case BoxForm::kNeg: {
      auto inner = eval_box_form(l, f.kids[0]);
      for (int s = 0; s < l.n; ++s) out[std::size_t(s)] = !inner[std::size_t(s)];
      break;
    }
    case BoxForm::kConj: {
      for (const BoxForm& k : f.kids) {
        auto inner = eval_box_form(l, k);
        for (int s = 0; s < l.n; ++s)
          out[std::size_t(s)] = out[std::size_t(s)] && inner[std::size_t(s)];
      }
      break;
    }
    case BoxForm::kBox: {
      auto inner = eval_box_form(l, f.kids[0]);
      for (int s = 0; s < l.n; ++s) {
        bool all = true;
        auto it = l.succ[std::size_t(s)].find(f.label);
        if (it != l.succ[std::size_t(s)].end())
          for (int t : it->second) all = all && inner[std::size_t(t)];
        out[std::size_t(s)] = all;
      }
      break;
    }
  }
  return out;
}

}  // namespace oracle
