#include "fibcoalg/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fibcoalg/syntax.hpp"

namespace fibcoalg {

namespace {

std::string sa_name(std::size_t j) { return "SA" + std::to_string(j); }

FibObject q_word(std::size_t j) { return FibObject{{sa_name(j), "D", "R"}}; }

std::size_t log2_dim(std::size_t n, const std::string& what) {
  std::size_t q = 0, d = 1;
  while (d < n) {
    d <<= 1;
    ++q;
  }
  if (d != n || n < 2)
    throw ModelError(what + " has dimension " + std::to_string(n) +
                     ", not a power of two at least 2");
  return q;
}

const std::string& require_name(const std::vector<Param>& params, std::size_t i,
                                const char* what) {
  if (i >= params.size()) throw TypeError(what, "a name parameter", "nothing");
  const auto* s = std::get_if<std::string>(&params[i]);
  if (!s) throw TypeError(what, "a name parameter", param_to_string(params[i]));
  return *s;
}

std::vector<int> require_positions(const std::vector<Param>& params,
                                   std::size_t qubits) {
  if (params.empty()) throw TypeError("bits", "qubit positions", "nothing");
  std::vector<int> pos;
  for (const auto& p : params) {
    const auto* d = std::get_if<double>(&p);
    if (!d || *d != std::floor(*d))
      throw TypeError("bits", "integer qubit positions", param_to_string(p));
    int i = int(*d);
    if (i < 1 || std::size_t(i) > qubits)
      throw ModelError("bits position " + std::to_string(i) + " outside 1.." +
                       std::to_string(qubits));
    if (std::find(pos.begin(), pos.end(), i) != pos.end())
      throw ModelError("bits position " + std::to_string(i) + " repeated");
    pos.push_back(i);
  }
  return pos;
}

ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& key) {
  return u.adjoint() * key * u;
}

}  // namespace

bool SpectralCache::Less::operator()(const ComplexMatrix& a,
                                     const ComplexMatrix& b) const {
  if (a.n != b.n) return a.n < b.n;
  for (std::size_t i = 0; i < a.a.size(); ++i) {
    if (a.a[i].real() != b.a[i].real()) return a.a[i].real() < b.a[i].real();
    if (a.a[i].imag() != b.a[i].imag()) return a.a[i].imag() < b.a[i].imag();
  }
  return false;
}

SpectralCache::Spectrum SpectralCache::get(const MatrixHandle& m,
                                           const Tolerances& tol) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(*m);
    if (it != cache_.end()) return it->second;
  }
  auto spec = std::make_shared<const std::vector<SpectralOutcome>>(
      spectral_decomposition(*m, tol));
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(*m, std::move(spec)).first->second;
}

FibObject QuantumModel::fibre() const { return q_word(qubits); }

std::optional<std::size_t> QuantumModel::find_state(const PureState& s) const {
  for (std::size_t i = 0; i < carrier.size(); ++i)
    if (overlap(carrier[i], s) >= 1.0 - tol.eps) return i;
  return std::nullopt;
}

std::size_t QuantumModel::add_state(const PureState& s) {
  if (auto found = find_state(s)) return *found;
  if (carrier.size() >= max_carrier)
    throw ClosureError("carrier closure exceeds the budget of " +
                       std::to_string(max_carrier) + " states");
  std::string name;
  for (std::size_t k = carrier.size();; ++k) {
    name = "q" + std::to_string(k);
    if (std::find(state_names.begin(), state_names.end(), name) ==
        state_names.end())
      break;
  }
  state_names.push_back(name);
  carrier.push_back(s);
  return carrier.size() - 1;
}

std::size_t QuantumModel::add_carrier_state(const std::string& name,
                                            PureState s) {
  if (s.dim() != dim())
    throw ModelError("carrier state " + name + " has dimension " +
                     std::to_string(s.dim()) + ", the model needs " +
                     std::to_string(dim()));
  if (std::abs(s.norm() - 1.0) > tol.herm)
    throw ModelError("carrier state " + name + " is not normalized");
  if (std::find(state_names.begin(), state_names.end(), name) !=
      state_names.end())
    throw ModelError("carrier state " + name + " declared twice");
  if (find_state(s))
    throw ModelError("carrier state " + name +
                     " duplicates an earlier state up to phase");
  state_names.push_back(name);
  carrier.push_back(std::move(s));
  declared = carrier.size();
  return carrier.size() - 1;
}

void QuantumModel::add_state_const(const std::string& name, PureState s) {
  if (std::abs(s.norm() - 1.0) > tol.herm)
    throw ModelError("state " + name + " is not normalized");
  log2_dim(s.dim(), "state " + name);
  if (!state_consts.emplace(name, std::move(s)).second)
    throw ModelError("state " + name + " declared twice");
}

void QuantumModel::add_observable(const std::string& name, ComplexMatrix m) {
  std::size_t q = log2_dim(m.n, "observable " + name);
  if (q > qubits)
    throw ModelError("observable " + name + " is wider than the model");
  if (!m.is_hermitian(tol.herm))
    throw ModelError("observable " + name + " is not Hermitian");
  auto h = std::make_shared<const ComplexMatrix>(std::move(m));
  if (!observables.emplace(name, std::move(h)).second)
    throw ModelError("observable " + name + " declared twice");
}

void QuantumModel::add_unitary(const std::string& name, ComplexMatrix m) {
  std::size_t q = log2_dim(m.n, "unitary " + name);
  if (q > qubits) throw ModelError("unitary " + name + " is wider than the model");
  if ((m.adjoint() * m).max_abs_diff(ComplexMatrix::identity(m.n)) > tol.herm)
    throw ModelError("unitary " + name + " is not unitary");
  if (sig.morphism_gens.count(name) || sig.morphism_schemata.count(name))
    throw ModelError("unitary " + name + " collides with a morphism name");
  auto h = std::make_shared<const ComplexMatrix>(std::move(m));
  if (!unitaries.emplace(name, h).second)
    throw ModelError("unitary " + name + " declared twice");

  const FibObject w = q_word(q);
  sig.morphism_gens[name] = MorphismGenDecl{w, w};
  const double eps = tol.eps;
  st.morphisms[name] = [h, w, eps](const std::vector<Param>& params) {
    if (!params.empty())
      throw TypeError("unitary morphism", "no parameters", "parameters");
    NatTrans nt;
    nt.source = w;
    nt.target = w;
    nt.map = [h, eps](const Value& v) {
      return Value::table({}, [v, h, eps](const TableKey& k) {
        const auto* mk = std::get_if<MatrixHandle>(&k);
        if (!mk)
          throw ShapeError("observable table queried with symbolic key " +
                           table_key_to_string(k));
        auto conj = std::make_shared<const ComplexMatrix>(conjugate_by(*h, **mk));
        return v.lookup(TableKey{std::move(conj)}, eps);
      });
    };
    return nt;
  };
}

MatrixHandle QuantumModel::observable(const std::string& name) const {
  auto it = observables.find(name);
  if (it == observables.end()) throw ModelError("unknown observable " + name);
  return it->second;
}

std::string QuantumModel::projector_key(const std::string& name) {
  if (auto it = observables.find(name); it != observables.end()) {
    const ComplexMatrix& p = *it->second;
    if ((p * p).max_abs_diff(p) > tol.herm)
      throw ModelError("observable " + name + " is not a projector");
    return name;
  }
  if (auto it = state_consts.find(name); it != state_consts.end()) {
    std::string key = "proj_" + name;
    if (!observables.count(key)) {
      const PureState& s = it->second;
      ComplexMatrix pr(s.dim());
      for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j)
          pr.at(i, j) = s.amp[i] * std::conj(s.amp[j]);
      add_observable(key, std::move(pr));
    }
    return key;
  }
  throw ModelError("P needs a projector observable or a named state, got " +
                   name);
}

double QuantumModel::scalar(const Param& p, const char* what) const {
  if (const auto* d = std::get_if<double>(&p)) return *d;
  const std::string& name = std::get<std::string>(p);
  auto it = scalars.find(name);
  if (it == scalars.end())
    throw ModelError(std::string(what) + ": unknown scalar " + name);
  return it->second;
}

void install_quantum(QuantumModel& m) {
  if (m.qubits < 1 || m.qubits > 5)
    throw ModelError("qubit count " + std::to_string(m.qubits) +
                     " outside the supported range 1..5");
  install_classical(m.sig, m.st, ClassicalOptions{});
  m.st.signature = &m.sig;
  m.st.tol = m.tol;

  for (std::size_t j = 1; j <= m.qubits; ++j) {
    m.sig.object_gens.insert(sa_name(j));
    m.st.functors[sa_name(j)] =
        FunctorInterp{FunctorInterp::ObsTable{std::size_t(1) << j}};
    m.sig.object_aliases["Q" + std::to_string(j)] = q_word(j);
  }

  QuantumModel* mp = &m;

  m.sig.morphism_schemata["ev"] = [mp](const std::vector<Param>& params) {
    if (params.size() != 1)
      throw TypeError("ev", "one observable name", std::to_string(params.size()) + " parameters");
    MatrixHandle h = mp->observable(require_name(params, 0, "ev"));
    std::size_t q = log2_dim(h->n, "observable");
    return MorphismGenDecl{q_word(q), FibObject{{"D", "R"}}};
  };
  m.st.morphisms["ev"] = [mp](const std::vector<Param>& params) {
    MatrixHandle h = mp->observable(require_name(params, 0, "ev"));
    std::size_t q = log2_dim(h->n, "observable");
    const double eps = mp->tol.eps;
    NatTrans nt;
    nt.source = q_word(q);
    nt.target = FibObject{{"D", "R"}};
    nt.map = [h, eps](const Value& v) { return v.lookup(TableKey{h}, eps); };
    return nt;
  };

  m.sig.morphism_schemata["bits"] = [mp](const std::vector<Param>& params) {
    auto pos = require_positions(params, mp->qubits);
    return MorphismGenDecl{q_word(mp->qubits), q_word(pos.size())};
  };
  m.st.morphisms["bits"] = [mp](const std::vector<Param>& params) {
    auto pos = require_positions(params, mp->qubits);
    const int total = int(mp->qubits);
    const double eps = mp->tol.eps;
    NatTrans nt;
    nt.source = q_word(mp->qubits);
    nt.target = q_word(pos.size());
    nt.map = [pos, total, eps](const Value& v) {
      return Value::table({}, [v, pos, total, eps](const TableKey& k) {
        const auto* mk = std::get_if<MatrixHandle>(&k);
        if (!mk)
          throw ShapeError("observable table queried with symbolic key " +
                           table_key_to_string(k));
        auto emb = std::make_shared<const ComplexMatrix>(
            embed_operator(**mk, pos, total));
        return v.lookup(TableKey{std::move(emb)}, eps);
      });
    };
    return nt;
  };

  m.sig.modality_macros["P"] = [mp](const std::vector<Param>& params) {
    if (params.size() != 1)
      throw TypeError("P", "one projector or state name",
                      std::to_string(params.size()) + " parameters");
    return projector_certainty(*mp, require_name(params, 0, "P"));
  };
  m.sig.modality_macros["certain"] = [mp](const std::vector<Param>& params) {
    if (params.size() != 2)
      throw TypeError("certain", "an outcome and an observable name",
                      std::to_string(params.size()) + " parameters");
    double r = mp->scalar(params[0], "certain");
    return outcome_certainty(*mp, r, require_name(params, 1, "certain"));
  };
  m.sig.modality_macros["meas"] = [mp](const std::vector<Param>& params) {
    if (params.size() != 3)
      throw TypeError("meas", "a mass, an outcome, and an observable name",
                      std::to_string(params.size()) + " parameters");
    double p = mp->scalar(params[0], "meas");
    double r = mp->scalar(params[1], "meas");
    return outcome_mass(*mp, p, r, require_name(params, 2, "meas"));
  };
  m.sig.modality_macros["measure"] = [mp](const std::vector<Param>& params) {
    if (params.size() < 2)
      throw TypeError("measure", "an observable name and outcomes",
                      std::to_string(params.size()) + " parameters");
    std::vector<double> outcomes;
    for (std::size_t i = 1; i < params.size(); ++i)
      outcomes.push_back(mp->scalar(params[i], "measure"));
    return outcome_cases(*mp, require_name(params, 0, "measure"), outcomes);
  };
}

std::vector<BornBranch> born(const QuantumModel& m, const PureState& psi,
                             const MatrixHandle& obs) {
  if (psi.dim() != obs->n)
    throw ShapeError("state dimension " + std::to_string(psi.dim()) +
                     " does not match observable dimension " +
                     std::to_string(obs->n));
  auto spec = m.spectra.get(obs, m.tol);
  std::vector<BornBranch> out;
  for (const auto& oc : *spec) {
    PureState proj = apply(oc.projector, psi);
    double p = proj.norm();
    p *= p;
    if (p <= m.tol.eps) continue;
    proj.normalize();
    out.push_back(BornBranch{oc.value, p, std::move(proj)});
  }
  return out;
}

Value measurement_value(const QuantumModel& m, std::size_t state,
                        const MatrixHandle& obs) {
  const auto branches = born(m, m.carrier.at(state), obs);
  double kept = 0.0;
  for (const auto& b : branches) kept += b.prob;
  std::vector<std::pair<Value, double>> mass;
  mass.reserve(branches.size());
  for (const auto& b : branches) {
    auto idx = m.find_state(b.post);
    if (!idx)
      throw ClosureError("successor of " + m.state_names.at(state) +
                         " for outcome " + format_double(b.outcome) +
                         " is not in the carrier; the carrier is not closed "
                         "under this observable");
    mass.emplace_back(Value::pairing(Label{b.outcome}, Value::base(*idx)),
                      b.prob);
  }
  // Dropped branches may legitimately carry up to the dropped mass.
  const double slack = std::max(1.0 - kept, 0.0) + m.tol.eps;
  return Value::dist(std::move(mass), slack);
}

Coalgebra quantum_coalgebra(const QuantumModel& m) {
  Coalgebra c;
  c.carrier.state_names = m.state_names;
  c.fibre = m.fibre();
  const QuantumModel* mp = &m;
  c.gamma = [mp](std::size_t i) {
    return Value::table({}, [mp, i](const TableKey& k) {
      const auto* mk = std::get_if<MatrixHandle>(&k);
      if (!mk)
        throw ShapeError("measurement table queried with symbolic key " +
                         table_key_to_string(k));
      return measurement_value(*mp, i, *mk);
    });
  };
  return c;
}

namespace {

bool same_matrix(const MatrixHandle& a, const MatrixHandle& b) {
  return a->n == b->n && a->max_abs_diff(*b) == 0.0;
}

// Key that reaches the base measurement table when the chain's first
// ev fires: earlier table-layer atoms reroute their requested key, so
// fold their key transforms outside-in over the named observable.
void scan_chain(const QuantumModel& m, const std::vector<WhiskeredGen>& atoms,
                std::vector<MatrixHandle>& out) {
  std::size_t ev_at = atoms.size();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].left.is_unit() && atoms[i].name == "ev") {
      ev_at = i;
      break;
    }
  }
  if (ev_at == atoms.size()) return;
  MatrixHandle key = m.observable(require_name(atoms[ev_at].params, 0, "ev"));
  for (std::size_t i = ev_at; i-- > 0;) {
    const WhiskeredGen& a = atoms[i];
    if (!a.left.is_unit()) continue;  // acts under the table layer
    if (a.name == "bits") {
      auto pos = require_positions(a.params, m.qubits);
      key = std::make_shared<const ComplexMatrix>(
          embed_operator(*key, pos, int(m.qubits)));
    } else if (auto it = m.unitaries.find(a.name); it != m.unitaries.end()) {
      key = std::make_shared<const ComplexMatrix>(conjugate_by(*it->second, *key));
    } else {
      throw ClosureError("cannot trace observable keys through morphism " +
                         a.name);
    }
  }
  for (const auto& k : out)
    if (same_matrix(k, key)) return;
  out.push_back(key);
}

void collect_keys(const QuantumModel& m, const ModalityExpr& e,
                  const std::vector<WhiskeredGen>& pre,
                  std::vector<MatrixHandle>& out) {
  const auto& n = e.node();
  if (std::get_if<ModalityExpr::Base>(&n)) {
    scan_chain(m, pre, out);
    return;
  }
  if (const auto* g = std::get_if<ModalityExpr::Neg>(&n)) {
    collect_keys(m, *g->inner, pre, out);
    return;
  }
  if (const auto* c = std::get_if<ModalityExpr::Conj>(&n)) {
    for (const auto& i : c->items) collect_keys(m, *i, pre, out);
    return;
  }
  if (const auto* s = std::get_if<ModalityExpr::Sup>(&n)) {
    auto nf = normal_form(*s->f, m.sig);
    std::vector<WhiskeredGen> chain = pre;
    chain.insert(chain.end(), nf.atoms.begin(), nf.atoms.end());
    collect_keys(m, *s->inner, chain, out);
    return;
  }
  if (const auto* t = std::get_if<ModalityExpr::Then>(&n)) {
    collect_keys(m, *t->first, pre, out);
    collect_keys(m, *t->second, pre, out);
    return;
  }
  collect_keys(m, *std::get<ModalityExpr::Weaken>(n).inner, pre, out);
}

void close_rec(QuantumModel& m, const Formula& f,
               const std::vector<std::size_t>& states) {
  const auto& n = f.node();
  if (std::get_if<Formula::Top>(&n)) return;
  if (const auto* g = std::get_if<Formula::Neg>(&n)) {
    close_rec(m, *g->inner, states);
    return;
  }
  if (const auto* c = std::get_if<Formula::Conj>(&n)) {
    for (const auto& i : c->items) close_rec(m, *i, states);
    return;
  }
  if (std::get_if<Formula::Adapt>(&n))
    throw ModelError("closure expects an adaptation-free formula");
  const auto& ap = std::get<Formula::Apply>(n);
  std::vector<MatrixHandle> keys;
  collect_keys(m, *ap.mod, {}, keys);
  std::set<std::size_t> next;
  for (std::size_t x : states) {
    for (const auto& k : keys) {
      for (const auto& b : born(m, m.carrier[x], k))
        next.insert(m.add_state(b.post));
    }
  }
  if (ap.args.empty()) return;
  std::vector<std::size_t> succ(next.begin(), next.end());
  for (const auto& arg : ap.args) close_rec(m, *arg, succ);
}

}  // namespace

void close_carrier(QuantumModel& m, const FormulaPtr& f) {
  FormulaPtr plain = translate(Morphism::id(m.fibre()), f, m.sig);
  std::vector<std::size_t> s0(m.declared);
  std::iota(s0.begin(), s0.end(), 0);
  close_rec(m, *plain, s0);
}

ModalityPtr outcome_mass(QuantumModel& m, double p, double r,
                         const std::string& obs) {
  m.observable(obs);
  auto dreq = ModalityExpr::then(ModalityExpr::base("detcert", {Param{r}}),
                                 ModalityExpr::base("deq", {Param{p}}));
  return ModalityExpr::sup(std::move(dreq), Morphism::gen("ev", {Param{obs}}));
}

ModalityPtr outcome_certainty(QuantumModel& m, double r,
                              const std::string& obs) {
  return ModalityExpr::then(ModalityExpr::base("not"),
                            outcome_mass(m, 0.0, r, obs));
}

ModalityPtr projector_certainty(QuantumModel& m, const std::string& name) {
  std::string key = m.projector_key(name);
  return ModalityExpr::then(ModalityExpr::base("top"),
                            outcome_mass(m, 1.0, 1.0, key));
}

ModalityPtr outcome_cases(QuantumModel& m, const std::string& obs,
                          const std::vector<double>& outcomes) {
  MatrixHandle h = m.observable(obs);
  auto spec = m.spectra.get(h, m.tol);
  for (double r : outcomes) {
    bool found = false;
    for (const auto& oc : *spec)
      if (std::abs(r - oc.value) <= m.tol.spectral * std::max(1.0, std::abs(oc.value))) {
        found = true;
        break;
      }
    if (!found)
      throw ModelError("outcome " + format_double(r) +
                       " is not in the spectrum of " + obs);
  }
  const std::size_t k = outcomes.size();
  if (k == 1) return outcome_certainty(m, outcomes[0], obs);
  std::vector<ModalityPtr> parts;
  parts.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    parts.push_back(
        ModalityExpr::weaken(outcome_certainty(m, outcomes[i], obs), k, i));
  return ModalityExpr::conj(std::move(parts));
}

}  // namespace fibcoalg
