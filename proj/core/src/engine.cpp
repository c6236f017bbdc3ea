#include "fibcoalg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace fibcoalg {

using nlohmann::json;

const FibredSignature& BuiltModel::signature() const {
  return quantum() ? model.quantum->sig : sig;
}

const Structure& BuiltModel::structure() const {
  return quantum() ? model.quantum->st : st;
}

FibObject BuiltModel::fibre() const {
  switch (model.kind) {
    case ModelKind::kKripke: return FibObject::gen("P");
    case ModelKind::kLts: return FibObject{{"E", "P"}};
    case ModelKind::kMarkov: return FibObject::gen("D");
    default: return model.quantum->fibre();
  }
}

Coalgebra BuiltModel::coalgebra() const {
  return quantum() ? quantum_coalgebra(*model.quantum) : coalg;
}

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kKripke: return "kripke";
    case ModelKind::kLts: return "lts";
    case ModelKind::kMarkov: return "markov";
    default: return "quantum";
  }
}

std::unique_ptr<BuiltModel> build_model(LoadedModel lm) {
  auto bm = std::make_unique<BuiltModel>();
  bm->model = std::move(lm);
  switch (bm->model.kind) {
    case ModelKind::kKripke:
      install_classical(bm->sig, bm->st, ClassicalOptions{});
      bm->coalg = kripke_coalgebra(bm->model.kripke);
      break;
    case ModelKind::kLts: {
      ClassicalOptions opt;
      opt.exp_keys = bm->model.lts.labels;
      install_classical(bm->sig, bm->st, opt);
      bm->coalg = lts_coalgebra(bm->model.lts);
      break;
    }
    case ModelKind::kMarkov:
      install_classical(bm->sig, bm->st, ClassicalOptions{});
      bm->coalg = markov_coalgebra(bm->model.markov, bm->model.epsilon);
      break;
    case ModelKind::kQuantum:
      return bm;
  }
  bm->st.tol.eps = bm->model.epsilon;
  bm->st.signature = &bm->sig;
  return bm;
}

namespace {

void set_error(CheckReport& rep, int code, const char* kind,
               const std::string& msg) {
  rep.exit_code = code;
  rep.error_kind = kind;
  rep.error = msg;
}

}  // namespace

CheckReport run_check(BuiltModel& bm, const std::string& formula_document,
                      const CheckOptions& opt) {
  CheckReport rep;
  rep.model_kind = model_kind_name(bm.model.kind);
  const FibredSignature& sig = bm.signature();
  const FibObject home = bm.fibre();

  Definitions defs = bm.model.defs;
  FormulaPtr phi;
  try {
    std::string body = strip_definitions(formula_document, defs);
    phi = parse_formula(body, sig, defs, home);
  } catch (const ParseError& e) {
    set_error(rep, 2, "parse", e.what());
    return rep;
  } catch (const TypeError& e) {
    set_error(rep, 3, "type", e.what());
    return rep;
  } catch (const ModelError& e) {
    set_error(rep, 3, "model", e.what());
    return rep;
  }
  rep.formula = to_string(*phi);

  try {
    FibObject at = type_of_formula(*phi, sig);
    rep.fibre = at.str();
    if (at != home) throw TypeError("formula", home.str(), at.str());
  } catch (const TypeError& e) {
    set_error(rep, 3, "type", e.what());
    return rep;
  }

  std::vector<std::string> wanted;
  if (!opt.state.empty()) {
    wanted.push_back(opt.state);
  } else {
    wanted = bm.model.initial;
  }

  try {
    if (bm.quantum()) {
      QuantumModel& qm = *bm.model.quantum;
      rep.carrier_declared = qm.declared;
      close_carrier(qm, phi);
      rep.carrier_closed = qm.carrier.size();
      Coalgebra c = bm.coalgebra();
      rep.holds = true;
      for (const auto& name : wanted) {
        auto idx = bm.model.state_index(name);
        if (!idx || *idx >= qm.declared)
          throw ModelError("unknown state '" + name + "'");
        bool v = holds_at(qm.st, *phi, c, *idx);
        rep.states.emplace_back(name, v);
        rep.holds = rep.holds && v;
      }
    } else {
      Coalgebra c = bm.coalgebra();
      StateSet ext = eval_formula(bm.st, *phi, c);
      rep.has_extent = true;
      for (std::size_t i : ext.members())
        rep.extent.push_back(c.carrier.state_names[i]);
      rep.holds = true;
      for (const auto& name : wanted) {
        auto idx = bm.model.state_index(name);
        if (!idx) throw ModelError("unknown state '" + name + "'");
        bool v = ext.test(*idx);
        rep.states.emplace_back(name, v);
        rep.holds = rep.holds && v;
      }
    }
  } catch (const ClosureError& e) {
    set_error(rep, 4, "closure", e.what());
    return rep;
  } catch (const TypeError& e) {
    set_error(rep, 3, "type", e.what());
    return rep;
  } catch (const ModelError& e) {
    set_error(rep, 3, "model", e.what());
    return rep;
  } catch (const ShapeError& e) {
    set_error(rep, 3, "model", e.what());
    return rep;
  }

  rep.exit_code = rep.holds ? 0 : 1;
  return rep;
}

std::string CheckReport::text() const {
  std::ostringstream os;
  os << "model: " << model_kind << "\n";
  if (!error.empty()) {
    os << "error (" << error_kind << "): " << error << "\n";
    return os.str();
  }
  os << "formula: " << formula << "\n";
  os << "object: " << fibre << "\n";
  if (carrier_closed > 0)
    os << "carrier: " << carrier_declared << " declared, " << carrier_closed
       << " after closure\n";
  for (const auto& [name, v] : states)
    os << "state " << name << ": " << (v ? "holds" : "fails") << "\n";
  if (has_extent) {
    os << "extent:";
    for (const auto& name : extent) os << " " << name;
    os << "\n";
  }
  os << "result: " << (holds ? "holds" : "fails") << "\n";
  return os.str();
}

std::string CheckReport::json() const {
  nlohmann::json j;
  j["model"] = model_kind;
  j["exit"] = exit_code;
  if (!error.empty()) {
    j["error"] = {{"kind", error_kind}, {"message", error}};
    return j.dump(2) + "\n";
  }
  j["formula"] = formula;
  j["object"] = fibre;
  nlohmann::json st = nlohmann::json::object();
  for (const auto& [name, v] : states) st[name] = v;
  j["states"] = st;
  if (has_extent) j["extent"] = extent;
  if (carrier_closed > 0)
    j["carrier"] = {{"declared", carrier_declared}, {"closed", carrier_closed}};
  j["holds"] = holds;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------
// Demos.

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ParseError*>(&e)) return 2;
  if (dynamic_cast<const ClosureError*>(&e)) return 4;
  return 3;
}

// 53-bit uniform draw; avoids distribution objects so the stream is
// identical on every platform.
double unit_draw(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1p-53;
}

std::string complex_literal(cplx z) {
  std::string s = format_double(z.real());
  if (z.imag() >= 0)
    s += " + " + format_double(z.imag()) + "i";
  else
    s += " - " + format_double(-z.imag()) + "i";
  return s;
}

std::string teleport_model_text(cplx a, cplx b) {
  std::string t = "model quantum\nqubits 3\n";
  t += "state phi := vec(" + complex_literal(a) + ", " + complex_literal(b) +
       ")\n";
  t += "state bellpair := bell(1)\n";
  t += "state init := kron(phi, bellpair)\n";
  t += "obs A_bell := bellobs\n";
  t += "unitary U1 := I\nunitary U2 := Z\nunitary U3 := X\nunitary U4 := X*Z\n";
  t += "carrier init\ninitial init\n";
  return t;
}

struct NamedInput {
  std::string name;
  cplx a, b;
};

std::vector<NamedInput> teleport_inputs(std::uint64_t seed) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<NamedInput> in = {
      {"basis0", 1, 0},          {"basis1", 0, 1},
      {"plus", s, s},            {"minus", s, -s},
      {"plus_i", s, cplx(0, s)},
  };
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 10; ++k) {
    cplx a, b;
    double n = 0;
    do {
      a = cplx(2 * unit_draw(rng) - 1, 2 * unit_draw(rng) - 1);
      b = cplx(2 * unit_draw(rng) - 1, 2 * unit_draw(rng) - 1);
      n = std::sqrt(std::norm(a) + std::norm(b));
    } while (n < 0.1);
    in.push_back({"random" + std::to_string(k + 1), a / n, b / n});
  }
  return in;
}

}  // namespace

int demo_teleport(const DemoOptions& opt, std::ostream& out) {
  std::vector<std::string> formula_docs;
  std::vector<std::string> formula_names = {"full", "outcome 1", "outcome 2",
                                            "outcome 3", "outcome 4"};
  try {
    formula_docs.push_back(
        read_text_file(opt.assets + "/teleport_full.fml"));
    for (int i = 1; i <= 4; ++i)
      formula_docs.push_back(read_text_file(
          opt.assets + "/teleport_out" + std::to_string(i) + ".fml"));
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  const double tol = opt.tolerance.value_or(1e-9);
  ModelLoadOptions mlo;
  mlo.epsilon = opt.tolerance;

  json jstates = json::array();
  bool all_pass = true;
  std::size_t passed = 0;
  auto inputs = teleport_inputs(opt.seed);
  if (!opt.json)
    out << "teleportation: three-qubit model, " << inputs.size()
        << " input states (seed " << opt.seed << ")\n";

  for (const auto& in : inputs) {
    bool state_pass = true;
    std::vector<double> probs;
    std::vector<bool> verdicts;
    std::string error;
    try {
      auto bm = build_model(load_model(teleport_model_text(in.a, in.b), mlo));
      QuantumModel& qm = *bm->model.quantum;
      auto embedded = std::make_shared<const ComplexMatrix>(
          embed_operator(*qm.observable("A_bell"), {1, 2}, 3));
      auto branches = born(qm, qm.carrier[0], embedded);
      std::sort(branches.begin(), branches.end(),
                [](const BornBranch& x, const BornBranch& y) {
                  return x.outcome < y.outcome;
                });
      for (const auto& b : branches) probs.push_back(b.prob);
      bool uniform = probs.size() == 4;
      for (double p : probs) uniform = uniform && std::abs(p - 0.25) <= tol;
      state_pass = uniform;
      for (const auto& doc : formula_docs) {
        CheckReport rep = run_check(*bm, doc, CheckOptions{});
        if (rep.exit_code >= 2) throw ModelError(rep.error);
        verdicts.push_back(rep.holds);
        state_pass = state_pass && rep.holds;
      }
    } catch (const Error& e) {
      error = e.what();
      state_pass = false;
    }
    all_pass = all_pass && state_pass;
    if (state_pass) ++passed;

    if (opt.json) {
      json js;
      js["name"] = in.name;
      js["phi"] = {complex_literal(in.a), complex_literal(in.b)};
      js["probabilities"] = probs;
      json jv = json::object();
      for (std::size_t i = 0; i < verdicts.size(); ++i)
        jv[formula_names[i]] = static_cast<bool>(verdicts[i]);
      js["specifications"] = jv;
      if (!error.empty()) js["error"] = error;
      js["pass"] = state_pass;
      jstates.push_back(js);
    } else {
      out << "state " << in.name << " [phi = " << complex_literal(in.a)
          << ", " << complex_literal(in.b) << "]\n";
      if (!error.empty()) {
        out << "  error: " << error << "\n";
        continue;
      }
      out << "  bell outcome probabilities:";
      for (double p : probs) out << " " << format_double(p);
      out << "\n";
      for (std::size_t i = 0; i < verdicts.size(); ++i)
        out << "  " << formula_names[i]
            << " specification: " << (verdicts[i] ? "holds" : "fails") << "\n";
    }
  }

  if (opt.json) {
    json j;
    j["demo"] = "teleport";
    j["seed"] = opt.seed;
    j["states"] = jstates;
    j["pass"] = all_pass;
    j["exit"] = all_pass ? 0 : 5;
    out << j.dump(2) << "\n";
  } else {
    out << "summary: " << passed << " of " << inputs.size()
        << " input states satisfy every specification\n";
  }
  return all_pass ? 0 : 5;
}

int demo_swap(const DemoOptions& opt, std::ostream& out) {
  const char* model_file = opt.corrections ? "/swap.model" : "/swap_nocorr.model";
  std::unique_ptr<BuiltModel> bm;
  std::vector<std::string> formula_docs;
  try {
    ModelLoadOptions mlo;
    mlo.epsilon = opt.tolerance;
    bm = build_model(load_model_file(opt.assets + model_file, mlo));
    for (int i = 1; i <= 4; ++i)
      formula_docs.push_back(
          read_text_file(opt.assets + "/swap_out" + std::to_string(i) + ".fml"));
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  if (!opt.json)
    out << "entanglement swapping: four-qubit model, corrections "
        << (opt.corrections ? "enabled" : "disabled") << "\n";
  json joutcomes = json::array();
  bool all_hold = true;
  std::size_t held = 0;
  for (std::size_t i = 0; i < formula_docs.size(); ++i) {
    CheckReport rep = run_check(*bm, formula_docs[i], CheckOptions{});
    if (rep.exit_code >= 2) {
      out << "error: " << rep.error << "\n";
      return rep.exit_code;
    }
    all_hold = all_hold && rep.holds;
    if (rep.holds) ++held;
    if (opt.json) {
      joutcomes.push_back(
          {{"outcome", i + 1}, {"holds", rep.holds}});
    } else {
      out << "outcome " << (i + 1)
          << " specification: " << (rep.holds ? "holds" : "fails") << "\n";
    }
  }
  if (opt.json) {
    json j;
    j["demo"] = "swap";
    j["corrections"] = opt.corrections;
    j["outcomes"] = joutcomes;
    j["pass"] = all_hold;
    j["exit"] = all_hold ? 0 : 5;
    out << j.dump(2) << "\n";
  } else {
    out << "summary: " << held << " of " << formula_docs.size()
        << " outcome specifications hold\n";
  }
  return all_hold ? 0 : 5;
}

int run_selftest(const std::string& suite, std::uint64_t seed, bool as_json,
                 std::ostream& out) {
  std::vector<PropertyReport> reports;
  if (suite == "naturality") {
    reports = run_naturality_suite(seed);
  } else if (suite == "separation") {
    reports = run_separation_suite(seed);
  } else if (suite == "translation") {
    reports.push_back(run_translation_suite(seed, 500));
  } else if (suite == "invariance") {
    reports.push_back(run_invariance_suite(seed, 200, 5, 8, 3));
  } else if (suite == "lemmas") {
    reports = run_lemma_suite(seed);
  } else {
    out << "error: unknown suite '" << suite
        << "' (naturality, separation, translation, invariance, lemmas)\n";
    return 2;
  }

  bool pass = true;
  for (const auto& r : reports) pass = pass && r.holds();

  if (as_json) {
    json jr = json::array();
    for (const auto& r : reports)
      jr.push_back({{"name", r.name},
                    {"checked", r.checked},
                    {"counterexamples", r.counterexamples}});
    json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["reports"] = jr;
    j["pass"] = pass;
    j["exit"] = pass ? 0 : 5;
    out << j.dump(2) << "\n";
  } else {
    out << "suite " << suite << " (seed " << seed << ")\n";
    for (const auto& r : reports) {
      out << r.name << ": " << r.checked << " checks, "
          << r.counterexamples.size() << " counterexamples\n";
      for (const auto& cx : r.counterexamples) out << "  " << cx << "\n";
    }
    out << "result: " << (pass ? "pass" : "fail") << "\n";
  }
  return pass ? 0 : 5;
}

}  // namespace fibcoalg
