#include "fibcoalg/model_format.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>

#include "lexer_internal.hpp"

namespace fibcoalg {

namespace {

using lexinternal::Lexer;
using lexinternal::Tok;
using lexinternal::Token;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError(msg, line, 1);
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

double parse_number(const std::string& s, int line) {
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      double num = std::stod(s.substr(0, slash));
      double den = std::stod(s.substr(slash + 1));
      if (den == 0.0) fail(line, "division by zero in '" + s + "'");
      return num / den;
    }
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) fail(line, "malformed number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(line, "malformed number '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range '" + s + "'");
  }
}

// One logical model line: keyword, rest of line, source line number.
struct Line {
  std::string keyword;
  std::string rest;
  int number = 0;
};

std::vector<Line> logical_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream is(text);
  std::string raw;
  int n = 0;
  while (std::getline(is, raw)) {
    ++n;
    std::string body = strip_comment(raw);
    std::istringstream ls(body);
    std::string kw;
    if (!(ls >> kw)) continue;
    std::string rest;
    std::getline(ls, rest);
    out.push_back(Line{kw, rest, n});
  }
  return out;
}

// ---------------------------------------------------------------------
// State and gate expressions.

struct ExprVal {
  enum Kind { kScalar, kVec, kMat } kind = kScalar;
  cplx s;
  PureState v;
  ComplexMatrix m;

  static ExprVal scalar(cplx x) { return ExprVal{kScalar, x, {}, {}}; }
  static ExprVal vec(PureState x) {
    return ExprVal{kVec, {}, std::move(x), {}};
  }
  static ExprVal mat(ComplexMatrix x) {
    return ExprVal{kMat, {}, {}, std::move(x)};
  }
  const char* what() const {
    switch (kind) {
      case kScalar: return "scalar";
      case kVec: return "state";
      default: return "operator";
    }
  }
};

class ExprParser {
 public:
  ExprParser(const std::string& text, int line,
             const std::map<std::string, ExprVal>& env, std::size_t qubits)
      : lex_(text, line), env_(env), qubits_(qubits) {}

  ExprVal parse() {
    ExprVal v = sum();
    if (lex_.peek().kind != Tok::kEnd)
      fail("unexpected trailing input in expression");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, lex_.peek().line, lex_.peek().col);
  }

  ExprVal sum() {
    ExprVal acc = term();
    while (lex_.peek().kind == Tok::kPlus || lex_.peek().kind == Tok::kMinus) {
      bool minus = lex_.take().kind == Tok::kMinus;
      ExprVal rhs = term();
      acc = add(acc, rhs, minus);
    }
    return acc;
  }

  ExprVal term() {
    ExprVal acc = factor();
    for (;;) {
      if (lex_.peek().kind == Tok::kStar) {
        lex_.take();
        acc = mul(acc, factor());
      } else if (lex_.peek().kind == Tok::kSlash) {
        lex_.take();
        ExprVal d = factor();
        if (d.kind != ExprVal::kScalar) fail("can only divide by a scalar");
        if (std::abs(d.s) == 0.0) fail("division by zero");
        acc = mul(acc, ExprVal::scalar(cplx(1, 0) / d.s));
      } else {
        return acc;
      }
    }
  }

  ExprVal factor() {
    if (lex_.peek().kind == Tok::kMinus) {
      lex_.take();
      return mul(ExprVal::scalar(cplx(-1, 0)), factor());
    }
    if (lex_.peek().kind == Tok::kPlus) {
      lex_.take();
      return factor();
    }
    return primary();
  }

  ExprVal primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::kLParen) {
      lex_.take();
      ExprVal v = sum();
      expect(Tok::kRParen, ")");
      return v;
    }
    if (t.kind == Tok::kNumber) {
      Token num = lex_.take();
      cplx s(num.number, 0);
      if (lex_.peek().kind == Tok::kName && lex_.peek().text == "i") {
        lex_.take();
        s = cplx(0, num.number);
      }
      return ExprVal::scalar(s);
    }
    if (t.kind != Tok::kName) fail("expected an expression");
    Token name = lex_.take();
    const std::string& id = name.text;
    if (id == "i") return ExprVal::scalar(cplx(0, 1));
    if (id == "sqrt") {
      auto args = call_args(id, 1, 1);
      if (args[0].kind != ExprVal::kScalar) fail("sqrt needs a scalar");
      return ExprVal::scalar(std::sqrt(args[0].s));
    }
    if (id == "ket") return ket();
    if (id == "vec") return vec_literal();
    if (id == "bell") return ExprVal::vec(bell_state(small_index(id)));
    if (id == "bellproj")
      return ExprVal::mat(bell_projector(small_index(id)));
    if (id == "bellobs") return ExprVal::mat(bell_observable());
    if (id == "kron") return kron_call();
    if (id == "proj") {
      auto args = call_args(id, 1, 1);
      if (args[0].kind != ExprVal::kVec) fail("proj needs a state");
      return ExprVal::mat(projector_of(args[0].v));
    }
    if (id == "adj") {
      auto args = call_args(id, 1, 1);
      if (args[0].kind != ExprVal::kMat) fail("adj needs an operator");
      return ExprVal::mat(args[0].m.adjoint());
    }
    if (id == "embed") return embed_call();
    if (id == "I") return ExprVal::mat(gate_I());
    if (id == "X") return ExprVal::mat(gate_X());
    if (id == "Y") return ExprVal::mat(gate_Y());
    if (id == "Z") return ExprVal::mat(gate_Z());
    if (id == "H") return ExprVal::mat(gate_H());
    if (id == "CNOT") return ExprVal::mat(gate_CNOT());
    if (id == "SWAP") return ExprVal::mat(gate_SWAP());
    auto it = env_.find(id);
    if (it == env_.end()) fail("unknown name '" + id + "'");
    return it->second;
  }

  ExprVal ket() {
    expect(Tok::kLParen, "(");
    Token bits = lex_.take();
    if (bits.kind != Tok::kNumber) fail("ket needs a bit string, e.g. ket(01)");
    for (char c : bits.text)
      if (c != '0' && c != '1') fail("ket digits must be 0 or 1");
    expect(Tok::kRParen, ")");
    std::size_t q = bits.text.size();
    if (q > 16) fail("ket is too wide");
    std::size_t index = 0;
    for (char c : bits.text) index = index * 2 + (c == '1' ? 1 : 0);
    PureState s;
    s.amp.assign(std::size_t(1) << q, cplx(0, 0));
    s.amp[index] = cplx(1, 0);
    return ExprVal::vec(std::move(s));
  }

  ExprVal vec_literal() {
    auto args = call_args("vec", 1, 1024);
    PureState s;
    s.amp.reserve(args.size());
    for (const auto& a : args) {
      if (a.kind != ExprVal::kScalar) fail("vec entries must be scalars");
      s.amp.push_back(a.s);
    }
    if (s.amp.size() < 2 || (s.amp.size() & (s.amp.size() - 1)) != 0)
      fail("vec needs a power-of-two number of amplitudes");
    return ExprVal::vec(std::move(s));
  }

  ExprVal kron_call() {
    auto args = call_args("kron", 2, 16);
    ExprVal acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (acc.kind == ExprVal::kVec && args[i].kind == ExprVal::kVec)
        acc = ExprVal::vec(kron(acc.v, args[i].v));
      else if (acc.kind == ExprVal::kMat && args[i].kind == ExprVal::kMat)
        acc = ExprVal::mat(kron(acc.m, args[i].m));
      else
        fail("kron arguments must be all states or all operators");
    }
    return acc;
  }

  ExprVal embed_call() {
    expect(Tok::kLParen, "(");
    ExprVal op = sum();
    if (op.kind != ExprVal::kMat) fail("embed needs an operator first");
    std::vector<int> positions;
    while (lex_.peek().kind == Tok::kComma) {
      lex_.take();
      Token p = lex_.take();
      if (p.kind != Tok::kNumber || p.number != std::floor(p.number))
        fail("embed positions must be integers");
      positions.push_back(static_cast<int>(p.number));
    }
    expect(Tok::kRParen, ")");
    if (positions.empty()) fail("embed needs at least one position");
    for (int p : positions)
      if (p < 1 || static_cast<std::size_t>(p) > qubits_)
        fail("embed position out of range");
    return ExprVal::mat(
        embed_operator(op.m, positions, static_cast<int>(qubits_)));
  }

  ComplexMatrix projector_of(const PureState& v) {
    double n = v.norm();
    if (n == 0.0) fail("proj of the zero vector");
    ComplexMatrix p(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i)
      for (std::size_t j = 0; j < v.dim(); ++j)
        p.at(i, j) = v.amp[i] * std::conj(v.amp[j]) / (n * n);
    return p;
  }

  int small_index(const std::string& who) {
    expect(Tok::kLParen, "(");
    Token t = lex_.take();
    if (t.kind != Tok::kNumber || t.number < 1 || t.number > 4 ||
        t.number != std::floor(t.number))
      fail(who + " needs an index from 1 to 4");
    expect(Tok::kRParen, ")");
    return static_cast<int>(t.number);
  }

  std::vector<ExprVal> call_args(const std::string& who, std::size_t lo,
                                 std::size_t hi) {
    expect(Tok::kLParen, "(");
    std::vector<ExprVal> out;
    if (lex_.peek().kind != Tok::kRParen) {
      out.push_back(sum());
      while (lex_.peek().kind == Tok::kComma) {
        lex_.take();
        out.push_back(sum());
      }
    }
    expect(Tok::kRParen, ")");
    if (out.size() < lo || out.size() > hi)
      fail(who + " got " + std::to_string(out.size()) + " arguments");
    return out;
  }

  void expect(Tok k, const char* what) {
    if (lex_.peek().kind != k)
      fail(std::string("expected '") + what + "'");
    lex_.take();
  }

  ExprVal add(const ExprVal& a, const ExprVal& b, bool minus) {
    cplx sign = minus ? cplx(-1, 0) : cplx(1, 0);
    if (a.kind == ExprVal::kScalar && b.kind == ExprVal::kScalar)
      return ExprVal::scalar(a.s + sign * b.s);
    if (a.kind == ExprVal::kVec && b.kind == ExprVal::kVec) {
      if (a.v.dim() != b.v.dim()) fail("adding states of different width");
      PureState out = a.v;
      for (std::size_t i = 0; i < out.dim(); ++i)
        out.amp[i] += sign * b.v.amp[i];
      return ExprVal::vec(std::move(out));
    }
    if (a.kind == ExprVal::kMat && b.kind == ExprVal::kMat) {
      if (a.m.n != b.m.n) fail("adding operators of different width");
      return ExprVal::mat(minus ? a.m - b.m : a.m + b.m);
    }
    fail(std::string("cannot add a ") + a.what() + " and a " + b.what());
  }

  ExprVal mul(const ExprVal& a, const ExprVal& b) {
    if (a.kind == ExprVal::kScalar && b.kind == ExprVal::kScalar)
      return ExprVal::scalar(a.s * b.s);
    if (a.kind == ExprVal::kScalar || b.kind == ExprVal::kScalar) {
      const ExprVal& x = a.kind == ExprVal::kScalar ? b : a;
      cplx s = a.kind == ExprVal::kScalar ? a.s : b.s;
      if (x.kind == ExprVal::kVec) {
        PureState out = x.v;
        for (auto& c : out.amp) c *= s;
        return ExprVal::vec(std::move(out));
      }
      return ExprVal::mat(x.m.scaled(s));
    }
    if (a.kind == ExprVal::kMat && b.kind == ExprVal::kMat) {
      if (a.m.n != b.m.n) fail("multiplying operators of different width");
      return ExprVal::mat(a.m * b.m);
    }
    if (a.kind == ExprVal::kMat && b.kind == ExprVal::kVec) {
      if (a.m.n != b.v.dim()) fail("operator and state widths differ");
      return ExprVal::vec(apply(a.m, b.v));
    }
    fail(std::string("cannot multiply a ") + a.what() + " and a " + b.what());
  }

  Lexer lex_;
  const std::map<std::string, ExprVal>& env_;
  std::size_t qubits_;
};

// ---------------------------------------------------------------------
// Per-backend loaders.

// Splits "name := body"; returns false when ':=' is absent.
bool split_define(const std::string& rest, std::string& name,
                  std::string& body) {
  auto pos = rest.find(":=");
  if (pos == std::string::npos) return false;
  std::string head = rest.substr(0, pos);
  auto words = split_words(head);
  if (words.size() != 1) return false;
  name = words[0];
  body = rest.substr(pos + 2);
  auto b = body.find_first_not_of(" \t");
  auto e = body.find_last_not_of(" \t");
  if (b == std::string::npos) return false;
  body = body.substr(b, e - b + 1);
  return valid_name(name);
}

bool take_def_line(const Line& ln, Definitions& defs) {
  if (ln.keyword != "def" && ln.keyword != "defm") return false;
  std::string name, body;
  if (!split_define(ln.rest, name, body))
    fail(ln.number, "expected '" + ln.keyword + " name := ...'");
  auto& slot = ln.keyword == "def" ? defs.formulas : defs.modalities;
  if (!slot.emplace(name, body).second)
    fail(ln.number, "'" + name + "' is defined twice");
  return true;
}

std::size_t state_index_of(const std::vector<std::string>& names,
                           const std::string& name, int line) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(line, "unknown state '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

void read_states(const Line& ln, std::vector<std::string>& states) {
  if (!states.empty()) fail(ln.number, "states are declared twice");
  states = split_words(ln.rest);
  if (states.empty()) fail(ln.number, "states line is empty");
  for (const auto& s : states) {
    if (!valid_name(s)) fail(ln.number, "bad state name '" + s + "'");
    if (std::count(states.begin(), states.end(), s) != 1)
      fail(ln.number, "state '" + s + "' is declared twice");
  }
}

void read_initial(const Line& ln, const std::vector<std::string>& states,
                  std::vector<std::string>& initial) {
  auto words = split_words(ln.rest);
  if (words.empty()) fail(ln.number, "initial line is empty");
  for (const auto& w : words) {
    state_index_of(states, w, ln.number);
    if (std::find(initial.begin(), initial.end(), w) == initial.end())
      initial.push_back(w);
  }
}

void load_kripke(const std::vector<Line>& lines, LoadedModel& out) {
  auto& k = out.kripke;
  std::vector<bool> seen;
  for (const auto& ln : lines) {
    if (take_def_line(ln, out.defs)) continue;
    if (ln.keyword == "states") {
      read_states(ln, k.states);
      k.succ.assign(k.states.size(), {});
      seen.assign(k.states.size(), false);
    } else if (ln.keyword == "edges") {
      if (k.states.empty()) fail(ln.number, "states must come first");
      auto colon = ln.rest.find(':');
      if (colon == std::string::npos) fail(ln.number, "expected 'edges s: ...'");
      auto head = split_words(ln.rest.substr(0, colon));
      if (head.size() != 1) fail(ln.number, "expected one source state");
      std::size_t s = state_index_of(k.states, head[0], ln.number);
      if (seen[s]) fail(ln.number, "edges for '" + head[0] + "' given twice");
      seen[s] = true;
      for (const auto& t : split_words(ln.rest.substr(colon + 1)))
        k.succ[s].push_back(state_index_of(k.states, t, ln.number));
    } else if (ln.keyword == "initial") {
      read_initial(ln, k.states, out.initial);
    } else {
      fail(ln.number, "unknown line '" + ln.keyword + "' in a kripke model");
    }
  }
  if (k.states.empty()) fail(0, "kripke model has no states");
}

void load_lts(const std::vector<Line>& lines, LoadedModel& out) {
  auto& l = out.lts;
  for (const auto& ln : lines) {
    if (take_def_line(ln, out.defs)) continue;
    if (ln.keyword == "states") {
      read_states(ln, l.states);
    } else if (ln.keyword == "labels") {
      if (!l.labels.empty()) fail(ln.number, "labels are declared twice");
      l.labels = split_words(ln.rest);
      if (l.labels.empty()) fail(ln.number, "labels line is empty");
      for (const auto& a : l.labels)
        if (std::count(l.labels.begin(), l.labels.end(), a) != 1)
          fail(ln.number, "label '" + a + "' is declared twice");
    } else if (ln.keyword == "trans") {
      if (l.states.empty() || l.labels.empty())
        fail(ln.number, "states and labels must come first");
      if (l.succ.empty())
        l.succ.assign(l.states.size(),
                      std::vector<std::vector<std::size_t>>(l.labels.size()));
      auto colon = ln.rest.find(':');
      if (colon == std::string::npos)
        fail(ln.number, "expected 'trans s a: ...'");
      auto head = split_words(ln.rest.substr(0, colon));
      if (head.size() != 2) fail(ln.number, "expected 'trans s a: ...'");
      std::size_t s = state_index_of(l.states, head[0], ln.number);
      std::size_t a = state_index_of(l.labels, head[1], ln.number);
      if (!l.succ[s][a].empty())
        fail(ln.number, "transitions for this pair are given twice");
      for (const auto& t : split_words(ln.rest.substr(colon + 1)))
        l.succ[s][a].push_back(state_index_of(l.states, t, ln.number));
    } else if (ln.keyword == "initial") {
      read_initial(ln, l.states, out.initial);
    } else {
      fail(ln.number, "unknown line '" + ln.keyword + "' in an lts model");
    }
  }
  if (l.states.empty()) fail(0, "lts model has no states");
  if (l.labels.empty()) fail(0, "lts model has no labels");
  if (l.succ.empty())
    l.succ.assign(l.states.size(),
                  std::vector<std::vector<std::size_t>>(l.labels.size()));
}

void load_markov(const std::vector<Line>& lines, LoadedModel& out,
                 double eps) {
  auto& mc = out.markov;
  std::vector<bool> seen;
  for (const auto& ln : lines) {
    if (take_def_line(ln, out.defs)) continue;
    if (ln.keyword == "states") {
      read_states(ln, mc.states);
      mc.trans.assign(mc.states.size(), {});
      seen.assign(mc.states.size(), false);
    } else if (ln.keyword == "dist") {
      if (mc.states.empty()) fail(ln.number, "states must come first");
      auto colon = ln.rest.find(':');
      if (colon == std::string::npos) fail(ln.number, "expected 'dist s: ...'");
      auto head = split_words(ln.rest.substr(0, colon));
      if (head.size() != 1) fail(ln.number, "expected one source state");
      std::size_t s = state_index_of(mc.states, head[0], ln.number);
      if (seen[s]) fail(ln.number, "dist for '" + head[0] + "' given twice");
      seen[s] = true;
      std::istringstream entries(ln.rest.substr(colon + 1));
      std::string entry;
      double total = 0.0;
      while (std::getline(entries, entry, ',')) {
        auto words = split_words(entry);
        if (words.size() != 2)
          fail(ln.number, "each dist entry is 'target probability'");
        std::size_t t = state_index_of(mc.states, words[0], ln.number);
        double p = parse_number(words[1], ln.number);
        if (p < 0.0) fail(ln.number, "negative probability");
        mc.trans[s].push_back({t, p});
        total += p;
      }
      if (std::abs(total - 1.0) > eps)
        fail(ln.number, "probabilities for '" + head[0] +
                            "' sum to " + format_double(total));
    } else if (ln.keyword == "initial") {
      read_initial(ln, mc.states, out.initial);
    } else {
      fail(ln.number, "unknown line '" + ln.keyword + "' in a markov model");
    }
  }
  if (mc.states.empty()) fail(0, "markov model has no states");
  for (std::size_t s = 0; s < mc.states.size(); ++s)
    if (mc.trans[s].empty())
      fail(0, "state '" + mc.states[s] + "' has no dist line");
}

void load_quantum(const std::vector<Line>& lines, LoadedModel& out,
                  const ModelLoadOptions& opt) {
  out.quantum = std::make_unique<QuantumModel>();
  QuantumModel& m = *out.quantum;
  std::map<std::string, ExprVal> env;
  bool installed = false;
  std::size_t qubits = 0;
  std::optional<double> file_eps;
  std::optional<std::size_t> file_max;
  bool have_carrier = false;

  auto install = [&](int line) {
    if (installed) return;
    if (qubits == 0) fail(line, "qubits must be declared before definitions");
    m.qubits = qubits;
    if (opt.epsilon) {
      m.tol.eps = *opt.epsilon;
      m.tol.phase = *opt.epsilon;
    } else if (file_eps) {
      m.tol.eps = *file_eps;
      m.tol.phase = *file_eps;
    }
    if (opt.max_carrier)
      m.max_carrier = *opt.max_carrier;
    else if (file_max)
      m.max_carrier = *file_max;
    install_quantum(m);
    installed = true;
  };

  auto eval = [&](const std::string& body, int line) {
    return ExprParser(body, line, env, m.qubits).parse();
  };

  for (const auto& ln : lines) {
    if (take_def_line(ln, out.defs)) continue;
    if (ln.keyword == "qubits") {
      if (installed) fail(ln.number, "qubits must precede all definitions");
      if (qubits != 0) fail(ln.number, "qubits is declared twice");
      auto words = split_words(ln.rest);
      if (words.size() != 1) fail(ln.number, "expected 'qubits n'");
      double q = parse_number(words[0], ln.number);
      if (q < 1 || q > 5 || q != std::floor(q))
        fail(ln.number, "qubits must be an integer from 1 to 5");
      qubits = static_cast<std::size_t>(q);
    } else if (ln.keyword == "tolerance") {
      if (installed) fail(ln.number, "tolerance must precede all definitions");
      auto words = split_words(ln.rest);
      if (words.size() != 1) fail(ln.number, "expected 'tolerance eps'");
      double e = parse_number(words[0], ln.number);
      if (e <= 0 || e > 0.1) fail(ln.number, "tolerance out of range");
      file_eps = e;
    } else if (ln.keyword == "max-states") {
      if (installed) fail(ln.number, "max-states must precede all definitions");
      auto words = split_words(ln.rest);
      if (words.size() != 1) fail(ln.number, "expected 'max-states n'");
      double v = parse_number(words[0], ln.number);
      if (v < 1 || v != std::floor(v)) fail(ln.number, "bad max-states");
      file_max = static_cast<std::size_t>(v);
    } else if (ln.keyword == "scalar" || ln.keyword == "state" ||
               ln.keyword == "obs" || ln.keyword == "unitary") {
      install(ln.number);
      std::string name, body;
      if (!split_define(ln.rest, name, body))
        fail(ln.number, "expected '" + ln.keyword + " name := ...'");
      if (env.count(name)) fail(ln.number, "'" + name + "' is defined twice");
      ExprVal v = eval(body, ln.number);
      try {
        if (ln.keyword == "scalar") {
          if (v.kind != ExprVal::kScalar || std::abs(v.s.imag()) > 1e-12)
            fail(ln.number, "scalar '" + name + "' must be a real number");
          m.scalars.emplace(name, v.s.real());
        } else if (ln.keyword == "state") {
          if (v.kind != ExprVal::kVec)
            fail(ln.number, "state '" + name + "' must be a ket expression");
          m.add_state_const(name, v.v);
        } else if (ln.keyword == "obs") {
          if (v.kind != ExprVal::kMat)
            fail(ln.number, "obs '" + name + "' must be an operator");
          m.add_observable(name, v.m);
        } else {
          if (v.kind != ExprVal::kMat)
            fail(ln.number, "unitary '" + name + "' must be an operator");
          m.add_unitary(name, v.m);
        }
      } catch (const ModelError& e) {
        fail(ln.number, e.what());
      }
      env.emplace(name, std::move(v));
    } else if (ln.keyword == "carrier") {
      install(ln.number);
      auto words = split_words(ln.rest);
      if (words.empty()) fail(ln.number, "carrier line is empty");
      for (const auto& w : words) {
        auto it = m.state_consts.find(w);
        if (it == m.state_consts.end())
          fail(ln.number, "carrier names unknown state '" + w + "'");
        try {
          m.add_carrier_state(w, it->second);
        } catch (const ModelError& e) {
          fail(ln.number, e.what());
        }
      }
      have_carrier = true;
    } else if (ln.keyword == "initial") {
      if (!have_carrier) fail(ln.number, "carrier must come before initial");
      auto words = split_words(ln.rest);
      if (words.empty()) fail(ln.number, "initial line is empty");
      for (const auto& w : words) {
        std::size_t idx = state_index_of(m.state_names, w, ln.number);
        if (idx >= m.declared)
          fail(ln.number, "initial state '" + w + "' is not declared");
        if (std::find(m.initial.begin(), m.initial.end(), idx) ==
            m.initial.end()) {
          m.initial.push_back(idx);
          out.initial.push_back(w);
        }
      }
    } else {
      fail(ln.number, "unknown line '" + ln.keyword + "' in a quantum model");
    }
  }
  if (!have_carrier) fail(0, "quantum model needs a carrier line");
  if (m.initial.empty()) {
    m.initial.push_back(0);
    out.initial.push_back(m.state_names[0]);
  }
  m.defs = out.defs;
}

}  // namespace

const std::vector<std::string>& LoadedModel::state_names() const {
  switch (kind) {
    case ModelKind::kKripke: return kripke.states;
    case ModelKind::kLts: return lts.states;
    case ModelKind::kMarkov: return markov.states;
    default: return quantum->state_names;
  }
}

std::optional<std::size_t> LoadedModel::state_index(
    const std::string& name) const {
  const auto& names = state_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

LoadedModel load_model(const std::string& text, const ModelLoadOptions& opt) {
  auto lines = logical_lines(text);
  if (lines.empty()) throw ParseError("empty model file", 1, 1);
  if (lines.front().keyword != "model")
    fail(lines.front().number, "a model file starts with 'model <kind>'");
  auto kind_words = split_words(lines.front().rest);
  if (kind_words.size() != 1)
    fail(lines.front().number, "expected 'model kripke|lts|markov|quantum'");
  const std::string& kind = kind_words[0];
  std::vector<Line> rest(lines.begin() + 1, lines.end());

  LoadedModel out;
  out.epsilon = opt.epsilon.value_or(1e-9);
  if (kind == "kripke") {
    out.kind = ModelKind::kKripke;
    load_kripke(rest, out);
  } else if (kind == "lts") {
    out.kind = ModelKind::kLts;
    load_lts(rest, out);
  } else if (kind == "markov") {
    out.kind = ModelKind::kMarkov;
    load_markov(rest, out, out.epsilon);
  } else if (kind == "quantum") {
    out.kind = ModelKind::kQuantum;
    load_quantum(rest, out, opt);
  } else {
    fail(lines.front().number, "unknown model kind '" + kind + "'");
  }
  if (out.kind != ModelKind::kQuantum && out.initial.empty() &&
      !out.state_names().empty())
    out.initial.push_back(out.state_names()[0]);
  return out;
}

LoadedModel load_model_file(const std::string& path,
                            const ModelLoadOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str(), opt);
}

}  // namespace fibcoalg
