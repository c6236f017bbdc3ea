#include "fibcoalg/parser.hpp"

#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "fibcoalg/signature.hpp"
#include "lexer_internal.hpp"

namespace fibcoalg {

namespace {

using lexinternal::Lexer;
using lexinternal::Tok;
using lexinternal::Token;

class Parser {
 public:
  Parser(const std::string& text, const FibredSignature& sig,
         const Definitions& defs)
      : lex_(text), sig_(sig), defs_(defs) {}

  FormulaPtr formula_document(std::optional<FibObject> expected) {
    FormulaPtr f = formula(expected);
    expect_end();
    return f;
  }

  ModalityPtr modality_document() {
    ModalityPtr e = modality();
    expect_end();
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = lex_.peek();
    throw ParseError(msg, t.line, t.col);
  }

  Token expect(Tok kind, const char* what) {
    if (lex_.peek().kind != kind) fail(std::string("expected ") + what);
    return lex_.take();
  }

  void expect_end() {
    if (lex_.peek().kind != Tok::kEnd) fail("trailing input after expression");
  }

  bool accept(Tok kind) {
    if (lex_.peek().kind != kind) return false;
    lex_.take();
    return true;
  }

  bool peek_is_name(const char* word) const {
    return lex_.peek().kind == Tok::kName && lex_.peek().text == word;
  }

  // ---- formulas -----------------------------------------------------------

  FormulaPtr formula(std::optional<FibObject> expected) {
    FormulaPtr lhs = disjunction(expected);
    if (accept(Tok::kArrow)) {
      FormulaPtr rhs = formula(expected);
      return Formula::implies(lhs, rhs);
    }
    return lhs;
  }

  FormulaPtr disjunction(std::optional<FibObject> expected) {
    FormulaPtr f = conjunction(expected);
    while (accept(Tok::kBar)) {
      f = Formula::disj({f, conjunction(expected)});
    }
    return f;
  }

  FormulaPtr conjunction(std::optional<FibObject> expected) {
    FormulaPtr f = unary(expected);
    if (lex_.peek().kind != Tok::kAmp) return f;
    std::vector<FormulaPtr> parts{f};
    while (accept(Tok::kAmp)) {
      parts.push_back(unary(expected));
    }
    return Formula::conj(std::move(parts));
  }

  FormulaPtr unary(std::optional<FibObject> expected) {
    if (accept(Tok::kBang)) return Formula::neg(unary(expected));
    return atom(expected);
  }

  FormulaPtr atom(std::optional<FibObject> expected) {
    const Token& t = lex_.peek();
    if (t.kind == Tok::kLParen) {
      lex_.take();
      FormulaPtr f = formula(expected);
      expect(Tok::kRParen, "')'");
      return f;
    }
    if (t.kind == Tok::kLAngle) {
      lex_.take();
      ModalityPtr head = modality();
      expect(Tok::kRAngle, "'>'");
      return apply_head(std::move(head));
    }
    if (t.kind != Tok::kName) fail("expected a formula");
    Token name = lex_.take();
    if (name.text == "T" || name.text == "true") {
      return Formula::top(top_fibre(name, expected));
    }
    if (name.text == "F" || name.text == "false") {
      return Formula::bottom(top_fibre(name, expected));
    }
    if (name.text == "and" || name.text == "or") {
      expect(Tok::kLParen, "'('");
      std::vector<FormulaPtr> parts;
      if (lex_.peek().kind != Tok::kRParen) {
        parts.push_back(formula(expected));
        while (accept(Tok::kComma)) parts.push_back(formula(expected));
      }
      expect(Tok::kRParen, "')'");
      if (parts.empty()) {
        throw ParseError(name.text + "() needs at least one operand",
                         name.line, name.col);
      }
      if (name.text == "and") return Formula::conj(std::move(parts));
      return Formula::disj(std::move(parts));
    }
    if (name.text == "adapt") {
      expect(Tok::kLParen, "'('");
      MorphismPtr m = morphism_expr();
      expect(Tok::kSemi, "';'");
      MorphismType mt = morphism_type(*m, sig_);
      FormulaPtr inner = formula(mt.target);
      expect(Tok::kRParen, "')'");
      return Formula::adapt(m, inner);
    }
    if (auto it = defs_.formulas.find(name.text); it != defs_.formulas.end()) {
      return expand_formula_def(name, it->second, expected);
    }
    if (auto it = defs_.modalities.find(name.text);
        it != defs_.modalities.end()) {
      return apply_head(expand_modality_def(name, it->second));
    }
    std::vector<Param> params = maybe_params();
    if (auto it = sig_.modality_macros.find(name.text);
        it != sig_.modality_macros.end()) {
      return apply_head(it->second(params));
    }
    if (sig_.modalities.count(name.text)) {
      return apply_head(ModalityExpr::base(name.text, std::move(params)));
    }
    if (sig_.morphism_gens.count(name.text) ||
        sig_.morphism_schemata.count(name.text)) {
      MorphismPtr m = Morphism::gen(name.text, std::move(params));
      expect(Tok::kLParen, "'(' for the adapted formula");
      MorphismType mt = morphism_type(*m, sig_);
      FormulaPtr inner = formula(mt.target);
      expect(Tok::kRParen, "')'");
      return Formula::adapt(m, inner);
    }
    throw ParseError("unknown name '" + name.text + "'", name.line, name.col);
  }

  FibObject top_fibre(const Token& name, std::optional<FibObject> expected) {
    if (accept(Tok::kAt)) return object_word();
    if (expected) return *expected;
    throw ParseError("cannot infer the object of bare '" + name.text +
                         "' here; write " + name.text + "@Obj",
                     name.line, name.col);
  }

  FormulaPtr apply_head(ModalityPtr head) {
    ModalityType mt = type_of_modality(*head, sig_);
    std::vector<FormulaPtr> args;
    if (accept(Tok::kLParen)) {
      if (lex_.peek().kind != Tok::kRParen) {
        args.push_back(formula(mt.fibre));
        while (accept(Tok::kComma)) args.push_back(formula(mt.fibre));
      }
      expect(Tok::kRParen, "')'");
    }
    return Formula::apply(std::move(head), std::move(args));
  }

  FormulaPtr expand_formula_def(const Token& name, const std::string& body,
                                std::optional<FibObject> expected) {
    if (!expanding_.insert(name.text).second) {
      throw ParseError("definition '" + name.text + "' is cyclic", name.line,
                       name.col);
    }
    Parser sub(body, sig_, defs_);
    sub.expanding_ = expanding_;
    FormulaPtr f = sub.formula_document(expected);
    expanding_.erase(name.text);
    return f;
  }

  ModalityPtr expand_modality_def(const Token& name, const std::string& body) {
    if (!expanding_.insert(name.text).second) {
      throw ParseError("definition '" + name.text + "' is cyclic", name.line,
                       name.col);
    }
    Parser sub(body, sig_, defs_);
    sub.expanding_ = expanding_;
    ModalityPtr e = sub.modality_document();
    expanding_.erase(name.text);
    return e;
  }

  // ---- modality expressions ----------------------------------------------

  ModalityPtr modality() {
    ModalityPtr e = modality_postfix();
    if (lex_.peek().kind != Tok::kAmp) return e;
    std::vector<ModalityPtr> parts{e};
    while (accept(Tok::kAmp)) parts.push_back(modality_postfix());
    return ModalityExpr::conj(std::move(parts));
  }

  ModalityPtr modality_postfix() {
    ModalityPtr e = modality_unary();
    for (;;) {
      if (accept(Tok::kCaret)) {
        MorphismPtr m = morphism_ref();
        e = superscript(std::move(e), std::move(m));
      } else if (accept(Tok::kDot)) {
        ModalityPtr second = modality_unary();
        e = ModalityExpr::then(e, second);
      } else if (accept(Tok::kAt)) {
        Token it = expect(Tok::kNumber, "a slot index");
        expect(Tok::kSlash, "'/'");
        Token kt = expect(Tok::kNumber, "an arity");
        size_t index = static_cast<size_t>(it.number);
        size_t arity = static_cast<size_t>(kt.number);
        if (index < 1 || index > arity) {
          throw ParseError("weakening slot out of range", it.line, it.col);
        }
        e = ModalityExpr::weaken(e, arity, index - 1);
      } else {
        return e;
      }
    }
  }

  ModalityPtr modality_unary() {
    if (accept(Tok::kBang)) return ModalityExpr::neg(modality_unary());
    return modality_atom();
  }

  ModalityPtr modality_atom() {
    if (accept(Tok::kLParen)) {
      ModalityPtr e = modality();
      expect(Tok::kRParen, "')'");
      return e;
    }
    if (lex_.peek().kind != Tok::kName) fail("expected a modality");
    Token name = lex_.take();
    if (name.text == "and") {
      expect(Tok::kLParen, "'('");
      std::vector<ModalityPtr> parts;
      parts.push_back(modality());
      while (accept(Tok::kComma)) parts.push_back(modality());
      expect(Tok::kRParen, "')'");
      return ModalityExpr::conj(std::move(parts));
    }
    if (auto it = defs_.modalities.find(name.text);
        it != defs_.modalities.end()) {
      return expand_modality_def(name, it->second);
    }
    std::vector<Param> params = maybe_params();
    if (auto it = sig_.modality_macros.find(name.text);
        it != sig_.modality_macros.end()) {
      return it->second(params);
    }
    if (!sig_.modalities.count(name.text)) {
      throw ParseError("unknown modality '" + name.text + "'", name.line,
                       name.col);
    }
    return ModalityExpr::base(name.text, std::move(params));
  }

  // A superscript morphism may land in a proper prefix of the operand's
  // object; the remaining word is restored by whiskering on the right.
  ModalityPtr superscript(ModalityPtr e, MorphismPtr m) {
    ModalityType et = type_of_modality(*e, sig_);
    MorphismType mt = morphism_type(*m, sig_);
    const auto& have = mt.target.word;
    const auto& want = et.fibre.word;
    if (have != want && have.size() < want.size() &&
        std::equal(have.begin(), have.end(), want.begin())) {
      FibObject rest{std::vector<std::string>(want.begin() + have.size(),
                                              want.end())};
      m = Morphism::whisker(FibObject::unit(), m, rest);
    }
    return ModalityExpr::sup(std::move(e), std::move(m));
  }

  // ---- morphism expressions ----------------------------------------------

  MorphismPtr morphism_expr() {
    MorphismPtr m = morphism_ref();
    while (accept(Tok::kStar)) {
      MorphismPtr rhs = morphism_ref();
      m = Morphism::compose(m, rhs);  // left factor applies after
    }
    return m;
  }

  MorphismPtr morphism_ref() {
    if (accept(Tok::kLParen)) {
      MorphismPtr m = morphism_expr();
      expect(Tok::kRParen, "')'");
      return m;
    }
    if (lex_.peek().kind != Tok::kName) fail("expected a morphism");
    Token name = lex_.take();
    if (name.text == "id") {
      expect(Tok::kAt, "'@'");
      return Morphism::id(object_word());
    }
    if (name.text == "wh") {
      expect(Tok::kLParen, "'('");
      FibObject left = object_word();
      expect(Tok::kSemi, "';'");
      MorphismPtr inner = morphism_expr();
      expect(Tok::kSemi, "';'");
      FibObject right = object_word();
      expect(Tok::kRParen, "')'");
      return Morphism::whisker(left, inner, right);
    }
    std::vector<Param> params = maybe_params();
    if (!sig_.morphism_gens.count(name.text) &&
        !sig_.morphism_schemata.count(name.text)) {
      throw ParseError("unknown morphism '" + name.text + "'", name.line,
                       name.col);
    }
    return Morphism::gen(name.text, std::move(params));
  }

  FibObject object_word() {
    FibObject obj = FibObject::unit();
    Token first = expect(Tok::kName, "an object name");
    obj = obj.tensor(resolve(first));
    while (accept(Tok::kStar)) {
      Token next = expect(Tok::kName, "an object name");
      obj = obj.tensor(resolve(next));
    }
    return obj;
  }

  FibObject resolve(const Token& name) {
    auto obj = sig_.resolve_object(name.text);
    if (!obj) {
      throw ParseError("unknown object '" + name.text + "'", name.line,
                       name.col);
    }
    return *obj;
  }

  // ---- parameters ---------------------------------------------------------

  std::vector<Param> maybe_params() {
    Tok close;
    if (accept(Tok::kLBracket)) {
      close = Tok::kRBracket;
    } else if (accept(Tok::kLBrace)) {
      close = Tok::kRBrace;
    } else {
      return {};
    }
    std::vector<Param> params;
    params.push_back(param());
    while (accept(Tok::kComma)) params.push_back(param());
    expect(close, close == Tok::kRBracket ? "']'" : "'}'");
    return params;
  }

  Param param() {
    if (lex_.peek().kind == Tok::kName) {
      return Param{lex_.take().text};
    }
    double sign = 1.0;
    while (lex_.peek().kind == Tok::kMinus || lex_.peek().kind == Tok::kPlus) {
      if (lex_.take().kind == Tok::kMinus) sign = -sign;
    }
    Token num = expect(Tok::kNumber, "a parameter");
    double v = sign * num.number;
    if (accept(Tok::kSlash)) {
      Token den = expect(Tok::kNumber, "a denominator");
      if (den.number == 0.0) {
        throw ParseError("division by zero in parameter", den.line, den.col);
      }
      v /= den.number;
    }
    return Param{v};
  }

  Lexer lex_;
  const FibredSignature& sig_;
  const Definitions& defs_;
  std::set<std::string> expanding_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const FibredSignature& sig,
                         const Definitions& defs,
                         std::optional<FibObject> expected) {
  Parser p(text, sig, defs);
  return p.formula_document(std::move(expected));
}

ModalityPtr parse_modality(const std::string& text, const FibredSignature& sig,
                           const Definitions& defs) {
  Parser p(text, sig, defs);
  return p.modality_document();
}

std::string strip_definitions(const std::string& document, Definitions& defs) {
  std::istringstream in(document);
  std::string line;
  std::string body;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = line;
    if (auto pos = stripped.find('#'); pos != std::string::npos) {
      stripped.erase(pos);
    }
    size_t first = stripped.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::istringstream ls(stripped);
    std::string head;
    ls >> head;
    if (head == "def" || head == "defm") {
      std::string name;
      ls >> name;
      std::string assign;
      ls >> assign;
      if (name.empty() || assign != ":=") {
        throw ParseError("malformed definition line: " + line, line_no, 1);
      }
      std::string rest;
      std::getline(ls, rest);
      size_t rb = rest.find_first_not_of(" \t");
      size_t re = rest.find_last_not_of(" \t");
      if (rb == std::string::npos) {
        throw ParseError("malformed definition line: " + line, line_no, 1);
      }
      rest = rest.substr(rb, re - rb + 1);
      if (head == "def") {
        defs.formulas[name] = rest;
      } else {
        defs.modalities[name] = rest;
      }
      continue;
    }
    body += stripped;
    body += '\n';
  }
  return body;
}

}  // namespace fibcoalg
