// Shared token stream for the formula grammar and model file expressions.
// Internal to the library; not installed.
#pragma once

#include <cctype>
#include <string>

#include "fibcoalg/common.hpp"

namespace fibcoalg {
namespace lexinternal {

enum class Tok {
  kEnd,
  kName,
  kNumber,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kLBrace,
  kRBrace,
  kLAngle,
  kRAngle,
  kComma,
  kSemi,
  kAmp,
  kBar,
  kBang,
  kAt,
  kCaret,
  kDot,
  kStar,
  kSlash,
  kMinus,
  kPlus,
  kArrow,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text, int first_line = 1)
      : text_(text), line_(first_line) {
    advance();
  }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_space();
    cur_ = Token{};
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= text_.size()) {
      cur_.kind = Tok::kEnd;
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        bump();
      }
      cur_.kind = Tok::kName;
      cur_.text = text_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        bump();
      }
      if (pos_ < text_.size() && text_[pos_] == '.') {
        bump();
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          bump();
        }
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        size_t mark = pos_;
        bump();
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
          bump();
        }
        if (pos_ < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            bump();
          }
        } else {
          pos_ = mark;  // 'e' belongs to a following name, not an exponent
        }
      }
      cur_.kind = Tok::kNumber;
      cur_.text = text_.substr(start, pos_ - start);
      cur_.number = std::stod(cur_.text);
      return;
    }
    bump();
    switch (c) {
      case '(': cur_.kind = Tok::kLParen; return;
      case ')': cur_.kind = Tok::kRParen; return;
      case '[': cur_.kind = Tok::kLBracket; return;
      case ']': cur_.kind = Tok::kRBracket; return;
      case '{': cur_.kind = Tok::kLBrace; return;
      case '}': cur_.kind = Tok::kRBrace; return;
      case '<': cur_.kind = Tok::kLAngle; return;
      case '>': cur_.kind = Tok::kRAngle; return;
      case ',': cur_.kind = Tok::kComma; return;
      case ';': cur_.kind = Tok::kSemi; return;
      case '&': cur_.kind = Tok::kAmp; return;
      case '|': cur_.kind = Tok::kBar; return;
      case '!': cur_.kind = Tok::kBang; return;
      case '@': cur_.kind = Tok::kAt; return;
      case '^': cur_.kind = Tok::kCaret; return;
      case '.': cur_.kind = Tok::kDot; return;
      case '*': cur_.kind = Tok::kStar; return;
      case '/': cur_.kind = Tok::kSlash; return;
      case '+': cur_.kind = Tok::kPlus; return;
      case '-':
        if (pos_ < text_.size() && text_[pos_] == '>') {
          bump();
          cur_.kind = Tok::kArrow;
        } else {
          cur_.kind = Tok::kMinus;
        }
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         cur_.line, cur_.col);
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

}  // namespace lexinternal
}  // namespace fibcoalg
