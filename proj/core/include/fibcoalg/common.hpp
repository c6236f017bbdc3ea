#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fibcoalg {

struct ComplexMatrix;
using MatrixHandle = std::shared_ptr<const ComplexMatrix>;

// Scalar attached to a pair value: a real outcome or a symbolic label.
using Label = std::variant<double, std::string>;

// Argument of a modality-symbol or morphism-generator family instance.
// Numbers cover probabilities/outcomes; strings name registry entries.
using Param = std::variant<double, std::string>;

// Key of a table value: finite-exponent tables use symbolic keys,
// observable tables use dense Hermitian matrices.
using TableKey = std::variant<std::string, MatrixHandle>;

struct Tolerances {
  double eps = 1e-9;           // probability / membership comparisons
  double herm = 1e-10;         // Hermiticity validation
  double offdiag = 1e-12;      // eigensolver convergence threshold
  double spectral = 1e-8;      // eigenvalue grouping & reconstruction
  double phase = 1e-9;         // state identity: overlap >= 1 - phase
};

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Surface text that does not lex/parse. CLI exit code 2.
class ParseError : public Error {
public:
  ParseError(std::string msg, std::size_t line, std::size_t col)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line), col(col) {}
  std::size_t line, col;
};

// Ill-typed formula, modality expression, or morphism. CLI exit code 3.
class TypeError : public Error {
public:
  TypeError(std::string location, std::string expected, std::string found)
      : Error("type error at " + location + ": expected " + expected + ", found " + found),
        location(std::move(location)), expected(std::move(expected)), found(std::move(found)) {}
  std::string location, expected, found;
};

// Carrier closure failure: missing successor or exhausted state budget.
// CLI exit code 4.
class ClosureError : public Error {
public:
  using Error::Error;
};

// Value does not inhabit the functor shape its context requires.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Registry lookup failures, malformed model declarations, numeric
// preconditions (non-unit states, non-Hermitian observables, ...).
class ModelError : public Error {
public:
  using Error::Error;
};

// Shortest decimal form that reparses to the same double (to_chars).
std::string format_double(double v);

std::string label_to_string(const Label& l);
std::string param_to_string(const Param& p);

}  // namespace fibcoalg
