#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "fibcoalg/common.hpp"

namespace fibcoalg {

class Value;
struct ValueBaseRef;
struct ValueSet;
struct ValueDist;
struct ValuePairing;
struct ValueTable;
struct ValueTuple;

// Immutable runtime value inhabiting ⟦A⟧(X) for some object word A over
// a finite carrier X. Layers mirror the word: each generator contributes
// one constructor of nesting. Payload structs are defined right below
// the class; the recursion goes through this indirection.
class Value {
public:
  using BaseRef = ValueBaseRef;
  using Set = ValueSet;
  using Dist = ValueDist;
  using Pairing = ValuePairing;
  using Table = ValueTable;
  using Tuple = ValueTuple;
  using Node = std::variant<BaseRef, Set, Dist, Pairing, Table, Tuple>;

  Value();
  explicit Value(Node n);

  static Value base(std::size_t state);
  // Canonicalizes: sorts and deduplicates.
  static Value set(std::vector<Value> elems);
  // Canonicalizes and validates unit mass within eps; negative masses rejected.
  static Value dist(std::vector<std::pair<Value, double>> mass, double eps = 1e-9);
  static Value pairing(Label label, Value inner);
  static Value table(std::vector<std::pair<TableKey, Value>> rows,
                     std::function<Value(const TableKey&)> lookup_fn = nullptr);
  static Value tuple(std::vector<Value> items);

  const Node& node() const;
  template <class T>
  const T* get_if() const { return std::get_if<T>(node_.get()); }
  template <class T>
  const T& as(const char* what) const {
    const T* p = std::get_if<T>(node_.get());
    if (!p) throw ShapeError(std::string("expected ") + what + ", found " + kind_name());
    return *p;
  }

  const char* kind_name() const;

  // Table lookup: cached rows first (string keys exactly, matrix keys by
  // entrywise tolerance), then lookup_fn. Throws ModelError for missing keys.
  Value lookup(const TableKey& key, double mat_eps = 1e-9) const;

  std::string str() const;

private:
  std::shared_ptr<const Node> node_;
};

struct ValueBaseRef {
  std::size_t state;
};
struct ValueSet {  // canonical: sorted, duplicates removed
  std::vector<Value> elems;
};
struct ValueDist {  // canonical: sorted keys, masses merged; sums to 1
  std::vector<std::pair<Value, double>> mass;
};
struct ValuePairing {
  Label label;
  Value inner;
};
struct ValueTable {
  // Total when lookup_fn is absent; rows then cover the whole key
  // domain. A lazy table answers unseen keys through lookup_fn and is
  // recomputed idempotently rather than cached in place.
  std::vector<std::pair<TableKey, Value>> rows;
  std::function<Value(const TableKey&)> lookup_fn;
};
struct ValueTuple {
  std::vector<Value> items;
};

inline const Value::Node& Value::node() const { return *node_; }
inline Value::Value() : node_(std::make_shared<Node>(BaseRef{0})) {}
inline Value::Value(Node n) : node_(std::make_shared<Node>(std::move(n))) {}
inline Value Value::base(std::size_t state) { return Value(Node{BaseRef{state}}); }
inline Value Value::pairing(Label label, Value inner) {
  return Value(Node{Pairing{std::move(label), std::move(inner)}});
}
inline Value Value::tuple(std::vector<Value> items) {
  return Value(Node{Tuple{std::move(items)}});
}

// Total order used for canonical forms; doubles compared exactly.
// Lazy tables are ordered/compared only through their cached rows and
// reject comparison when either side has a lookup_fn.
int compare_values(const Value& a, const Value& b);
inline bool value_eq(const Value& a, const Value& b) { return compare_values(a, b) == 0; }
bool value_lt(const Value& a, const Value& b);

// Structural equality with eps slack on masses, real labels, and matrix
// keys; used by homomorphism checks.
bool value_approx_eq(const Value& a, const Value& b, double eps);

bool table_key_eq(const TableKey& a, const TableKey& b, double mat_eps);
std::string table_key_to_string(const TableKey& k);

// Membership predicate over the values of one space; arguments of
// predicate liftings.
using SubsetPred = std::function<bool(const Value&)>;

}  // namespace fibcoalg
