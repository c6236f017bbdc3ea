#include "fibcoalg/value.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fibcoalg/linalg.hpp"

namespace fibcoalg {

namespace {

int cmp_double(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }

int cmp_label(const Label& a, const Label& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (std::holds_alternative<double>(a))
    return cmp_double(std::get<double>(a), std::get<double>(b));
  return std::get<std::string>(a).compare(std::get<std::string>(b));
}

int cmp_table_key(const TableKey& a, const TableKey& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (std::holds_alternative<std::string>(a))
    return std::get<std::string>(a).compare(std::get<std::string>(b));
  const auto& ma = *std::get<MatrixHandle>(a);
  const auto& mb = *std::get<MatrixHandle>(b);
  if (ma.n != mb.n) return ma.n < mb.n ? -1 : 1;
  for (std::size_t i = 0; i < ma.a.size(); ++i) {
    if (int c = cmp_double(ma.a[i].real(), mb.a[i].real())) return c;
    if (int c = cmp_double(ma.a[i].imag(), mb.a[i].imag())) return c;
  }
  return 0;
}

}  // namespace

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end(), value_lt);
  elems.erase(std::unique(elems.begin(), elems.end(),
                          [](const Value& a, const Value& b) { return value_eq(a, b); }),
              elems.end());
  return Value(Node{Set{std::move(elems)}});
}

Value Value::dist(std::vector<std::pair<Value, double>> mass, double eps) {
  std::sort(mass.begin(), mass.end(),
            [](const auto& a, const auto& b) { return value_lt(a.first, b.first); });
  std::vector<std::pair<Value, double>> merged;
  for (auto& [v, p] : mass) {
    if (p < -eps) throw ShapeError("negative probability in distribution");
    if (!merged.empty() && value_eq(merged.back().first, v))
      merged.back().second += p;
    else
      merged.emplace_back(std::move(v), p);
  }
  double total = 0;
  for (auto it = merged.begin(); it != merged.end();) {
    if (it->second <= 0) { it = merged.erase(it); continue; }
    total += it->second;
    ++it;
  }
  if (std::abs(total - 1.0) > eps)
    throw ShapeError("distribution mass sums to " + format_double(total) + ", not 1");
  return Value(Node{Dist{std::move(merged)}});
}

Value Value::table(std::vector<std::pair<TableKey, Value>> rows,
                   std::function<Value(const TableKey&)> lookup_fn) {
  if (!lookup_fn) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return cmp_table_key(a.first, b.first) < 0;
    });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (cmp_table_key(rows[i - 1].first, rows[i].first) == 0)
        throw ShapeError("duplicate key in table: " + table_key_to_string(rows[i].first));
  }
  return Value(Node{Table{std::move(rows), std::move(lookup_fn)}});
}

const char* Value::kind_name() const {
  switch (node_->index()) {
    case 0: return "base state";
    case 1: return "set";
    case 2: return "distribution";
    case 3: return "pair";
    case 4: return "table";
    default: return "tuple";
  }
}

Value Value::lookup(const TableKey& key, double mat_eps) const {
  const auto& t = as<Table>("table");
  for (const auto& [k, v] : t.rows)
    if (table_key_eq(k, key, mat_eps)) return v;
  if (t.lookup_fn) return t.lookup_fn(key);
  throw ModelError("table has no entry for key " + table_key_to_string(key));
}

int compare_values(const Value& a, const Value& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return na.index() < nb.index() ? -1 : 1;
  switch (na.index()) {
    case 0: {
      auto x = std::get<Value::BaseRef>(na).state, y = std::get<Value::BaseRef>(nb).state;
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case 1: {
      const auto& x = std::get<Value::Set>(na).elems;
      const auto& y = std::get<Value::Set>(nb).elems;
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (int c = compare_values(x[i], y[i])) return c;
      return 0;
    }
    case 2: {
      const auto& x = std::get<Value::Dist>(na).mass;
      const auto& y = std::get<Value::Dist>(nb).mass;
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (int c = compare_values(x[i].first, y[i].first)) return c;
        if (int c = cmp_double(x[i].second, y[i].second)) return c;
      }
      return 0;
    }
    case 3: {
      const auto& x = std::get<Value::Pairing>(na);
      const auto& y = std::get<Value::Pairing>(nb);
      if (int c = cmp_label(x.label, y.label)) return c;
      return compare_values(x.inner, y.inner);
    }
    case 4: {
      const auto& x = std::get<Value::Table>(na);
      const auto& y = std::get<Value::Table>(nb);
      if (x.lookup_fn || y.lookup_fn)
        throw ShapeError("lazy tables are not comparable");
      if (x.rows.size() != y.rows.size()) return x.rows.size() < y.rows.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.rows.size(); ++i) {
        if (int c = cmp_table_key(x.rows[i].first, y.rows[i].first)) return c;
        if (int c = compare_values(x.rows[i].second, y.rows[i].second)) return c;
      }
      return 0;
    }
    default: {
      const auto& x = std::get<Value::Tuple>(na).items;
      const auto& y = std::get<Value::Tuple>(nb).items;
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (int c = compare_values(x[i], y[i])) return c;
      return 0;
    }
  }
}

bool value_lt(const Value& a, const Value& b) { return compare_values(a, b) < 0; }

bool table_key_eq(const TableKey& a, const TableKey& b, double mat_eps) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<std::string>(a))
    return std::get<std::string>(a) == std::get<std::string>(b);
  const auto& ma = *std::get<MatrixHandle>(a);
  const auto& mb = *std::get<MatrixHandle>(b);
  if (ma.n != mb.n) return false;
  for (std::size_t i = 0; i < ma.a.size(); ++i)
    if (std::abs(ma.a[i] - mb.a[i]) > mat_eps) return false;
  return true;
}

bool value_approx_eq(const Value& a, const Value& b, double eps) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  switch (na.index()) {
    case 0:
      return std::get<Value::BaseRef>(na).state == std::get<Value::BaseRef>(nb).state;
    case 1: {
      const auto& x = std::get<Value::Set>(na).elems;
      const auto& y = std::get<Value::Set>(nb).elems;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!value_approx_eq(x[i], y[i], eps)) return false;
      return true;
    }
    case 2: {
      const auto& x = std::get<Value::Dist>(na).mass;
      const auto& y = std::get<Value::Dist>(nb).mass;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!value_approx_eq(x[i].first, y[i].first, eps)) return false;
        if (std::abs(x[i].second - y[i].second) > eps) return false;
      }
      return true;
    }
    case 3: {
      const auto& x = std::get<Value::Pairing>(na);
      const auto& y = std::get<Value::Pairing>(nb);
      if (x.label.index() != y.label.index()) return false;
      if (std::holds_alternative<double>(x.label)) {
        if (std::abs(std::get<double>(x.label) - std::get<double>(y.label)) > eps)
          return false;
      } else if (std::get<std::string>(x.label) != std::get<std::string>(y.label)) {
        return false;
      }
      return value_approx_eq(x.inner, y.inner, eps);
    }
    case 4: {
      const auto& x = std::get<Value::Table>(na);
      const auto& y = std::get<Value::Table>(nb);
      if (x.lookup_fn || y.lookup_fn)
        throw ShapeError("lazy tables are not comparable");
      if (x.rows.size() != y.rows.size()) return false;
      for (std::size_t i = 0; i < x.rows.size(); ++i) {
        if (!table_key_eq(x.rows[i].first, y.rows[i].first, eps)) return false;
        if (!value_approx_eq(x.rows[i].second, y.rows[i].second, eps)) return false;
      }
      return true;
    }
    default: {
      const auto& x = std::get<Value::Tuple>(na).items;
      const auto& y = std::get<Value::Tuple>(nb).items;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!value_approx_eq(x[i], y[i], eps)) return false;
      return true;
    }
  }
}

std::string table_key_to_string(const TableKey& k) {
  if (std::holds_alternative<std::string>(k)) return std::get<std::string>(k);
  const auto& m = *std::get<MatrixHandle>(k);
  return "<matrix " + std::to_string(m.n) + "x" + std::to_string(m.n) + ">";
}

std::string Value::str() const {
  std::ostringstream os;
  switch (node_->index()) {
    case 0:
      os << "#" << std::get<BaseRef>(*node_).state;
      break;
    case 1: {
      os << "{";
      const auto& e = std::get<Set>(*node_).elems;
      for (std::size_t i = 0; i < e.size(); ++i) os << (i ? ", " : "") << e[i].str();
      os << "}";
      break;
    }
    case 2: {
      os << "{";
      const auto& m = std::get<Dist>(*node_).mass;
      for (std::size_t i = 0; i < m.size(); ++i)
        os << (i ? ", " : "") << m[i].first.str() << ": " << format_double(m[i].second);
      os << "}";
      break;
    }
    case 3: {
      const auto& p = std::get<Pairing>(*node_);
      os << "(" << label_to_string(p.label) << ", " << p.inner.str() << ")";
      break;
    }
    case 4: {
      const auto& t = std::get<Table>(*node_);
      os << (t.lookup_fn ? "<lazy table" : "<table");
      for (const auto& [k, v] : t.rows) os << " " << table_key_to_string(k) << " -> " << v.str();
      os << ">";
      break;
    }
    default: {
      os << "(";
      const auto& it = std::get<Tuple>(*node_).items;
      for (std::size_t i = 0; i < it.size(); ++i) os << (i ? ", " : "") << it[i].str();
      os << ")";
    }
  }
  return os.str();
}

}  // namespace fibcoalg
