#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sysmine/error.hpp"

namespace sysmine {

using Sort = std::string;
using Value = std::string;
using Symbol = std::string;
using ValueTuple = std::vector<Value>;
using SortProfile = std::vector<Sort>;

struct FunctionSig {
  std::vector<Sort> args;
  Sort result;

  friend bool operator==(const FunctionSig&, const FunctionSig&) = default;
};

/// Sorts, sorted function symbols and sorted variables.
struct Signature {
  std::set<Sort> sorts;
  std::map<Symbol, FunctionSig> functions;
  std::map<std::string, Sort> variables;

  /// Throws UndeclaredSort if a function or variable mentions an unknown sort.
  void validate() const;
  /// Variables declared for `sort`, in name order.
  std::vector<std::string> variables_of(const Sort& sort) const;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// A signature together with finite carriers and total function tables.
class Structure {
 public:
  using Table = std::map<ValueTuple, Value>;

  Structure() = default;
  /// Throws UndeclaredSort, NonTotalTable, ValueOutsideCarrier, ParseError
  /// (duplicate carrier element).
  Structure(Signature signature, std::map<Sort, std::vector<Value>> carriers, std::map<Symbol, Table> tables);

  const Signature& signature() const noexcept { return signature_; }
  const std::map<Sort, std::vector<Value>>& carriers() const noexcept { return carriers_; }
  const std::vector<Value>& carrier(const Sort& sort) const;
  const std::map<Symbol, Table>& tables() const noexcept { return tables_; }

  bool in_carrier(const Sort& sort, const Value& value) const;
  /// Sorts whose carrier contains `value`.
  std::vector<Sort> sorts_of_value(const Value& value) const;
  /// The table lookup f(args). Throws UnknownSymbol, IllSorted.
  const Value& apply(const Symbol& function, const ValueTuple& args) const;

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  Signature signature_;
  std::map<Sort, std::vector<Value>> carriers_;
  std::map<Symbol, Table> tables_;
};

/// A first-order term: variable, constant (an element of a carrier, tagged with
/// that carrier's sort) or function application.
struct Term {
  enum class Kind { variable, constant, apply };

  Kind kind = Kind::variable;
  std::string name;  // variable name, constant value or function symbol
  Sort sort;         // constants only
  std::vector<Term> args;

  static Term var(std::string name);
  static Term constant(Value value, Sort sort);
  static Term apply(Symbol function, std::vector<Term> args);

  friend bool operator==(const Term&, const Term&) = default;
  friend bool operator<(const Term& a, const Term& b);
};

/// Arc inscriptions are tuples of terms; a bare term is a 1-tuple.
using TermTuple = std::vector<Term>;
using Valuation = std::map<std::string, Value>;

/// Throws IllSorted (with the path into the term), UnknownSymbol.
Sort sort_of(const Term& term, const Signature& signature);
SortProfile sort_of(const TermTuple& terms, const Signature& signature);

/// Homomorphic evaluation. Throws UnboundVariable, and IllSorted when an
/// argument value falls outside the declared argument carrier.
Value eval(const Term& term, const Structure& structure, const Valuation& beta);
ValueTuple eval(const TermTuple& terms, const Structure& structure, const Valuation& beta);

/// Free variables in first-occurrence order.
std::vector<std::string> variables_of(const TermTuple& terms);

/// β(v) lies in the carrier of v's sort for every bound variable in `sorts`.
/// Throws ValueOutsideCarrier, UnknownSymbol.
void check_valuation(const Valuation& beta, const std::map<std::string, Sort>& sorts, const Structure& structure);

/// Concrete syntax: `name`, `f(t1, ..., tk)`, `(t1, ..., tk)`. Names matching
/// `[A-Za-z][A-Za-z0-9_-]*` are written bare, anything else double-quoted.
std::string to_string(const Term& term);
std::string to_string(const TermTuple& terms);
std::string to_string(const ValueTuple& values);

/// Parses a term or tuple; a bare term yields a 1-tuple. A name followed by `(`
/// is a function symbol, a name in `variables` is a variable, anything else must
/// be an element of exactly one carrier. Throws ParseError, UnknownSymbol.
TermTuple parse_terms(std::string_view text, const Structure& structure,
                      const std::map<std::string, Sort>& variables);
Term parse_term(std::string_view text, const Structure& structure, const std::map<std::string, Sort>& variables);

/// `{"sorts": {sort: [values]}, "functions": {f: {"args": [...], "result": s,
/// "table": ...}}, "variables": {v: sort}}`. A unary table may be an object
/// `{arg: result}`; any arity may use rows `[[args...], result]`.
Structure parse_structure(std::istream& in);
Structure structure_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Structure& structure);

}  // namespace sysmine
