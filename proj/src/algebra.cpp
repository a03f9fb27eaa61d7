#include "sysmine/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <istream>

namespace sysmine {

void Signature::validate() const {
  for (const auto& [name, sig] : functions) {
    for (const auto& s : sig.args) {
      if (!sorts.count(s)) throw Error(Errc::UndeclaredSort, s + " (argument of " + name + ")");
    }
    if (!sorts.count(sig.result)) throw Error(Errc::UndeclaredSort, sig.result + " (result of " + name + ")");
  }
  for (const auto& [name, s] : variables) {
    if (!sorts.count(s)) throw Error(Errc::UndeclaredSort, s + " (variable " + name + ")");
  }
}

std::vector<std::string> Signature::variables_of(const Sort& sort) const {
  std::vector<std::string> out;
  for (const auto& [name, s] : variables) {
    if (s == sort) out.push_back(name);
  }
  return out;
}

Structure::Structure(Signature signature, std::map<Sort, std::vector<Value>> carriers,
                     std::map<Symbol, Table> tables)
    : signature_(std::move(signature)), carriers_(std::move(carriers)), tables_(std::move(tables)) {
  signature_.validate();
  for (const auto& [sort, values] : carriers_) {
    if (!signature_.sorts.count(sort)) throw Error(Errc::UndeclaredSort, sort);
    std::set<Value> seen;
    for (const auto& v : values) {
      if (!seen.insert(v).second) throw Error(Errc::ParseError, "duplicate element '" + v + "' in carrier " + sort);
    }
  }
  for (const auto& sort : signature_.sorts) carriers_.try_emplace(sort);
  for (const auto& [name, table] : tables_) {
    if (!signature_.functions.count(name)) throw Error(Errc::UnknownSymbol, name);
  }
  for (const auto& [name, sig] : signature_.functions) {
    auto it = tables_.find(name);
    if (it == tables_.end()) throw Error(Errc::NonTotalTable, name + " has no table");
    const auto& table = it->second;
    for (const auto& [args, result] : table) {
      if (args.size() != sig.args.size()) throw Error(Errc::ParseError, name + ": row of wrong arity");
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (!in_carrier(sig.args[i], args[i])) {
          throw Error(Errc::ValueOutsideCarrier, name + ": argument '" + args[i] + "' not in " + sig.args[i]);
        }
      }
      if (!in_carrier(sig.result, result)) {
        throw Error(Errc::ValueOutsideCarrier, name + ": result '" + result + "' not in " + sig.result);
      }
    }
    std::size_t expected = 1;
    for (const auto& s : sig.args) expected *= carriers_.at(s).size();
    if (table.size() != expected) {
      // find a missing row to report
      ValueTuple row(sig.args.size());
      std::function<std::optional<ValueTuple>(std::size_t)> missing = [&](std::size_t i) -> std::optional<ValueTuple> {
        if (i == row.size()) return table.count(row) ? std::nullopt : std::optional(row);
        for (const auto& v : carriers_.at(sig.args[i])) {
          row[i] = v;
          if (auto r = missing(i + 1)) return r;
        }
        return std::nullopt;
      };
      auto row_missing = missing(0);
      throw Error(Errc::NonTotalTable, name + (row_missing ? " lacks " + to_string(*row_missing) : std::string()));
    }
  }
}

const std::vector<Value>& Structure::carrier(const Sort& sort) const {
  auto it = carriers_.find(sort);
  if (it == carriers_.end()) throw Error(Errc::UndeclaredSort, sort);
  return it->second;
}

bool Structure::in_carrier(const Sort& sort, const Value& value) const {
  auto it = carriers_.find(sort);
  return it != carriers_.end() && std::find(it->second.begin(), it->second.end(), value) != it->second.end();
}

std::vector<Sort> Structure::sorts_of_value(const Value& value) const {
  std::vector<Sort> out;
  for (const auto& [sort, values] : carriers_) {
    if (std::find(values.begin(), values.end(), value) != values.end()) out.push_back(sort);
  }
  return out;
}

const Value& Structure::apply(const Symbol& function, const ValueTuple& args) const {
  auto sig = signature_.functions.find(function);
  if (sig == signature_.functions.end()) throw Error(Errc::UnknownSymbol, function);
  if (args.size() != sig->second.args.size()) {
    throw Error(Errc::IllSorted, function + ": expected " + std::to_string(sig->second.args.size()) + " arguments");
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!in_carrier(sig->second.args[i], args[i])) {
      throw Error(Errc::IllSorted, function + "/" + std::to_string(i) + ": expected " + sig->second.args[i] +
                                       ", found '" + args[i] + "'");
    }
  }
  return tables_.at(function).at(args);
}

bool operator<(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.name != b.name) return a.name < b.name;
  if (a.sort != b.sort) return a.sort < b.sort;
  return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

Term Term::var(std::string name) { return Term{Kind::variable, std::move(name), {}, {}}; }

Term Term::constant(Value value, Sort sort) { return Term{Kind::constant, std::move(value), std::move(sort), {}}; }

Term Term::apply(Symbol function, std::vector<Term> args) {
  return Term{Kind::apply, std::move(function), {}, std::move(args)};
}

namespace {

Sort sort_at(const Term& term, const Signature& signature, const std::string& path) {
  switch (term.kind) {
    case Term::Kind::variable: {
      auto it = signature.variables.find(term.name);
      if (it == signature.variables.end()) throw Error(Errc::UnknownSymbol, term.name);
      return it->second;
    }
    case Term::Kind::constant:
      if (!signature.sorts.count(term.sort)) throw Error(Errc::UndeclaredSort, term.sort);
      return term.sort;
    case Term::Kind::apply: {
      auto it = signature.functions.find(term.name);
      if (it == signature.functions.end()) throw Error(Errc::UnknownSymbol, term.name);
      const auto& sig = it->second;
      if (term.args.size() != sig.args.size()) {
        throw Error(Errc::IllSorted, path + term.name + ": expected " + std::to_string(sig.args.size()) +
                                         " arguments, found " + std::to_string(term.args.size()));
      }
      for (std::size_t i = 0; i < term.args.size(); ++i) {
        const auto sub = path + term.name + "/" + std::to_string(i);
        auto found = sort_at(term.args[i], signature, sub + "/");
        if (found != sig.args[i]) {
          throw Error(Errc::IllSorted, sub + ": expected " + sig.args[i] + ", found " + found);
        }
      }
      return sig.result;
    }
  }
  return {};
}

}  // namespace

Sort sort_of(const Term& term, const Signature& signature) { return sort_at(term, signature, ""); }

SortProfile sort_of(const TermTuple& terms, const Signature& signature) {
  SortProfile out;
  for (std::size_t i = 0; i < terms.size(); ++i) out.push_back(sort_at(terms[i], signature, std::to_string(i) + "/"));
  return out;
}

Value eval(const Term& term, const Structure& structure, const Valuation& beta) {
  switch (term.kind) {
    case Term::Kind::variable: {
      auto it = beta.find(term.name);
      if (it == beta.end()) throw Error(Errc::UnboundVariable, term.name);
      return it->second;
    }
    case Term::Kind::constant:
      return term.name;
    case Term::Kind::apply: {
      ValueTuple args;
      args.reserve(term.args.size());
      for (const auto& a : term.args) args.push_back(eval(a, structure, beta));
      return structure.apply(term.name, args);
    }
  }
  return {};
}

ValueTuple eval(const TermTuple& terms, const Structure& structure, const Valuation& beta) {
  ValueTuple out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(eval(t, structure, beta));
  return out;
}

std::vector<std::string> variables_of(const TermTuple& terms) {
  std::vector<std::string> out;
  std::function<void(const Term&)> visit = [&](const Term& t) {
    if (t.kind == Term::Kind::variable) {
      if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    }
    for (const auto& a : t.args) visit(a);
  };
  for (const auto& t : terms) visit(t);
  return out;
}

void check_valuation(const Valuation& beta, const std::map<std::string, Sort>& sorts, const Structure& structure) {
  for (const auto& [name, value] : beta) {
    auto it = sorts.find(name);
    if (it == sorts.end()) throw Error(Errc::UnknownSymbol, name);
    if (!structure.in_carrier(it->second, value)) {
      throw Error(Errc::ValueOutsideCarrier, name + " = '" + value + "' not in " + it->second);
    }
  }
}

namespace {

bool bare_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::string quote_name(std::string_view name) {
  if (bare_name(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_string(const Term& term) {
  std::string out = quote_name(term.name);
  if (term.kind == Term::Kind::apply) {
    out += "(";
    for (std::size_t i = 0; i < term.args.size(); ++i) {
      if (i) out += ", ";
      out += to_string(term.args[i]);
    }
    out += ")";
  }
  return out;
}

std::string to_string(const TermTuple& terms) {
  if (terms.size() == 1) return to_string(terms.front());
  std::string out = "(";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ", ";
    out += to_string(terms[i]);
  }
  return out + ")";
}

std::string to_string(const ValueTuple& values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += quote_name(values[i]);
  }
  return out + ")";
}

namespace {

class TermParser {
 public:
  TermParser(std::string_view text, const Structure& structure, const std::map<std::string, Sort>& variables)
      : text_(text), structure_(structure), variables_(variables) {}

  TermTuple tuple() {
    skip();
    TermTuple out;
    if (peek() == '(') {
      ++pos_;
      out.push_back(term());
      while (skip(), peek() == ',') {
        ++pos_;
        out.push_back(term());
      }
      expect(')');
    } else {
      out.push_back(term());
    }
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return out;
  }

  Term single() {
    auto t = term();
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return t;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw Error(Errc::ParseError, "term '" + std::string(text_) + "' at " + std::to_string(pos_) + ": " + reason);
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string name() {
    skip();
    std::string out;
    if (peek() == '"') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        out += text_[pos_++];
      }
      if (peek() != '"') fail("unterminated quoted name");
      ++pos_;
      return out;
    }
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-')) {
      out += text_[pos_++];
    }
    if (out.empty()) fail("expected a name");
    return out;
  }

  Term term() {
    auto id = name();
    skip();
    if (peek() == '(') {
      ++pos_;
      std::vector<Term> args;
      skip();
      if (peek() != ')') {
        args.push_back(term());
        while (skip(), peek() == ',') {
          ++pos_;
          args.push_back(term());
        }
      }
      expect(')');
      if (!structure_.signature().functions.count(id)) throw Error(Errc::UnknownSymbol, id);
      return Term::apply(id, std::move(args));
    }
    if (variables_.count(id)) return Term::var(id);
    auto sorts = structure_.sorts_of_value(id);
    if (sorts.empty()) throw Error(Errc::UnknownSymbol, id);
    if (sorts.size() > 1) fail("constant '" + id + "' lies in several carriers");
    return Term::constant(id, sorts.front());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  const Structure& structure_;
  const std::map<std::string, Sort>& variables_;
};

}  // namespace

TermTuple parse_terms(std::string_view text, const Structure& structure,
                      const std::map<std::string, Sort>& variables) {
  return TermParser(text, structure, variables).tuple();
}

Term parse_term(std::string_view text, const Structure& structure, const std::map<std::string, Sort>& variables) {
  return TermParser(text, structure, variables).single();
}

Structure structure_from_json(const nlohmann::json& doc) {
  try {
    Signature sig;
    std::map<Sort, std::vector<Value>> carriers;
    std::map<Symbol, Structure::Table> tables;
    for (const auto& [sort, values] : doc.at("sorts").items()) {
      sig.sorts.insert(sort);
      carriers[sort] = values.get<std::vector<Value>>();
    }
    if (doc.contains("functions")) {
      for (const auto& [name, fn] : doc.at("functions").items()) {
        FunctionSig fs{fn.at("args").get<std::vector<Sort>>(), fn.at("result").get<Sort>()};
        for (const auto& s : fs.args) {
          if (!sig.sorts.count(s)) throw Error(Errc::UndeclaredSort, s + " (argument of " + name + ")");
        }
        if (!sig.sorts.count(fs.result)) throw Error(Errc::UndeclaredSort, fs.result + " (result of " + name + ")");
        auto& table = tables[name];
        const auto& rows = fn.at("table");
        if (rows.is_object()) {
          if (fs.args.size() != 1) throw Error(Errc::ParseError, name + ": object tables are for unary functions");
          for (const auto& [arg, result] : rows.items()) table[ValueTuple{arg}] = result.get<Value>();
        } else {
          for (const auto& row : rows) {
            if (!row.is_array() || row.size() != 2) throw Error(Errc::ParseError, name + ": rows are [[args], result]");
            auto args = row[0].get<ValueTuple>();
            if (!table.emplace(args, row[1].get<Value>()).second) {
              throw Error(Errc::ParseError, name + ": duplicate row " + to_string(args));
            }
          }
        }
        sig.functions[name] = std::move(fs);
      }
    }
    if (doc.contains("variables")) sig.variables = doc.at("variables").get<std::map<std::string, Sort>>();
    return Structure(std::move(sig), std::move(carriers), std::move(tables));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

Structure parse_structure(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return structure_from_json(doc);
}

nlohmann::json to_json(const Structure& structure) {
  using nlohmann::json;
  json doc;
  json sorts = json::object();
  for (const auto& [sort, values] : structure.carriers()) sorts[sort] = values;
  json functions = json::object();
  for (const auto& [name, sig] : structure.signature().functions) {
    json rows = json::array();
    for (const auto& [args, result] : structure.tables().at(name)) rows.push_back({args, result});
    functions[name] = {{"args", sig.args}, {"result", sig.result}, {"table", rows}};
  }
  doc["sorts"] = std::move(sorts);
  doc["functions"] = std::move(functions);
  doc["variables"] = structure.signature().variables;
  return doc;
}

}  // namespace sysmine
