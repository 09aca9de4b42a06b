#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include "cex/core/dsl.hpp"

namespace cex {

std::optional<ContextCode> ModelBundle::context_by_name(const std::string& name) const {
  for (const auto& [n, code] : contexts)
    if (n == name) return code;
  return std::nullopt;
}

std::optional<ContextSet> ModelBundle::k_by_name(const std::string& name) const {
  for (const auto& [n, set] : k_named)
    if (n == name) return set;
  return std::nullopt;
}

namespace {

// ---- lexer ------------------------------------------------------------------

enum class TokKind { Ident, Number, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  SourceSpan span;
};

class Lexer {
public:
  explicit Lexer(const std::string& text) : text_(text) { tokenize(); }

  const std::vector<Token>& tokens() const { return tokens_; }

private:
  void tokenize() {
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t count) {
      for (std::size_t k = 0; k < count; ++k, ++i) {
        if (text_[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
    };
    while (i < text_.size()) {
      char c = text_[i];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
        continue;
      }
      if (c == '/' && i + 1 < text_.size() && text_[i + 1] == '/') {
        while (i < text_.size() && text_[i] != '\n') advance(1);
        continue;
      }
      SourceSpan span{i, 0, line, col};
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i;
        while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) ||
                                    text_[i] == '_'))
          advance(1);
        span.length = i - start;
        tokens_.push_back({TokKind::Ident, text_.substr(start, span.length), span});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = i;
        while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) advance(1);
        if (i + 1 < text_.size() && text_[i] == '.' &&
            std::isdigit(static_cast<unsigned char>(text_[i + 1]))) {
          advance(1);
          while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i])))
            advance(1);
        }
        span.length = i - start;
        tokens_.push_back({TokKind::Number, text_.substr(start, span.length), span});
        continue;
      }
      static const char* two_char[] = {":=", "->", "<-", "==", "!=", "&&", "||"};
      bool matched = false;
      for (const char* op : two_char) {
        if (text_.compare(i, 2, op) == 0) {
          span.length = 2;
          tokens_.push_back({TokKind::Punct, op, span});
          advance(2);
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string_view("{}()[];:,=!&|~+-/").find(c) != std::string_view::npos) {
        span.length = 1;
        tokens_.push_back({TokKind::Punct, std::string(1, c), span});
        advance(1);
        continue;
      }
      span.length = 1;
      fail(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", span);
    }
    tokens_.push_back({TokKind::End, "", SourceSpan{i, 0, line, col}});
  }

  const std::string& text_;
  std::vector<Token> tokens_;
};

// ---- token stream -------------------------------------------------------------

class Cursor {
public:
  explicit Cursor(const std::vector<Token>& tokens) : tokens_(tokens) {}

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  bool at_end() const { return peek().kind == TokKind::End; }

  bool is_punct(const char* text) const {
    return peek().kind == TokKind::Punct && peek().text == text;
  }
  bool is_ident(const char* text) const {
    return peek().kind == TokKind::Ident && peek().text == text;
  }
  bool eat_punct(const char* text) {
    if (!is_punct(text)) return false;
    ++pos_;
    return true;
  }

  Token expect_punct(const char* text) {
    if (!is_punct(text)) unexpected(std::string("expected '") + text + "'");
    return next();
  }
  Token expect_ident(const char* what) {
    if (peek().kind != TokKind::Ident) unexpected(std::string("expected ") + what);
    return next();
  }

  [[noreturn]] void unexpected(const std::string& wanted) const {
    const Token& t = peek();
    std::string got = t.kind == TokKind::End ? "end of input" : "'" + t.text + "'";
    fail(ErrorCode::SyntaxError, wanted + ", found " + got, t.span);
  }

private:
  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
};

// ---- shared pieces --------------------------------------------------------------

std::int64_t parse_integer(const Token& tok) {
  if (tok.text.find('.') != std::string::npos)
    fail(ErrorCode::SyntaxError, "expected an integer, found a decimal", tok.span);
  try {
    return std::stoll(tok.text);
  } catch (const std::exception&) {
    fail(ErrorCode::SyntaxError, "integer literal out of range", tok.span);
  }
}

/// value := INT | IDENT  (with optional leading '-')
std::pair<Value, SourceSpan> parse_value(Cursor& cur) {
  if (cur.is_punct("-")) {
    SourceSpan span = cur.next().span;
    if (cur.peek().kind != TokKind::Number) cur.unexpected("expected a number after '-'");
    Token num = cur.next();
    span.length = num.span.offset + num.span.length - span.offset;
    return {Value(-parse_integer(num)), span};
  }
  if (cur.peek().kind == TokKind::Number) {
    Token num = cur.next();
    return {Value(parse_integer(num)), num.span};
  }
  if (cur.peek().kind == TokKind::Ident) {
    Token id = cur.next();
    return {Value(id.text), id.span};
  }
  cur.unexpected("expected a value (integer or identifier)");
}

/// rational := NUMBER ('/' NUMBER)?   (decimals parsed exactly)
std::pair<Rat, SourceSpan> parse_rational_tokens(Cursor& cur) {
  if (cur.peek().kind != TokKind::Number) cur.unexpected("expected a rational");
  Token num = cur.next();
  SourceSpan span = num.span;
  std::string text = num.text;
  if (cur.is_punct("/")) {
    cur.next();
    if (cur.peek().kind != TokKind::Number) cur.unexpected("expected a denominator");
    Token den = cur.next();
    if (den.text.find('.') != std::string::npos || num.text.find('.') != std::string::npos)
      fail(ErrorCode::SyntaxError, "p/q rationals take integer parts", den.span);
    text += "/" + den.text;
    span.length = den.span.offset + den.span.length - span.offset;
  }
  Rat value;
  try {
    value = parse_rational(text);
  } catch (const CexError& e) {
    fail(e.code(), e.what(), span);
  }
  return {value, span};
}

ValueRange parse_range(Cursor& cur) {
  cur.expect_punct("{");
  ValueRange range;
  do {
    auto [v, span] = parse_value(cur);
    if (range.index_of(v) >= 0)
      fail(ErrorCode::RangeViolation, "duplicate value " + value_str(v) + " in range", span);
    range.values.push_back(std::move(v));
  } while (cur.eat_punct(","));
  cur.expect_punct("}");
  return range;
}

// ---- equation expressions --------------------------------------------------------

/// Tracks variable uses so unresolved names get spans after declarations are
/// all known.
struct NameUse {
  std::string name;
  SourceSpan span;
};

class ExprParser {
public:
  ExprParser(Cursor& cur, std::vector<NameUse>& uses) : cur_(cur), uses_(uses) {}

  ExprPtr parse() { return parse_or(); }

private:
  ExprPtr parse_or() {
    ExprPtr left = parse_and();
    while (cur_.is_punct("||")) {
      cur_.next();
      left = Expr::make(Expr::Op::Or, {left, parse_and()});
    }
    return left;
  }

  ExprPtr parse_and() {
    ExprPtr left = parse_equality();
    while (cur_.is_punct("&&")) {
      cur_.next();
      left = Expr::make(Expr::Op::And, {left, parse_equality()});
    }
    return left;
  }

  ExprPtr parse_equality() {
    ExprPtr left = parse_additive();
    while (cur_.is_punct("==") || cur_.is_punct("!=")) {
      bool eq = cur_.next().text == "==";
      left = Expr::make(eq ? Expr::Op::Eq : Expr::Op::Ne, {left, parse_additive()});
    }
    return left;
  }

  ExprPtr parse_additive() {
    ExprPtr left = parse_unary();
    while (cur_.is_punct("+") || cur_.is_punct("-")) {
      bool add = cur_.next().text == "+";
      left = Expr::make(add ? Expr::Op::Add : Expr::Op::Sub, {left, parse_unary()});
    }
    return left;
  }

  ExprPtr parse_unary() {
    if (cur_.eat_punct("!")) return Expr::make(Expr::Op::Not, {parse_unary()});
    if (cur_.is_punct("-")) {
      Token minus = cur_.next();
      if (cur_.peek().kind != TokKind::Number)
        fail(ErrorCode::SyntaxError, "'-' is only allowed before integer literals", minus.span);
      return Expr::make_const(Value(-parse_integer(cur_.next())));
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    if (cur_.eat_punct("(")) {
      ExprPtr inner = parse_or();
      cur_.expect_punct(")");
      return inner;
    }
    if (cur_.peek().kind == TokKind::Number)
      return Expr::make_const(Value(parse_integer(cur_.next())));
    Token id = cur_.expect_ident("an expression");
    if (cur_.eat_punct("(")) {
      Expr::Op op;
      int arity;
      if (id.text == "ite") {
        op = Expr::Op::Ite;
        arity = 3;
      } else if (id.text == "min") {
        op = Expr::Op::Min;
        arity = 2;
      } else if (id.text == "max") {
        op = Expr::Op::Max;
        arity = 2;
      } else {
        fail(ErrorCode::SyntaxError, "unknown function '" + id.text + "'", id.span);
      }
      std::vector<ExprPtr> args;
      do {
        args.push_back(parse_or());
      } while (cur_.eat_punct(","));
      cur_.expect_punct(")");
      if (static_cast<int>(args.size()) != arity)
        fail(ErrorCode::SyntaxError,
             "'" + id.text + "' takes " + std::to_string(arity) + " arguments", id.span);
      return Expr::make(op, std::move(args));
    }
    uses_.push_back({id.text, id.span});
    return Expr::make_var(id.text);
  }

  Cursor& cur_;
  std::vector<NameUse>& uses_;
};

// ---- model items ------------------------------------------------------------------

struct RawContext {
  std::string name;
  SourceSpan span;
  std::vector<std::pair<NameUse, std::pair<Value, SourceSpan>>> assignments;
};

struct RawProbEntry {
  NameUse context;
  Rat weight;
};

struct RawK {
  std::optional<std::string> name;  // default K when absent
  SourceSpan span;
  bool all = false;
  std::vector<NameUse> members;
};

struct RawModel {
  std::string name;
  SourceSpan name_span;
  Signature signature;
  std::vector<SourceSpan> exo_spans, endo_spans;
  std::vector<EquationSpec> equations;
  std::vector<SourceSpan> equation_spans;
  std::vector<std::vector<NameUse>> equation_uses;
  std::vector<RawContext> contexts;
  std::vector<RawProbEntry> prob;
  std::optional<SourceSpan> prob_span;
  std::vector<RawK> ks;
};

class ModelParser {
public:
  explicit ModelParser(Cursor& cur) : cur_(cur) {}

  RawModel parse() {
    Token kw = cur_.expect_ident("'model'");
    if (kw.text != "model")
      fail(ErrorCode::SyntaxError, "expected 'model', found '" + kw.text + "'", kw.span);
    Token name = cur_.expect_ident("a model name");
    raw_.name = name.text;
    raw_.name_span = name.span;
    cur_.expect_punct("{");
    while (!cur_.eat_punct("}")) parse_item();
    if (!cur_.at_end()) cur_.unexpected("expected end of input after the model block");
    return std::move(raw_);
  }

private:
  void parse_item() {
    Token kw = cur_.expect_ident("a declaration (exo, endo, eq, table, context, prob, K)");
    if (kw.text == "exo" || kw.text == "endo") {
      Token name = cur_.expect_ident("a variable name");
      cur_.expect_punct(":");
      ValueRange range = parse_range(cur_);
      cur_.expect_punct(";");
      check_fresh_variable(name);
      auto& part = kw.text == "exo" ? raw_.signature.exogenous : raw_.signature.endogenous;
      auto& spans = kw.text == "exo" ? raw_.exo_spans : raw_.endo_spans;
      part.push_back({name.text, std::move(range)});
      spans.push_back(name.span);
    } else if (kw.text == "eq") {
      Token target = cur_.expect_ident("an equation target");
      cur_.expect_punct(":=");
      std::vector<NameUse> uses;
      ExprParser expr_parser(cur_, uses);
      ExprPtr body = expr_parser.parse();
      cur_.expect_punct(";");
      EquationSpec eq;
      eq.target = target.text;
      eq.expr = std::move(body);
      raw_.equations.push_back(std::move(eq));
      raw_.equation_spans.push_back(target.span);
      raw_.equation_uses.push_back(std::move(uses));
    } else if (kw.text == "table") {
      parse_table();
    } else if (kw.text == "context") {
      parse_context();
    } else if (kw.text == "prob") {
      parse_prob(kw.span);
    } else if (kw.text == "K") {
      parse_k(kw.span);
    } else {
      fail(ErrorCode::SyntaxError, "unknown declaration '" + kw.text + "'", kw.span);
    }
  }

  void check_fresh_variable(const Token& name) {
    for (const auto& v : raw_.signature.exogenous)
      if (v.name == name.text)
        fail(ErrorCode::RangeViolation, "variable '" + name.text + "' declared twice", name.span);
    for (const auto& v : raw_.signature.endogenous)
      if (v.name == name.text)
        fail(ErrorCode::RangeViolation, "variable '" + name.text + "' declared twice", name.span);
  }

  void parse_table() {
    Token target = cur_.expect_ident("an equation target");
    std::vector<NameUse> uses;
    TableSpec table;
    cur_.expect_punct("(");
    do {
      Token parent = cur_.expect_ident("a parent variable");
      uses.push_back({parent.text, parent.span});
      table.parents.push_back(parent.text);
    } while (cur_.eat_punct(","));
    cur_.expect_punct(")");
    cur_.expect_punct("{");
    bool saw_default = false;
    while (!cur_.eat_punct("}")) {
      if (cur_.is_ident("default")) {
        cur_.next();
        cur_.expect_punct("->");
        table.fallback = parse_value(cur_).first;
        cur_.expect_punct(";");
        saw_default = true;
        cur_.expect_punct("}");
        break;
      }
      TableRowSpec row;
      do {
        row.inputs.push_back(parse_value(cur_).first);
      } while (cur_.eat_punct(","));
      cur_.expect_punct("->");
      row.output = parse_value(cur_).first;
      cur_.expect_punct(";");
      table.rows.push_back(std::move(row));
    }
    if (!saw_default)
      fail(ErrorCode::SyntaxError, "table for '" + target.text + "' needs a default row",
           target.span);
    EquationSpec eq;
    eq.target = target.text;
    eq.table = std::move(table);
    raw_.equations.push_back(std::move(eq));
    raw_.equation_spans.push_back(target.span);
    raw_.equation_uses.push_back(std::move(uses));
  }

  void parse_context() {
    RawContext ctx;
    Token name = cur_.expect_ident("a context name");
    ctx.name = name.text;
    ctx.span = name.span;
    if (!context_names_.insert(ctx.name).second)
      fail(ErrorCode::RangeViolation, "context '" + ctx.name + "' declared twice", name.span);
    cur_.expect_punct("{");
    do {
      Token var = cur_.expect_ident("an exogenous variable name");
      cur_.expect_punct("=");
      auto value = parse_value(cur_);
      ctx.assignments.push_back({{var.text, var.span}, std::move(value)});
    } while (cur_.eat_punct(","));
    cur_.expect_punct("}");
    raw_.contexts.push_back(std::move(ctx));
  }

  void parse_prob(SourceSpan span) {
    if (raw_.prob_span)
      fail(ErrorCode::SyntaxError, "only one prob block is allowed", span);
    raw_.prob_span = span;
    cur_.expect_punct("{");
    do {
      Token name = cur_.expect_ident("a context name");
      cur_.expect_punct(":");
      auto [weight, wspan] = parse_rational_tokens(cur_);
      (void)wspan;
      if (!prob_names_.insert(name.text).second)
        fail(ErrorCode::SyntaxError, "context '" + name.text + "' weighted twice", name.span);
      raw_.prob.push_back({{name.text, name.span}, std::move(weight)});
    } while (cur_.eat_punct(","));
    cur_.expect_punct("}");
  }

  void parse_k(SourceSpan span) {
    RawK k;
    k.span = span;
    if (cur_.peek().kind == TokKind::Ident && !cur_.is_ident("all")) {
      Token name = cur_.next();
      k.name = name.text;
      k.span = name.span;
    }
    cur_.expect_punct("=");
    if (cur_.is_ident("all")) {
      cur_.next();
      k.all = true;
    } else {
      cur_.expect_punct("{");
      do {
        Token member = cur_.expect_ident("a context name");
        k.members.push_back({member.text, member.span});
      } while (cur_.eat_punct(","));
      cur_.expect_punct("}");
    }
    cur_.expect_punct(";");
    for (const auto& existing : raw_.ks) {
      if (existing.name == k.name) {
        std::string which = k.name ? "K set '" + *k.name + "'" : "the default K";
        fail(ErrorCode::SyntaxError, which + " declared twice", k.span);
      }
    }
    raw_.ks.push_back(std::move(k));
  }

  Cursor& cur_;
  RawModel raw_;
  std::set<std::string> context_names_;
  std::set<std::string> prob_names_;
};

// ---- resolution --------------------------------------------------------------------

void check_equation_names(const RawModel& raw) {
  std::set<std::string> declared;
  for (const auto& v : raw.signature.exogenous) declared.insert(v.name);
  for (const auto& v : raw.signature.endogenous) declared.insert(v.name);
  std::set<std::string> endo;
  for (const auto& v : raw.signature.endogenous) endo.insert(v.name);

  for (std::size_t i = 0; i < raw.equations.size(); ++i) {
    const std::string& target = raw.equations[i].target;
    if (!endo.count(target)) {
      ErrorCode code = declared.count(target) ? ErrorCode::RangeViolation
                                              : ErrorCode::UnknownIdentifier;
      std::string reason = declared.count(target)
                               ? "equation target '" + target + "' is exogenous"
                               : "equation target '" + target + "' is not declared";
      fail(code, reason, raw.equation_spans[i]);
    }
    for (const auto& use : raw.equation_uses[i])
      if (!declared.count(use.name))
        fail(ErrorCode::UnknownIdentifier, "unknown variable '" + use.name + "'", use.span);
  }
}

ContextCode resolve_context(const CausalModel& model, const RawContext& ctx) {
  std::vector<int> digits(static_cast<std::size_t>(model.exo_count()), -1);
  for (const auto& [use, value] : ctx.assignments) {
    int ordinal = model.ordinal_of(use.name);
    if (ordinal < 0)
      fail(ErrorCode::UnknownIdentifier, "unknown variable '" + use.name + "'", use.span);
    if (!model.is_exogenous(ordinal))
      fail(ErrorCode::RangeViolation,
           "context assigns endogenous variable '" + use.name + "'", use.span);
    int index = model.var(ordinal).range.index_of(value.first);
    if (index < 0)
      fail(ErrorCode::RangeViolation,
           "value " + value_str(value.first) + " outside the range of '" + use.name + "'",
           value.second);
    if (digits[static_cast<std::size_t>(ordinal)] >= 0)
      fail(ErrorCode::RangeViolation, "'" + use.name + "' assigned twice", use.span);
    digits[static_cast<std::size_t>(ordinal)] = index;
  }
  for (int i = 0; i < model.exo_count(); ++i) {
    if (digits[static_cast<std::size_t>(i)] < 0)
      fail(ErrorCode::RangeViolation,
           "context '" + ctx.name + "' leaves '" + model.var(i).name + "' unassigned", ctx.span);
  }
  return model.encode_context(digits);
}

ModelBundle resolve(RawModel raw) {
  check_equation_names(raw);

  ModelBundle bundle;
  bundle.name = raw.name;
  bundle.signature = raw.signature;
  bundle.equations = raw.equations;
  try {
    bundle.model = CausalModel::build(raw.signature, raw.equations);
  } catch (const CexError& e) {
    if (e.span()) throw;
    fail(e.code(), e.what(), raw.name_span);  // semantic error, no better anchor
  }

  std::map<std::string, ContextCode, std::less<>> by_name;
  for (const auto& ctx : raw.contexts) {
    ContextCode code = resolve_context(bundle.model, ctx);
    bundle.contexts.emplace_back(ctx.name, code);
    by_name.emplace(ctx.name, code);
  }

  if (raw.prob_span) {
    ContextDistribution dist;
    Rat sum = 0;
    for (const auto& entry : raw.prob) {
      auto code = by_name.find(entry.context.name);
      if (code == by_name.end())
        fail(ErrorCode::UnknownIdentifier, "unknown context '" + entry.context.name + "'",
             entry.context.span);
      dist.weights.emplace_back(code->second, entry.weight);
      sum += entry.weight;
    }
    if (sum != 1)
      fail(ErrorCode::ProbSumError,
           "context weights sum to " + rational_str(sum) + ", expected 1", *raw.prob_span);
    std::sort(dist.weights.begin(), dist.weights.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < dist.weights.size(); ++i)
      if (dist.weights[i - 1].first == dist.weights[i].first)
        fail(ErrorCode::ProbSumError, "two context names denote the same context",
             *raw.prob_span);
    bundle.distribution = std::move(dist);
  }

  for (const auto& k : raw.ks) {
    ContextSet set;
    if (k.all) {
      set = ContextSet::everything();
    } else {
      std::vector<ContextCode> codes;
      for (const auto& member : k.members) {
        auto code = by_name.find(member.name);
        if (code == by_name.end())
          fail(ErrorCode::UnknownIdentifier, "unknown context '" + member.name + "'",
               member.span);
        codes.push_back(code->second);
      }
      set = ContextSet::of(std::move(codes));
    }
    if (k.name)
      bundle.k_named.emplace_back(*k.name, std::move(set));
    else
      bundle.k_default = std::move(set);
  }
  return bundle;
}

}  // namespace

ModelBundle parse_model(const std::string& text) {
  Lexer lexer(text);
  Cursor cursor(lexer.tokens());
  ModelParser parser(cursor);
  return resolve(parser.parse());
}

ModelBundle load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

// ---- formulas -------------------------------------------------------------------

namespace {

class FormulaParser {
public:
  FormulaParser(Cursor& cur, const CausalModel& m) : cur_(cur), m_(m) {}

  Formula parse() { return parse_or(); }

private:
  Formula parse_or() {
    Formula left = parse_and();
    while (cur_.is_punct("|")) {
      cur_.next();
      left = Formula::disj(std::move(left), parse_and());
    }
    return left;
  }

  Formula parse_and() {
    Formula left = parse_unary();
    while (cur_.is_punct("&")) {
      cur_.next();
      left = Formula::conj(std::move(left), parse_unary());
    }
    return left;
  }

  Formula parse_unary() {
    if (cur_.eat_punct("~")) return Formula::negation(parse_unary());
    if (cur_.is_punct("[")) return parse_causal();
    if (cur_.eat_punct("(")) {
      Formula inner = parse_or();
      cur_.expect_punct(")");
      return inner;
    }
    return parse_prim();
  }

  Formula parse_causal() {
    Token open = cur_.expect_punct("[");
    std::vector<std::pair<std::string, Value>> settings;
    std::set<std::string> seen;
    do {
      Token var = cur_.expect_ident("a variable name");
      cur_.expect_punct("<-");
      auto [value, vspan] = parse_value(cur_);
      resolve_endo(var, value, vspan);
      if (!seen.insert(var.text).second)
        fail(ErrorCode::SyntaxError, "'" + var.text + "' intervened twice", var.span);
      settings.emplace_back(var.text, std::move(value));
    } while (cur_.eat_punct(","));
    cur_.expect_punct("]");
    cur_.expect_punct("(");
    Formula inner = parse_or();
    cur_.expect_punct(")");
    if (inner.has_causal())
      fail(ErrorCode::NestedIntervention, "interventions cannot nest", open.span);
    return Formula::causal(m_.make_intervention(settings), std::move(inner));
  }

  Formula parse_prim() {
    Token var = cur_.expect_ident("a primitive event 'X=v'");
    cur_.expect_punct("=");
    auto [value, vspan] = parse_value(cur_);
    auto [ordinal, index] = resolve_endo(var, value, vspan);
    return Formula::prim(ordinal, index);
  }

  std::pair<int, int> resolve_endo(const Token& var, const Value& value, SourceSpan vspan) {
    int ordinal = m_.ordinal_of(var.text);
    if (ordinal < 0)
      fail(ErrorCode::UnknownVariable, "unknown variable '" + var.text + "'", var.span);
    if (m_.is_exogenous(ordinal))
      fail(ErrorCode::UnknownVariable,
           "'" + var.text + "' is exogenous; formulas range over endogenous variables",
           var.span);
    int index = m_.var(ordinal).range.index_of(value);
    if (index < 0)
      fail(ErrorCode::ValueOutOfRange,
           "value " + value_str(value) + " outside the range of '" + var.text + "'", vspan);
    return {ordinal, index};
  }

  Cursor& cur_;
  const CausalModel& m_;
};

}  // namespace

Formula parse_formula(const std::string& text, const CausalModel& m) {
  Lexer lexer(text);
  Cursor cursor(lexer.tokens());
  FormulaParser parser(cursor, m);
  Formula f = parser.parse();
  if (!cursor.at_end()) cursor.unexpected("expected end of formula");
  return f;
}

Conjunction parse_conjunction(const std::string& text, const CausalModel& m) {
  Formula f = parse_formula(text, m);
  std::vector<std::pair<int, int>> events;
  std::function<void(const Formula&)> collect = [&](const Formula& node) {
    if (node.kind() == Formula::Kind::Prim) {
      events.emplace_back(node.prim_var(), node.prim_value());
      return;
    }
    if (node.kind() == Formula::Kind::And) {
      collect(node.child(0));
      collect(node.child(1));
      return;
    }
    fail(ErrorCode::SyntaxError, "expected a conjunction of primitive events 'X=v & Y=w'");
  };
  collect(f);
  return Conjunction::make(std::move(events));
}

}  // namespace cex
