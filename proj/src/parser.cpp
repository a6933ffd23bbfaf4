#include <cctype>
#include <map>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include "nagtrace/polysys.hpp"

namespace nagtrace {

namespace {

using Rational = boost::multiprecision::cpp_rational;

struct GaussRational {
  Rational re = 0;
  Rational im = 0;

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational operator+(const GaussRational& o) const { return {re + o.re, im + o.im}; }
  GaussRational operator*(const GaussRational& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  GaussRational operator-() const { return {-re, -im}; }
};

using Monomial = std::vector<std::pair<int, int>>;

// Exact polynomial used while parsing; terms kept in first-appearance order.
struct ExactPoly {
  std::vector<std::pair<Monomial, GaussRational>> terms;

  static ExactPoly constant(GaussRational c) {
    ExactPoly p;
    if (!c.is_zero()) p.terms.push_back({{}, c});
    return p;
  }

  void add_term(const Monomial& m, const GaussRational& c) {
    for (auto& [mm, cc] : terms) {
      if (mm == m) {
        cc = cc + c;
        return;
      }
    }
    terms.push_back({m, c});
  }

  void prune() {
    std::erase_if(terms, [](const auto& t) { return t.second.is_zero(); });
  }

  ExactPoly operator+(const ExactPoly& o) const {
    ExactPoly r = *this;
    for (const auto& [m, c] : o.terms) r.add_term(m, c);
    r.prune();
    return r;
  }

  ExactPoly operator-() const {
    ExactPoly r = *this;
    for (auto& t : r.terms) t.second = -t.second;
    return r;
  }

  ExactPoly operator*(const ExactPoly& o) const {
    ExactPoly r;
    for (const auto& [ma, ca] : terms) {
      for (const auto& [mb, cb] : o.terms) {
        std::map<int, int> e;
        for (const auto& [v, k] : ma) e[v] += k;
        for (const auto& [v, k] : mb) e[v] += k;
        r.add_term(Monomial(e.begin(), e.end()), ca * cb);
      }
    }
    r.prune();
    return r;
  }

  bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].first.empty()); }
  GaussRational constant_value() const { return terms.empty() ? GaussRational{} : terms[0].second; }
};

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      const char c = text_[pos_];
      const int line = line_, col = col_;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          id += advance();
        out.push_back({Tok::Ident, id, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < text_.size() &&
                                                                  std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        std::string num;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
          num += advance();
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
          std::size_t save = pos_;
          int sl = line_, sc = col_;
          std::string exp;
          exp += advance();
          if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) exp += advance();
          if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) exp += advance();
            num += exp;
          } else {
            pos_ = save;
            line_ = sl;
            col_ = sc;
          }
        }
        out.push_back({Tok::Number, num, line, col});
      } else if (std::string("+-*/^()=;,").find(c) != std::string::npos) {
        out.push_back({Tok::Symbol, std::string(1, advance()), line, col});
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      }
    }
  }

 private:
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Rational parse_decimal(const std::string& s, const Token& tok) {
  std::string mantissa = s, exponent;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = s.substr(0, e);
    exponent = s.substr(e + 1);
  }
  if (std::count(mantissa.begin(), mantissa.end(), '.') > 1) throw ParseError("malformed number '" + s + "'", tok.line, tok.column);
  std::string digits;
  int frac = 0;
  bool after_dot = false;
  for (char c : mantissa) {
    if (c == '.') {
      after_dot = true;
      continue;
    }
    digits += c;
    if (after_dot) ++frac;
  }
  long long exp10 = 0;
  try {
    std::size_t used = 0;
    if (!exponent.empty()) exp10 = std::stoll(exponent, &used);
    if (used != exponent.size() || exp10 > 400 || exp10 < -400) throw std::out_of_range(s);
  } catch (const std::exception&) {
    throw ParseError("malformed number '" + s + "'", tok.line, tok.column);
  }
  exp10 -= frac;
  // cpp_int reads a leading 0 as an octal prefix.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  if (digits.empty()) throw ParseError("malformed number '" + s + "'", tok.line, tok.column);
  boost::multiprecision::cpp_int num(digits);
  boost::multiprecision::cpp_int scale = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                    static_cast<unsigned>(exp10 < 0 ? -exp10 : exp10));
  return exp10 < 0 ? Rational(num, scale) : Rational(num * scale);
}

enum class GroupKind { Auto, Homogeneous, Affine };

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  PolySystem run() {
    while (peek().kind != Tok::End) statement();
    if (groups_.empty()) throw ParseError("empty system: no variable_group declared", peek().line, peek().column);
    if (polys_.empty()) throw ParseError("empty system: no polynomials", peek().line, peek().column);

    std::vector<Polynomial> polys;
    for (const auto& ep : polys_) {
      std::vector<Term> terms;
      for (const auto& [m, c] : ep.terms)
        terms.push_back(Term{Complex(static_cast<double>(c.re), static_cast<double>(c.im)), m});
      polys.emplace_back(std::move(terms));
    }
    PolySystem provisional(groups_, polys, names_, dim_);
    auto groups = groups_;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (kinds_[g] == GroupKind::Homogeneous) {
        groups[g].homogeneous = true;
      } else if (kinds_[g] == GroupKind::Auto && groups[g].variables.size() >= 2) {
        bool hom = true, used = false;
        for (const auto& p : polys) {
          hom = hom && provisional.is_homogeneous_in(p, static_cast<int>(g));
          used = used || provisional.degree_vector(p)[g] > 0;
        }
        groups[g].homogeneous = hom && used;
      }
    }
    return PolySystem(std::move(groups), std::move(polys), names_, dim_);
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw ParseError(msg, t.line, t.column); }

  void expect(const std::string& sym) {
    const Token t = next();
    if (t.kind != Tok::Symbol || t.text != sym)
      fail("expected '" + sym + "' but found '" + (t.kind == Tok::End ? std::string("end of input") : t.text) + "'", t);
  }

  bool at_symbol(const std::string& sym) const { return peek().kind == Tok::Symbol && peek().text == sym; }

  void statement() {
    const Token t = next();
    if (t.kind != Tok::Ident) fail("expected a declaration or polynomial name", t);
    if (t.text == "variable_group" || t.text == "hom_variable_group" || t.text == "affine_variable_group") {
      if (!polys_.empty()) fail("variable groups must be declared before polynomials", t);
      VarGroup g;
      g.name = "g" + std::to_string(groups_.size());
      while (peek().kind == Tok::Ident) {
        const Token v = next();
        if (v.text == "i") fail("'i' is reserved for the imaginary unit", v);
        if (var_index_.contains(v.text)) fail("duplicate variable '" + v.text + "'", v);
        var_index_[v.text] = num_vars_++;
        g.variables.push_back(v.text);
        if (at_symbol(",")) next();
      }
      if (g.variables.empty()) fail("variable group needs at least one variable", peek());
      expect(";");
      groups_.push_back(std::move(g));
      kinds_.push_back(t.text == "hom_variable_group"    ? GroupKind::Homogeneous
                       : t.text == "affine_variable_group" ? GroupKind::Affine
                                                           : GroupKind::Auto);
      return;
    }
    if (t.text == "dimension") {
      const Token n = next();
      if (n.kind != Tok::Number || n.text.find_first_not_of("0123456789") != std::string::npos)
        fail("dimension must be a nonnegative integer", n);
      dim_ = std::stoi(n.text);
      expect(";");
      return;
    }
    if (groups_.empty()) fail("polynomial defined before any variable_group", t);
    if (var_index_.contains(t.text) || t.text == "i") fail("polynomial name '" + t.text + "' clashes with a variable", t);
    for (const auto& n : names_)
      if (n == t.text) fail("duplicate polynomial name '" + t.text + "'", t);
    expect("=");
    if (at_symbol(";")) fail("empty polynomial expression", peek());
    ExactPoly p = expression();
    expect(";");
    names_.push_back(t.text);
    polys_.push_back(std::move(p));
  }

  ExactPoly expression() {
    ExactPoly acc;
    bool negate = false;
    if (at_symbol("+") || at_symbol("-")) negate = next().text == "-";
    acc = product();
    if (negate) acc = -acc;
    while (at_symbol("+") || at_symbol("-")) {
      const bool minus = next().text == "-";
      ExactPoly rhs = product();
      acc = acc + (minus ? -rhs : rhs);
    }
    return acc;
  }

  ExactPoly product() {
    ExactPoly acc = power();
    while (at_symbol("*") || at_symbol("/")) {
      const Token op = next();
      const Token at = peek();
      ExactPoly rhs = power();
      if (op.text == "*") {
        acc = acc * rhs;
      } else {
        if (!rhs.is_constant()) fail("division by a non-constant expression", at);
        const GaussRational d = rhs.constant_value();
        if (d.is_zero()) fail("division by zero", at);
        const Rational norm = d.re * d.re + d.im * d.im;
        acc = acc * ExactPoly::constant({d.re / norm, -d.im / norm});
      }
    }
    return acc;
  }

  ExactPoly power() {
    ExactPoly base = primary();
    if (at_symbol("^")) {
      next();
      const Token e = next();
      if (e.kind != Tok::Number || e.text.find_first_not_of("0123456789") != std::string::npos)
        fail("exponent must be a nonnegative integer", e);
      const int k = std::stoi(e.text);
      ExactPoly r = ExactPoly::constant({1, 0});
      for (int j = 0; j < k; ++j) r = r * base;
      return r;
    }
    return base;
  }

  ExactPoly primary() {
    const Token t = next();
    if (t.kind == Tok::Number) return ExactPoly::constant({parse_decimal(t.text, t), 0});
    if (t.kind == Tok::Ident) {
      if (t.text == "i") return ExactPoly::constant({0, 1});
      auto it = var_index_.find(t.text);
      if (it == var_index_.end()) fail("undeclared variable '" + t.text + "'", t);
      ExactPoly p;
      p.terms.push_back({{{it->second, 1}}, {1, 0}});
      return p;
    }
    if (t.kind == Tok::Symbol && t.text == "(") {
      ExactPoly p = expression();
      expect(")");
      return p;
    }
    if (t.kind == Tok::Symbol && t.text == "-") return -power();
    fail("unexpected '" + (t.kind == Tok::End ? std::string("end of input") : t.text) + "' in expression", t);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<VarGroup> groups_;
  std::vector<GroupKind> kinds_;
  std::map<std::string, int> var_index_;
  int num_vars_ = 0;
  std::vector<ExactPoly> polys_;
  std::vector<std::string> names_;
  std::optional<int> dim_;
};

}  // namespace

PolySystem parse_system(const std::string& text) {
  Lexer lexer(text);
  return Parser(lexer.run()).run();
}

}  // namespace nagtrace
