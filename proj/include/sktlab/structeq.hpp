#pragma once

// Parser and emitter for complex structure-equation files (".seq").
//
// Grammar:
//   file    := header line*
//   header  := "dim" INT
//   line    := "param" NAME "=" COMPLEX | "dphi" INT "=" expr
//   expr    := "0" | term ("+" term)*
//   term    := (COMPLEX | NAME) "*" wedge | wedge
//   wedge   := atom "^" atom | "(" expr ")"
//   atom    := "phi" INT | "phibar" INT
//   COMPLEX := "(" FLOAT "," FLOAT ")"
// Whitespace-insensitive; "#" starts a line comment. Unicode phi with an
// overbar is accepted on input as an alias for phibar, never emitted.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <complex>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sktlab {

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " +
                           msg),
        line(l),
        column(c) {}
};

/// One wedge factor pair. Allowed shapes after normalization:
/// (a, b) both plain with a < b; (a, b-bar) any a, b; (a-bar, b-bar) a < b.
struct WedgePair {
  int a = 0, b = 0;  // 1-based
  bool a_bar = false, b_bar = false;

  friend auto operator<=>(const WedgePair&, const WedgePair&) = default;
};

/// coefficient * wedge; the coefficient is either a literal or a single
/// parameter reference (exactly one of the two).
struct EqTerm {
  std::complex<double> literal{1.0, 0.0};
  std::string param;  // empty = literal coefficient
  WedgePair pair;
};

struct StructureEquationSpec {
  int n = 0;                                        // complex dimension
  std::vector<std::pair<std::string, std::complex<double>>> params;  // sorted on emit
  std::vector<std::vector<EqTerm>> equations;       // one list per dphi^k, k = 1..n

  std::complex<double> param_value(const std::string& name) const {
    for (const auto& [k, v] : params)
      if (k == name) return v;
    throw std::invalid_argument("unknown parameter: " + name);
  }

  std::complex<double> term_coefficient(const EqTerm& t) const {
    return t.param.empty() ? t.literal : param_value(t.param);
  }
};

namespace structeq_detail {

struct Lexer {
  explicit Lexer(std::string_view text) : text_(text) {}

  struct Token {
    enum Kind { Word, Int, Float, LParen, RParen, Comma, Eq, Plus, Star, Caret, End } kind;
    std::string word;
    double number = 0.0;
    long integer = 0;
    int line = 1, col = 1;
  };

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) {
      t.kind = Token::End;
      return t;
    }
    const char c = text_[pos_];
    if (c == '(') return simple(Token::LParen);
    if (c == ')') return simple(Token::RParen);
    if (c == ',') return simple(Token::Comma);
    if (c == '=') return simple(Token::Eq);
    if (c == '+') return simple(Token::Plus);
    if (c == '*') return simple(Token::Star);
    if (c == '^') return simple(Token::Caret);
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      const std::size_t start = pos_;
      if (c == '-') advance();
      bool isfloat = false;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d))) {
          advance();
        } else if (d == '.' || d == 'e' || d == 'E') {
          isfloat = true;
          advance();
          if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-') &&
              (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))
            advance();
        } else {
          break;
        }
      }
      const std::string_view s = text_.substr(start, pos_ - start);
      double val = 0.0;
      const auto rc = std::from_chars(s.data(), s.data() + s.size(), val);
      if (rc.ec != std::errc())
        throw ParseError(t.line, t.col, "malformed number '" + std::string(s) + "'");
      if (isfloat || s.find('.') != std::string_view::npos) {
        t.kind = Token::Float;
        t.number = val;
      } else {
        t.kind = Token::Int;
        t.integer = static_cast<long>(val);
        t.number = val;
      }
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
        static_cast<unsigned char>(c) >= 0x80) {
      const std::size_t start = pos_;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' ||
            static_cast<unsigned char>(d) >= 0x80)
          advance();
        else
          break;
      }
      t.kind = Token::Word;
      t.word = normalize_word(std::string(text_.substr(start, pos_ - start)), t.line, t.col);
      return t;
    }
    throw ParseError(t.line, t.col, std::string("unexpected character '") + c + "'");
  }

 private:
  Token simple(Token::Kind k) {
    Token t;
    t.kind = k;
    t.line = line_;
    t.col = col_;
    advance();
    return t;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  /// Accept UTF-8 phi glyphs as aliases: a word containing the bytes of
  /// U+03C6/U+03D5 maps to "phi"; a trailing U+0304 combining macron (or the
  /// sequence phi + U+0305) maps to "phibar".
  static std::string normalize_word(std::string w, int line, int col) {
    static const std::string phi1 = "\xCF\x86", phi2 = "\xCF\x95";
    static const std::string macron = "\xCC\x84", overline = "\xCC\x85";
    bool has_phi = false, has_bar = false;
    std::string out;
    for (std::size_t i = 0; i < w.size();) {
      if (w.compare(i, phi1.size(), phi1) == 0 || w.compare(i, phi2.size(), phi2) == 0) {
        has_phi = true;
        i += phi1.size();
      } else if (w.compare(i, macron.size(), macron) == 0 ||
                 w.compare(i, overline.size(), overline) == 0) {
        has_bar = true;
        i += macron.size();
      } else if (static_cast<unsigned char>(w[i]) >= 0x80) {
        throw ParseError(line, col, "unexpected non-ascii identifier");
      } else {
        out += w[i++];
      }
    }
    if (has_phi) return (has_bar ? "phibar" : "phi") + out;
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

}  // namespace structeq_detail

/// Parses a ".seq" structure-equation file. Errors carry line/column.
inline StructureEquationSpec parse_structure_equations(const std::string& text) {
  using Lexer = structeq_detail::Lexer;
  using Token = Lexer::Token;
  Lexer lex(text);
  Token tok = lex.next();

  const auto expect_word = [&](const std::string& w) {
    if (tok.kind != Token::Word || tok.word != w)
      throw ParseError(tok.line, tok.col, "expected '" + w + "'");
    tok = lex.next();
  };
  const auto expect = [&](Token::Kind k, const char* what) {
    if (tok.kind != k) throw ParseError(tok.line, tok.col, std::string("expected ") + what);
    tok = lex.next();
  };

  StructureEquationSpec spec;
  expect_word("dim");
  if (tok.kind != Token::Int || tok.integer <= 0)
    throw ParseError(tok.line, tok.col, "expected a positive integer dimension");
  spec.n = static_cast<int>(tok.integer);
  tok = lex.next();
  spec.equations.assign(spec.n, {});
  std::vector<bool> seen(spec.n, false);

  const auto parse_complex = [&]() -> std::complex<double> {
    expect(Token::LParen, "'('");
    if (tok.kind != Token::Int && tok.kind != Token::Float)
      throw ParseError(tok.line, tok.col, "expected a number");
    const double re = tok.number;
    tok = lex.next();
    expect(Token::Comma, "','");
    if (tok.kind != Token::Int && tok.kind != Token::Float)
      throw ParseError(tok.line, tok.col, "expected a number");
    const double im = tok.number;
    tok = lex.next();
    expect(Token::RParen, "')'");
    return {re, im};
  };

  // atom := "phi" INT | "phibar" INT  -> (index, barred)
  const auto parse_atom = [&]() -> std::pair<int, bool> {
    if (tok.kind != Token::Word || (tok.word != "phi" && tok.word != "phibar"))
      throw ParseError(tok.line, tok.col, "expected phi or phibar");
    const bool barred = tok.word == "phibar";
    const int aline = tok.line, acol = tok.col;
    tok = lex.next();
    if (tok.kind != Token::Int) throw ParseError(tok.line, tok.col, "expected a frame index");
    const int idx = static_cast<int>(tok.integer);
    if (idx < 1 || idx > spec.n)
      throw ParseError(aline, acol, "frame index " + std::to_string(idx) + " out of range 1.." +
                                        std::to_string(spec.n));
    tok = lex.next();
    return {idx, barred};
  };

  // Normalized pair from two atoms: plain-before-barred, ascending within a kind.
  const auto make_pair = [](std::pair<int, bool> x, std::pair<int, bool> y, int line, int col,
                            double& sign) -> WedgePair {
    sign = 1.0;
    if (x.second && !y.second) {  // barred ^ plain -> swap
      std::swap(x, y);
      sign = -sign;
    } else if (x.second == y.second && x.first > y.first) {
      std::swap(x, y);
      sign = -sign;
    }
    if (x == y) throw ParseError(line, col, "zero wedge: repeated factor");
    WedgePair p;
    p.a = x.first;
    p.a_bar = x.second;
    p.b = y.first;
    p.b_bar = y.second;
    return p;
  };

  std::function<std::vector<EqTerm>()> parse_expr;
  parse_expr = [&]() -> std::vector<EqTerm> {
    std::vector<EqTerm> terms;
    // expr := "0" | term ("+" term)*
    if (tok.kind == Token::Int && tok.integer == 0) {
      tok = lex.next();
      return terms;
    }
    const auto parse_wedge_or_group = [&]() -> std::vector<EqTerm> {
      if (tok.kind == Token::LParen) {
        // could be a parenthesized expression group
        tok = lex.next();
        auto inner = parse_expr();
        if (tok.kind != Token::RParen)
          throw ParseError(tok.line, tok.col, "expected ')' to close a group");
        tok = lex.next();
        return inner;
      }
      const int line = tok.line, col = tok.col;
      auto x = parse_atom();
      if (tok.kind != Token::Caret) throw ParseError(tok.line, tok.col, "expected '^'");
      tok = lex.next();
      auto y = parse_atom();
      double sign = 1.0;
      EqTerm t;
      t.pair = make_pair(x, y, line, col, sign);
      t.literal = sign;
      return {t};
    };

    const auto parse_term = [&]() -> std::vector<EqTerm> {
      // term := (COMPLEX | NAME) "*" wedge | wedge
      std::complex<double> lit{1.0, 0.0};
      std::string pname;
      bool has_coef = false;
      if (tok.kind == Token::LParen) {
        // disambiguate: COMPLEX "(re,im)" vs parenthesized group "(expr)".
        // A complex literal starts with a number followed by a comma.
        Lexer save_probe = lex;  // shallow copy: lexer state is value-like
        Token ahead = save_probe.next();
        Token ahead2 = save_probe.next();
        if ((ahead.kind == Token::Int || ahead.kind == Token::Float) &&
            ahead2.kind == Token::Comma) {
          lit = parse_complex();
          has_coef = true;
          expect(Token::Star, "'*'");
        }
      } else if (tok.kind == Token::Word && tok.word != "phi" && tok.word != "phibar") {
        pname = tok.word;
        bool known = false;
        for (const auto& [k, v] : spec.params) known = known || k == pname;
        if (!known) throw ParseError(tok.line, tok.col, "unknown parameter '" + pname + "'");
        has_coef = true;
        tok = lex.next();
        expect(Token::Star, "'*'");
      }
      const int gline = tok.line, gcol = tok.col;
      auto factors = parse_wedge_or_group();
      for (auto& t : factors) {
        if (!has_coef) continue;
        if (!pname.empty()) {
          if (!t.param.empty())
            throw ParseError(gline, gcol, "cannot scale a parameter reference by a parameter");
          if (t.literal != std::complex<double>(1.0, 0.0))
            throw ParseError(gline, gcol,
                             "parameter-scaled wedges must be written in canonical order "
                             "(plain before barred, ascending indices, coefficient 1)");
          t.param = pname;
        } else {
          if (!t.param.empty())
            throw ParseError(gline, gcol, "cannot scale a parameter reference by a literal");
          t.literal *= lit;
        }
      }
      return factors;
    };

    auto first = parse_term();
    terms.insert(terms.end(), first.begin(), first.end());
    while (tok.kind == Token::Plus) {
      tok = lex.next();
      auto more = parse_term();
      terms.insert(terms.end(), more.begin(), more.end());
    }
    return terms;
  };

  while (tok.kind != Token::End) {
    if (tok.kind != Token::Word) throw ParseError(tok.line, tok.col, "expected a directive");
    if (tok.word == "param") {
      tok = lex.next();
      if (tok.kind != Token::Word) throw ParseError(tok.line, tok.col, "expected a parameter name");
      const std::string name = tok.word;
      for (const auto& [k, v] : spec.params)
        if (k == name) throw ParseError(tok.line, tok.col, "duplicate parameter '" + name + "'");
      tok = lex.next();
      expect(Token::Eq, "'='");
      spec.params.emplace_back(name, parse_complex());
    } else if (tok.word == "dphi") {
      const int dline = tok.line, dcol = tok.col;
      tok = lex.next();
      if (tok.kind != Token::Int) throw ParseError(tok.line, tok.col, "expected an equation index");
      const int k = static_cast<int>(tok.integer);
      if (k < 1 || k > spec.n)
        throw ParseError(dline, dcol, "equation index out of range 1.." + std::to_string(spec.n));
      if (seen[k - 1]) throw ParseError(dline, dcol, "duplicate equation dphi" + std::to_string(k));
      seen[k - 1] = true;
      tok = lex.next();
      expect(Token::Eq, "'='");
      spec.equations[k - 1] = parse_expr();
    } else {
      throw ParseError(tok.line, tok.col, "unknown directive '" + tok.word + "'");
    }
  }
  for (int k = 0; k < spec.n; ++k)
    if (!seen[k]) throw ParseError(1, 1, "missing equation dphi" + std::to_string(k + 1));

  // canonicalize: merge identical pairs (literal coefficients only), drop zeros, sort
  for (auto& eq : spec.equations) {
    std::stable_sort(eq.begin(), eq.end(), [](const EqTerm& u, const EqTerm& v) {
      if (u.pair != v.pair) return u.pair < v.pair;
      return u.param < v.param;
    });
    std::vector<EqTerm> merged;
    for (const auto& t : eq) {
      if (!merged.empty() && merged.back().pair == t.pair && merged.back().param == t.param &&
          t.param.empty()) {
        merged.back().literal += t.literal;
      } else {
        merged.push_back(t);
      }
    }
    std::erase_if(merged, [](const EqTerm& t) {
      return t.param.empty() && std::abs(t.literal) == 0.0;
    });
    eq = std::move(merged);
  }
  std::stable_sort(spec.params.begin(), spec.params.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return spec;
}

namespace structeq_detail {
inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace structeq_detail

/// Canonical text for a spec; parse(emit(spec)) == spec structurally.
inline std::string emit_structure_equations(const StructureEquationSpec& spec) {
  using structeq_detail::fmt_double;
  std::ostringstream os;
  os << "dim " << spec.n << "\n";
  auto params = spec.params;
  std::stable_sort(params.begin(), params.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [name, v] : params)
    os << "param " << name << " = (" << fmt_double(v.real()) << "," << fmt_double(v.imag())
       << ")\n";
  for (int k = 0; k < spec.n; ++k) {
    os << "dphi" << (k + 1) << " = ";
    const auto& eq = spec.equations[k];
    if (eq.empty()) {
      os << "0\n";
      continue;
    }
    for (std::size_t t = 0; t < eq.size(); ++t) {
      if (t) os << " + ";
      const auto& term = eq[t];
      const auto atom = [&](int idx, bool bar) {
        return std::string(bar ? "phibar" : "phi") + std::to_string(idx);
      };
      const std::string w = atom(term.pair.a, term.pair.a_bar) + "^" + atom(term.pair.b, term.pair.b_bar);
      if (!term.param.empty()) {
        os << term.param << "*" << w;
      } else if (term.literal == std::complex<double>(1.0, 0.0)) {
        os << w;
      } else {
        os << "(" << fmt_double(term.literal.real()) << "," << fmt_double(term.literal.imag())
           << ")*" << w;
      }
    }
    os << "\n";
  }
  return os.str();
}

inline bool spec_equal(const StructureEquationSpec& a, const StructureEquationSpec& b) {
  if (a.n != b.n || a.params != b.params) return false;
  if (a.equations.size() != b.equations.size()) return false;
  for (std::size_t k = 0; k < a.equations.size(); ++k) {
    if (a.equations[k].size() != b.equations[k].size()) return false;
    for (std::size_t t = 0; t < a.equations[k].size(); ++t) {
      const auto& x = a.equations[k][t];
      const auto& y = b.equations[k][t];
      if (x.pair != y.pair || x.param != y.param || x.literal != y.literal) return false;
    }
  }
  return true;
}

}  // namespace sktlab
