#include "cochainflow/form_parser.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace cochainflow {

namespace {

enum class TokenKind { Number, Name, Symbol, End };

struct Token {
  TokenKind kind;
  std::string text;
  double number = 0.0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const std::string rest(text.substr(i));
      double value = 0.0;
      try {
        value = std::stod(rest, &used);
      } catch (const std::exception&) {
        throw FormParseError("bad number at position " + std::to_string(i));
      }
      // "2pi" must not swallow the 'p'; stod stops there already, but guard "2e" etc.
      tokens.push_back({TokenKind::Number, rest.substr(0, used), value});
      i += used;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                 text[j] == '-')) {
        ++j;
      }
      std::string name(text.substr(i, j - i));
      // A trailing '-' belongs to an operator, not to the name.
      while (!name.empty() && name.back() == '-') {
        name.pop_back();
        --j;
      }
      tokens.push_back({TokenKind::Name, name});
      i = j;
    } else if (std::string_view("+-*()^").find(c) != std::string_view::npos) {
      tokens.push_back({TokenKind::Symbol, std::string(1, c)});
      ++i;
    } else {
      throw FormParseError(std::string("unexpected character '") + c + "' in form expression");
    }
  }
  tokens.push_back({TokenKind::End, ""});
  return tokens;
}

int axis_of(std::string_view name) {
  if (name == "x") return 0;
  if (name == "y") return 1;
  if (name == "z") return 2;
  return -1;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, int dim) : tokens_(std::move(tokens)), dim_(dim) {}

  AnalyticForm parse() {
    std::optional<AnalyticForm> result;
    double sign = 1.0;
    if (accept("+")) {
    } else if (accept("-")) {
      sign = -1.0;
    }
    while (true) {
      auto [mask, poly] = term();
      const int degree = std::popcount(mask);
      if (!result) result.emplace(dim_, degree);
      if (result->degree() != degree) {
        throw FormParseError("terms of different degree in form expression");
      }
      result->add(mask, sign * poly);
      if (accept("+")) {
        sign = 1.0;
      } else if (accept("-")) {
        sign = -1.0;
      } else {
        break;
      }
    }
    if (peek().kind != TokenKind::End) throw FormParseError("unexpected '" + peek().text + "'");
    return *result;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool accept(std::string_view symbol) {
    if (peek().kind == TokenKind::Symbol && peek().text == symbol) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view symbol) {
    if (!accept(symbol)) throw FormParseError("expected '" + std::string(symbol) + "'");
  }

  static bool is_differential(const Token& t) {
    return t.kind == TokenKind::Name && t.text.size() == 2 && t.text[0] == 'd' && axis_of(t.text.substr(1)) >= 0;
  }

  // coefficient * factors * differentials; returns (component mask, signed coefficient function)
  std::pair<unsigned, TrigPolynomial> term() {
    TrigPolynomial poly = TrigPolynomial::constant(dim_, 1.0);
    bool any = false;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::Number) {
        poly *= t.number;
        ++pos_;
      } else if (t.kind == TokenKind::Name && (t.text == "sin" || t.text == "cos")) {
        const bool is_sin = t.text == "sin";
        ++pos_;
        expect("(");
        Wavevector k = argument();
        expect(")");
        poly = poly * (is_sin ? TrigPolynomial::sine(dim_, k) : TrigPolynomial::cosine(dim_, k));
      } else if (t.kind == TokenKind::Name && t.text == "pi") {
        poly *= std::numbers::pi;
        ++pos_;
      } else if (t.kind == TokenKind::Symbol && t.text == "(") {
        ++pos_;
        poly = poly * scalar_sum();
        expect(")");
      } else {
        break;
      }
      any = true;
      accept("*");
    }
    unsigned mask = 0;
    int sign = 1;
    if (is_differential(peek())) {
      do {
        const Token& t = peek();
        if (!is_differential(t)) throw FormParseError("expected a differential after '^'");
        const int axis = axis_of(t.text.substr(1));
        if (axis >= dim_) throw FormParseError("differential " + t.text + " exceeds torus dimension");
        const unsigned bit = 1u << axis;
        const int s = merge_sign(mask, bit);
        if (s == 0) return {mask | bit, TrigPolynomial(dim_)};  // repeated differential
        sign *= s;
        mask |= bit;
        ++pos_;
        any = true;
      } while (accept("^"));
    }
    if (!any) throw FormParseError("empty term in form expression");
    return {mask, static_cast<double>(sign) * poly};
  }

  // Parenthesized sum of function terms, e.g. the "(f + 1)" in "(f + 1) dx".
  TrigPolynomial scalar_sum() {
    TrigPolynomial sum(dim_);
    double sign = 1.0;
    if (accept("-")) sign = -1.0;
    else accept("+");
    while (true) {
      auto [mask, poly] = term();
      if (mask != 0) throw FormParseError("differentials inside parentheses are not supported");
      sum += sign * poly;
      if (accept("+")) {
        sign = 1.0;
      } else if (accept("-")) {
        sign = -1.0;
      } else {
        return sum;
      }
    }
  }

  // 2pi * (integer combination of x, y, z), in any of the usual spellings.
  Wavevector argument() {
    std::array<double, 3> coeff{0.0, 0.0, 0.0};
    linear(coeff, 1.0);
    Wavevector k{0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      const double cycles = coeff[a] / (2.0 * std::numbers::pi);
      const double rounded = std::round(cycles);
      if (std::abs(cycles - rounded) > 1e-9) {
        throw FormParseError("trig argument is not 2pi-periodic on the unit torus");
      }
      k[a] = static_cast<int>(rounded);
      if (k[a] != 0 && a >= dim_) throw FormParseError("trig argument uses an axis beyond the torus dimension");
    }
    return k;
  }

  void linear(std::array<double, 3>& coeff, double scale) {
    double sign = 1.0;
    if (accept("-")) sign = -1.0;
    else accept("+");
    while (true) {
      linear_term(coeff, scale * sign);
      if (accept("+")) {
        sign = 1.0;
      } else if (accept("-")) {
        sign = -1.0;
      } else {
        return;
      }
    }
  }

  void linear_term(std::array<double, 3>& coeff, double scale) {
    double factor = 1.0;
    bool has_variable = false;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::Number) {
        factor *= t.number;
        ++pos_;
      } else if (t.kind == TokenKind::Name && t.text == "pi") {
        factor *= std::numbers::pi;
        ++pos_;
      } else if (t.kind == TokenKind::Name && axis_of(t.text) >= 0) {
        if (has_variable) throw FormParseError("nonlinear trig argument");
        coeff[axis_of(t.text)] += scale * factor;
        has_variable = true;
        ++pos_;
      } else if (t.kind == TokenKind::Symbol && t.text == "(") {
        if (has_variable) throw FormParseError("nonlinear trig argument");
        ++pos_;
        linear(coeff, scale * factor);
        expect(")");
        has_variable = true;
      } else {
        break;
      }
      accept("*");
    }
    if (!has_variable && factor != 0.0) throw FormParseError("constant phase in trig argument");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int dim_;
};

}  // namespace

AnalyticForm parse_form(std::string_view text, int dim) {
  if (text == "taylor-green" || text == "tg") {
    if (dim != 2) throw FormParseError("the Taylor-Green form is defined on the 2-torus");
    return AnalyticForm::taylor_green();
  }
  if (dim < 1 || dim > 3) throw FormParseError("torus dimension must be 1..3");
  return Parser(tokenize(text), dim).parse();
}

}  // namespace cochainflow
