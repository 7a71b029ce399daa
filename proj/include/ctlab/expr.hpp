#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>

#include "ctlab/core.hpp"

namespace ctlab {

/// Compiled closed-form expression in t, x1..x3.
///
/// Grammar (recursive descent, usual precedence, ^ right-associative):
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | name | name '(' args ')' | '(' expr ')' | '|' expr '|'
/// Names: t, x1, x2, x3, pi, e. Functions: exp, log, sqrt, sin, cos, tan,
/// atan (arctan), abs, sign, min, max, pos (positive part), box(a1,b1,...)
/// and ball(c1,...,cd,r), the last two being indicator functions.
class Expr {
 public:
  using Fn = std::function<double(double, const Vec&)>;

  Expr() = default;
  static Expr parse(std::string_view text) {
    Parser p{text, 0};
    Expr e;
    e.fn_ = p.expr();
    p.skip();
    if (p.pos != text.size())
      throw ConfigError("expression: unexpected '" + std::string(1, text[p.pos]) + "' at offset " +
                        std::to_string(p.pos) + " in \"" + std::string(text) + "\"");
    e.source_ = std::string(text);
    return e;
  }

  double operator()(double t, const Vec& x) const { return fn_(t, x); }
  const std::string& source() const { return source_; }
  Fn function() const { return fn_; }

 private:
  struct Parser {
    std::string_view s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw ConfigError("expression: " + what + " at offset " + std::to_string(pos) + " in \"" + std::string(s) +
                        "\"");
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Fn expr() {
      Fn lhs = term();
      for (;;) {
        if (eat('+')) {
          Fn rhs = term();
          lhs = [lhs, rhs](double t, const Vec& x) { return lhs(t, x) + rhs(t, x); };
        } else if (eat('-')) {
          Fn rhs = term();
          lhs = [lhs, rhs](double t, const Vec& x) { return lhs(t, x) - rhs(t, x); };
        } else {
          return lhs;
        }
      }
    }
    Fn term() {
      Fn lhs = unary();
      for (;;) {
        if (eat('*')) {
          Fn rhs = unary();
          lhs = [lhs, rhs](double t, const Vec& x) { return lhs(t, x) * rhs(t, x); };
        } else if (eat('/')) {
          Fn rhs = unary();
          lhs = [lhs, rhs](double t, const Vec& x) { return lhs(t, x) / rhs(t, x); };
        } else {
          return lhs;
        }
      }
    }
    Fn unary() {
      if (eat('-')) {
        Fn inner = unary();
        return [inner](double t, const Vec& x) { return -inner(t, x); };
      }
      if (eat('+')) return unary();
      return power();
    }
    Fn power() {
      Fn base = atom();
      if (eat('^')) {
        Fn ex = unary();
        return [base, ex](double t, const Vec& x) { return std::pow(base(t, x), ex(t, x)); };
      }
      return base;
    }
    Fn atom() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        Fn inner = expr();
        if (!eat(')')) fail("expected ')'");
        return inner;
      }
      if (c == '|') {
        ++pos;
        Fn inner = expr();
        if (!eat('|')) fail("expected closing '|'");
        return [inner](double t, const Vec& x) { return std::abs(inner(t, x)); };
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c))) return named();
      fail(std::string("unexpected '") + c + "'");
    }
    Fn number() {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
      if (ec != std::errc()) fail("malformed number");
      pos = static_cast<std::size_t>(end - s.data());
      return [v](double, const Vec&) { return v; };
    }
    std::vector<Fn> args() {
      std::vector<Fn> out;
      if (!eat('(')) fail("expected '('");
      if (eat(')')) return out;
      do out.push_back(expr());
      while (eat(','));
      if (!eat(')')) fail("expected ')'");
      return out;
    }
    Fn named() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      const std::string name(s.substr(start, pos - start));
      skip();
      const bool call = pos < s.size() && s[pos] == '(';
      if (!call) {
        if (name == "t") return [](double t, const Vec&) { return t; };
        if (name == "pi") return [](double, const Vec&) { return std::numbers::pi; };
        if (name == "e") return [](double, const Vec&) { return std::numbers::e; };
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '3') {
          const int a = name[1] - '1';
          return [a](double, const Vec& x) {
            if (a >= x.dim()) throw ConfigError("expression uses x" + std::to_string(a + 1) + " in dimension " +
                                                std::to_string(x.dim()));
            return x[a];
          };
        }
        fail("unknown name '" + name + "'");
      }
      const std::vector<Fn> a = args();
      auto unary_fn = [&](double (*f)(double)) -> Fn {
        if (a.size() != 1) fail(name + " takes one argument");
        Fn g = a[0];
        return [g, f](double t, const Vec& x) { return f(g(t, x)); };
      };
      if (name == "exp") return unary_fn([](double v) { return std::exp(v); });
      if (name == "log") return unary_fn([](double v) { return std::log(v); });
      if (name == "sqrt") return unary_fn([](double v) { return std::sqrt(v); });
      if (name == "sin") return unary_fn([](double v) { return std::sin(v); });
      if (name == "cos") return unary_fn([](double v) { return std::cos(v); });
      if (name == "tan") return unary_fn([](double v) { return std::tan(v); });
      if (name == "atan" || name == "arctan") return unary_fn([](double v) { return std::atan(v); });
      if (name == "abs") return unary_fn([](double v) { return std::abs(v); });
      if (name == "sign") return unary_fn([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
      if (name == "pos") return unary_fn([](double v) { return std::max(v, 0.0); });
      if (name == "min" || name == "max") {
        if (a.size() < 2) fail(name + " takes at least two arguments");
        const bool is_min = name == "min";
        return [a, is_min](double t, const Vec& x) {
          double v = a[0](t, x);
          for (std::size_t k = 1; k < a.size(); ++k) v = is_min ? std::min(v, a[k](t, x)) : std::max(v, a[k](t, x));
          return v;
        };
      }
      if (name == "box") {
        if (a.empty() || a.size() % 2 != 0) fail("box takes pairs (a1,b1,...)");
        return [a](double t, const Vec& x) {
          if (static_cast<int>(a.size() / 2) != x.dim()) throw ConfigError("box dimension mismatch");
          for (int k = 0; k < x.dim(); ++k)
            if (x[k] < a[2 * k](t, x) || x[k] > a[2 * k + 1](t, x)) return 0.0;
          return 1.0;
        };
      }
      if (name == "ball") {
        if (a.size() < 2) fail("ball takes (c1,...,cd,r)");
        return [a](double t, const Vec& x) {
          if (static_cast<int>(a.size()) - 1 != x.dim()) throw ConfigError("ball dimension mismatch");
          double r2 = 0.0;
          for (int k = 0; k < x.dim(); ++k) {
            const double dx = x[k] - a[k](t, x);
            r2 += dx * dx;
          }
          const double r = a.back()(t, x);
          return r2 <= r * r ? 1.0 : 0.0;
        };
      }
      fail("unknown function '" + name + "'");
    }
  };

  Fn fn_ = [](double, const Vec&) { return 0.0; };
  std::string source_ = "0";
};

}  // namespace ctlab
