#include "scno/polyfun.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "scno/errors.hpp"

namespace scno {

Rational to_rational(double v) {
  if (!std::isfinite(v)) throw InputError("non-finite value cannot be made exact");
  Rational r(v);
  r.canonicalize();
  return r;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw InputError("empty rational literal");
  const auto dot = s.find('.');
  const auto slash = s.find('/');
  try {
    if (dot != std::string::npos) {
      if (slash != std::string::npos) throw InputError("mixed decimal/fraction literal: " + s);
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      const std::size_t scale = s.size() - dot - 1;
      if (digits.empty() || digits == "-" || digits == "+")
        throw InputError("bad decimal literal: " + s);
      if (digits[0] == '+') digits.erase(0, 1);
      Rational r(mpz_class(digits, 10), mpz_class("1" + std::string(scale, '0'), 10));
      r.canonicalize();
      return r;
    }
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    Rational r(s, 10);
    if (r.get_den() == 0) throw InputError("zero denominator: " + s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw InputError("bad rational literal: " + std::string(text));
  }
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::size_t nvars) : nvars_(nvars) {
  if (nvars == 0) throw InputError("polynomial needs at least one variable");
}

Polynomial::Polynomial(std::size_t nvars, std::map<Exponents, Rational> terms)
    : nvars_(nvars), terms_(std::move(terms)) {
  if (nvars == 0) throw InputError("polynomial needs at least one variable");
  for (const auto& [exps, c] : terms_) {
    if (exps.size() != nvars_)
      throw InputError("exponent tuple length " + std::to_string(exps.size()) +
                       " does not match nvars " + std::to_string(nvars_));
  }
  normalize();
}

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  return Polynomial(nvars, {{Exponents(nvars, 0), c}});
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw InputError("variable index out of range");
  Exponents e(nvars, 0);
  e[index] = 1;
  return Polynomial(nvars, {{e, Rational(1)}});
}

void Polynomial::normalize() {
  float_terms_.clear();
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second.canonicalize();
    if (it->second == 0) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  float_terms_.reserve(terms_.size());
  for (const auto& [exps, c] : terms_) {
    FloatTerm t{c.get_d(), {}};
    for (std::size_t i = 0; i < exps.size(); ++i)
      if (exps[i] != 0) t.factors.emplace_back(i, exps[i]);
    float_terms_.push_back(std::move(t));
  }
}

void Polynomial::check_same_arity(const Polynomial& other) const {
  if (other.nvars_ != nvars_) throw InputError("polynomials have different numbers of variables");
}

unsigned Polynomial::degree() const noexcept {
  unsigned d = 0;
  for (const auto& [exps, c] : terms_) {
    unsigned total = 0;
    for (unsigned e : exps) total += e;
    d = std::max(d, total);
  }
  return d;
}

Rational Polynomial::eval(std::span<const Rational> x) const {
  if (x.size() != nvars_) throw InputError("point dimension does not match polynomial");
  Rational sum = 0;
  for (const auto& [exps, c] : terms_) {
    Rational term = c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (exps[i] == 0) continue;
      Rational pw;
      mpz_pow_ui(pw.get_num_mpz_t(), x[i].get_num_mpz_t(), exps[i]);
      mpz_pow_ui(pw.get_den_mpz_t(), x[i].get_den_mpz_t(), exps[i]);
      term *= pw;
    }
    sum += term;
  }
  sum.canonicalize();
  return sum;
}

namespace {
double ipow(double base, unsigned e) {
  double r = 1.0;
  while (e) {
    if (e & 1U) r *= base;
    base *= base;
    e >>= 1U;
  }
  return r;
}
}  // namespace

double Polynomial::eval(std::span<const double> x) const {
  if (x.size() != nvars_) throw InputError("point dimension does not match polynomial");
  double sum = 0.0;
  for (const auto& t : float_terms_) {
    double v = t.coeff;
    for (const auto& [i, e] : t.factors) v *= ipow(x[i], e);
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::derivative(std::size_t index) const {
  if (index >= nvars_) throw InputError("derivative index out of range");
  std::map<Exponents, Rational> out;
  for (const auto& [exps, c] : terms_) {
    if (exps[index] == 0) continue;
    Exponents e = exps;
    e[index] -= 1;
    out[e] += c * exps[index];
  }
  return Polynomial(nvars_, std::move(out));
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result = constant(nvars_, 1);
  Polynomial base = *this;
  while (exponent) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent) base = base * base;
  }
  return result;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  a.check_same_arity(b);
  auto terms = a.terms_;
  for (const auto& [e, c] : b.terms_) terms[e] += c;
  return Polynomial(a.nvars_, std::move(terms));
}

Polynomial operator-(const Polynomial& p) {
  auto terms = p.terms_;
  for (auto& [e, c] : terms) c = -c;
  return Polynomial(p.nvars_, std::move(terms));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_arity(b);
  std::map<Exponents, Rational> terms;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e(a.nvars_);
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      terms[e] += ca * cb;
    }
  }
  return Polynomial(a.nvars_, std::move(terms));
}

Polynomial operator*(const Rational& c, const Polynomial& p) {
  auto terms = p.terms_;
  for (auto& [e, v] : terms) v *= c;
  return Polynomial(p.nvars_, std::move(terms));
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest total degree first reads naturally; map order breaks ties.
  std::vector<const std::pair<const Exponents, Rational>*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    unsigned da = 0, db = 0;
    for (unsigned e : a->first) da += e;
    for (unsigned e : b->first) db += e;
    return da > db;
  });
  for (const auto* t : order) {
    const auto& [exps, c] = *t;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    std::vector<std::string> factors;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (exps[i] == 0) continue;
      std::string f = "x" + std::to_string(i + 1);
      if (exps[i] > 1) f += "^" + std::to_string(exps[i]);
      factors.push_back(std::move(f));
    }
    const bool unit = mag == 1;
    if (factors.empty() || !unit) {
      if (mag.get_den() == 1) {
        os << mag.get_str();
      } else {
        os << (factors.empty() ? mag.get_str() : "(" + mag.get_str() + ")");
      }
      if (!factors.empty()) os << "*";
    }
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k) os << "*";
      os << factors[k];
    }
  }
  return os.str();
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) g.push_back(p.derivative(i));
  return g;
}

std::vector<std::vector<Polynomial>> hessian(const Polynomial& p) {
  const auto g = gradient(p);
  std::vector<std::vector<Polynomial>> h(p.nvars(), std::vector<Polynomial>(p.nvars(), Polynomial(p.nvars())));
  for (std::size_t i = 0; i < p.nvars(); ++i) {
    for (std::size_t j = i; j < p.nvars(); ++j) {
      h[i][j] = g[i].derivative(j);
      h[j][i] = h[i][j];
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::size_t nvars) : text_(text), nvars_(nvars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Polynomial d = unary();
        if (d.degree() != 0 || d.is_zero()) {
          pos_ = at;
          fail("division only by a nonzero constant");
        }
        acc = Rational(1 / d.terms().begin()->second) * acc;
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a nonnegative integer literal");
      const std::string digits(text_.substr(start, pos_ - start));
      if (digits.size() > 4) fail("exponent too large");
      return base.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  Polynomial primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        ++pos_;
      try {
        return Polynomial::constant(nvars_, parse_rational(text_.substr(start, pos_ - start)));
      } catch (const InputError&) {
        pos_ = start;
        fail("malformed number");
      }
    }
    if (c == 'x' || c == 'X') {
      const std::size_t start = pos_;
      ++pos_;
      const std::size_t digits_at = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (digits_at == pos_) {
        pos_ = start;
        fail("variable must be written x1..x" + std::to_string(nvars_));
      }
      const auto idx = std::stoul(std::string(text_.substr(digits_at, pos_ - digits_at)));
      if (idx == 0 || idx > nvars_) {
        pos_ = start;
        fail("variable index out of range 1.." + std::to_string(nvars_));
      }
      return Polynomial::variable(nvars_, idx - 1);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t nvars) {
  if (nvars == 0) throw InputError("polynomial needs at least one variable");
  return ExpressionParser(text, nvars).parse();
}

// ---------------------------------------------------------------------------
// UnivariatePolynomial

UnivariatePolynomial::UnivariatePolynomial(std::vector<Rational> ascending)
    : coeffs_(std::move(ascending)) {
  normalize();
}

void UnivariatePolynomial::normalize() {
  for (auto& c : coeffs_) c.canonicalize();
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

std::size_t UnivariatePolynomial::degree() const noexcept {
  return coeffs_.empty() ? 0 : coeffs_.size() - 1;
}

Rational UnivariatePolynomial::leading() const { return coeffs_.empty() ? Rational(0) : coeffs_.back(); }

Rational UnivariatePolynomial::eval(const Rational& t) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  acc.canonicalize();
  return acc;
}

double UnivariatePolynomial::eval(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + it->get_d();
  return acc;
}

int UnivariatePolynomial::sign_at(double t) const { return sgn(eval(to_rational(t))); }

UnivariatePolynomial UnivariatePolynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<unsigned long>(i);
  return UnivariatePolynomial(std::move(d));
}

std::pair<UnivariatePolynomial, UnivariatePolynomial> divmod(const UnivariatePolynomial& a,
                                                             const UnivariatePolynomial& b) {
  if (b.is_zero()) throw InputError("polynomial division by zero");
  std::vector<Rational> rem = a.coeffs();
  const auto& bc = b.coeffs();
  if (rem.size() < bc.size()) return {UnivariatePolynomial{}, a};
  std::vector<Rational> quot(rem.size() - bc.size() + 1);
  for (std::size_t k = quot.size(); k-- > 0;) {
    const Rational f = rem[k + bc.size() - 1] / bc.back();
    quot[k] = f;
    for (std::size_t j = 0; j < bc.size(); ++j) rem[k + j] -= f * bc[j];
  }
  rem.resize(bc.size() - 1);
  return {UnivariatePolynomial(std::move(quot)), UnivariatePolynomial(std::move(rem))};
}

UnivariatePolynomial gcd(UnivariatePolynomial a, UnivariatePolynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  std::vector<Rational> c = a.coeffs();
  const Rational lead = c.back();
  for (auto& v : c) v /= lead;
  return UnivariatePolynomial(std::move(c));
}

UnivariatePolynomial restrict_axis(const Polynomial& p, std::span<const Rational> base,
                                   std::size_t axis) {
  if (base.size() != p.nvars()) throw InputError("base point dimension does not match polynomial");
  if (axis >= p.nvars()) throw InputError("axis out of range");
  std::vector<Rational> coeffs(p.degree() + 1);
  for (const auto& [exps, c] : p.terms()) {
    Rational fixed = c;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (i == axis) continue;
      for (unsigned k = 0; k < exps[i]; ++k) fixed *= base[i];
    }
    if (fixed == 0) continue;
    // (base_axis + t)^e = sum_j C(e, j) base_axis^(e-j) t^j
    const unsigned e = exps[axis];
    mpz_class binom = 1;
    for (unsigned j = 0; j <= e; ++j) {
      Rational pw = 1;
      for (unsigned k = 0; k < e - j; ++k) pw *= base[axis];
      coeffs[j] += fixed * Rational(binom) * pw;
      binom = binom * (e - j) / (j + 1);
    }
  }
  return UnivariatePolynomial(std::move(coeffs));
}

UnivariatePolynomial restrict_axis(const Polynomial& p, std::span<const double> base,
                                   std::size_t axis) {
  std::vector<Rational> exact;
  exact.reserve(base.size());
  for (double v : base) exact.push_back(to_rational(v));
  return restrict_axis(p, exact, axis);
}

namespace {

double cauchy_bound(const UnivariatePolynomial& q) {
  const auto& c = q.coeffs();
  const Rational lead = abs(c.back());
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) m = std::max(m, Rational(abs(c[i]) / lead).get_d());
  return 1.0 + m;
}

std::vector<double> roots_of_squarefree(const UnivariatePolynomial& q, double precision) {
  if (q.degree() == 0) return {};
  if (q.degree() == 1) {
    const Rational r = -q.coeffs()[0] / q.coeffs()[1];
    return {r.get_d()};
  }
  const double bound = cauchy_bound(q);
  std::vector<double> fences{-bound};
  for (double c : real_roots(q.derivative(), precision))
    if (c > -bound && c < bound) fences.push_back(c);
  fences.push_back(bound);

  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < fences.size(); ++k) {
    double lo = fences[k];
    double hi = fences[k + 1];
    int slo = q.sign_at(lo);
    const int shi = q.sign_at(hi);
    if (slo == 0) {
      roots.push_back(lo);
      continue;
    }
    if (shi == 0) {
      roots.push_back(hi);
      continue;
    }
    if (slo == shi) continue;
    // Monotone between consecutive critical points: exactly one root.
    while (hi - lo > precision) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const int sm = q.sign_at(mid);
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      if (sm == slo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> distinct;
  for (double r : roots)
    if (distinct.empty() || r - distinct.back() > 2 * precision) distinct.push_back(r);
  return distinct;
}

}  // namespace

std::vector<double> real_roots(const UnivariatePolynomial& q, double precision) {
  if (q.is_zero() || q.degree() == 0) return {};
  const UnivariatePolynomial g = gcd(q, q.derivative());
  const UnivariatePolynomial squarefree = g.degree() == 0 ? q : divmod(q, g).first;
  return roots_of_squarefree(squarefree, precision);
}

std::optional<BoundedMinimum> global_min_univariate(const UnivariatePolynomial& q,
                                                    double precision) {
  if (q.is_zero()) return BoundedMinimum{0.0, 0.0};
  if (q.degree() == 0) return BoundedMinimum{q.coeffs()[0].get_d(), 0.0};
  if (q.degree() % 2 == 1 || q.leading() < 0) return std::nullopt;
  std::optional<BoundedMinimum> best;
  for (double t : real_roots(q.derivative(), precision)) {
    const double v = q.eval(to_rational(t)).get_d();
    if (!best || v < best->value) best = BoundedMinimum{v, t};
  }
  if (!best) throw NumericError("even-degree polynomial reported no critical point");
  return best;
}

}  // namespace scno
