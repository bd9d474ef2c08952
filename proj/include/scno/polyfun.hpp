#pragma once

// Exact multivariate polynomials over the rationals, their derivatives,
// and univariate restrictions along coordinate axes.

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scno {

using Rational = mpq_class;
using Exponents = std::vector<unsigned>;

/// Exact rational value of a double (every finite double is a dyadic rational).
Rational to_rational(double v);

/// Parses "p", "p/q" or a decimal literal such as "-0.125" exactly.
Rational parse_rational(std::string_view text);

class Polynomial {
 public:
  explicit Polynomial(std::size_t nvars);
  Polynomial(std::size_t nvars, std::map<Exponents, Rational> terms);

  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t index);

  std::size_t nvars() const noexcept { return nvars_; }
  const std::map<Exponents, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  unsigned degree() const noexcept;

  Rational eval(std::span<const Rational> x) const;
  double eval(std::span<const double> x) const;

  Polynomial derivative(std::size_t index) const;
  Polynomial pow(unsigned exponent) const;

  /// Expression in the x1..xn grammar accepted by parse_polynomial.
  std::string to_string() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Rational& c, const Polynomial& p);
  friend Polynomial operator-(const Polynomial& p);
  friend bool operator==(const Polynomial& a, const Polynomial& b);

 private:
  struct FloatTerm {
    double coeff;
    std::vector<std::pair<std::size_t, unsigned>> factors;
  };

  void normalize();
  void check_same_arity(const Polynomial& other) const;

  std::size_t nvars_;
  std::map<Exponents, Rational> terms_;
  std::vector<FloatTerm> float_terms_;
};

std::vector<Polynomial> gradient(const Polynomial& p);
std::vector<std::vector<Polynomial>> hessian(const Polynomial& p);

/// Parses an expression over x1..xn with + - * / ^ and parentheses.
/// Division is only allowed by constant subexpressions. Throws ParseError.
Polynomial parse_polynomial(std::string_view text, std::size_t nvars);

class UnivariatePolynomial {
 public:
  UnivariatePolynomial() = default;
  explicit UnivariatePolynomial(std::vector<Rational> ascending);

  const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// Degree; the zero polynomial reports 0.
  std::size_t degree() const noexcept;
  Rational leading() const;

  Rational eval(const Rational& t) const;
  double eval(double t) const;
  int sign_at(double t) const;

  UnivariatePolynomial derivative() const;

  friend bool operator==(const UnivariatePolynomial&, const UnivariatePolynomial&) = default;

 private:
  void normalize();
  std::vector<Rational> coeffs_;
};

/// Quotient and remainder of exact polynomial long division.
std::pair<UnivariatePolynomial, UnivariatePolynomial> divmod(const UnivariatePolynomial& a,
                                                             const UnivariatePolynomial& b);
/// Monic greatest common divisor.
UnivariatePolynomial gcd(UnivariatePolynomial a, UnivariatePolynomial b);

/// q(t) = p(base + t * e_axis), exactly.
UnivariatePolynomial restrict_axis(const Polynomial& p, std::span<const Rational> base,
                                   std::size_t axis);
UnivariatePolynomial restrict_axis(const Polynomial& p, std::span<const double> base,
                                   std::size_t axis);

/// Sorted distinct real roots, each located to within `precision`.
/// Isolation brackets roots between consecutive critical points of the
/// square-free part; signs at bracket ends are evaluated exactly.
std::vector<double> real_roots(const UnivariatePolynomial& q, double precision = 1e-12);

struct BoundedMinimum {
  double value;
  double argmin;
};

/// Global minimum over the real line, or nullopt when q is unbounded below.
/// Constants report argmin 0.
std::optional<BoundedMinimum> global_min_univariate(const UnivariatePolynomial& q,
                                                    double precision = 1e-12);

}  // namespace scno
