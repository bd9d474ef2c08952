#include <doctest.h>

#include <random>

#include "scno/errors.hpp"
#include "scno/polyfun.hpp"
#include "support/oracles.hpp"

using namespace scno;

namespace {

Polynomial P(const char* text, std::size_t n = 2) { return parse_polynomial(text, n); }

std::vector<Rational> Q(std::initializer_list<const char*> xs) {
  std::vector<Rational> out;
  for (const char* x : xs) out.push_back(parse_rational(x));
  return out;
}

}  // namespace

TEST_CASE("parse_rational reads integers, fractions and decimals exactly") {
  CHECK(parse_rational("5") == 5);
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK(to_rational(0.5) == Rational(1, 2));
}

TEST_CASE("eval") {
  const auto zero2 = Q({"0", "0"});
  CHECK(P("(x1 - 1)^2 + (x2 - 1)^2").eval(zero2) == 2);
  CHECK(P("x1 + x2").eval(zero2) == 0);
  CHECK(Polynomial(2).eval(Q({"3", "-7/2"})) == 0);
  CHECK(P("x1*x2^2 - 1/3").eval(Q({"2", "3"})) == Rational(53, 3));
  const std::vector<double> xd{0.5, -1.0};
  CHECK(P("x1*x2^2 - 1/3").eval(xd) == doctest::Approx(0.5 - 1.0 / 3));
  CHECK_THROWS_AS(P("x1").eval(Q({"1"})), InputError);
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(P("x1").eval(three), InputError);
}

TEST_CASE("gradient") {
  const auto g = gradient(P("(x1 - 1)^2 + (x2 - 1)^2"));
  REQUIRE(g.size() == 2);
  CHECK(g[0] == P("2*x1 - 2"));
  CHECK(g[1] == P("2*x2 - 2"));
  const auto lin = gradient(P("x1 + x2"));
  CHECK(lin[0] == Polynomial::constant(2, 1));
  CHECK(lin[1] == Polynomial::constant(2, 1));
  for (const auto& d : gradient(P("7/3", 3))) CHECK(d.is_zero());
}

TEST_CASE("hessian") {
  const auto h = hessian(P("(x1 - 1)^2 + (x2 - 1)^2"));
  CHECK(h[0][0] == Polynomial::constant(2, 2));
  CHECK(h[1][1] == Polynomial::constant(2, 2));
  CHECK(h[0][1].is_zero());
  CHECK(h[1][0].is_zero());
  for (const auto& row : hessian(P("x1 + x2")))
    for (const auto& e : row) CHECK(e.is_zero());
  const auto c = hessian(P("x1^2*x2"));
  CHECK(c[0][0] == P("2*x2"));
  CHECK(c[0][1] == P("2*x1"));
  CHECK(c[1][0] == P("2*x1"));
  CHECK(c[1][1].is_zero());
}

TEST_CASE("expression grammar") {
  CHECK(P("-(x1 - 2)*3") == P("6 - 3*x1"));
  CHECK(P("x1/4 + 0.5*x2") == P("(1/4)*x1 + (1/2)*x2"));
  CHECK(P("2^3") == Polynomial::constant(2, 8));
  CHECK(P("+x1 - -x2") == P("x1 + x2"));

  SUBCASE("errors carry a position") {
    try {
      (void)P("x1 + * x2");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() == 6);
    }
    try {
      (void)P("x1 +\n  x3");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 3);
    }
    CHECK_THROWS_AS(P("x1 / x2"), ParseError);
    CHECK_THROWS_AS(P("x1 / (x2 - x2)"), ParseError);
    CHECK_THROWS_AS(P("(x1"), ParseError);
    CHECK_THROWS_AS(P("x1^x2"), ParseError);
    CHECK_THROWS_AS(P(""), ParseError);
  }
}

TEST_CASE("to_string parses back to the same polynomial") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 4));
    const Polynomial p = oracle::random_polynomial(rng, n, 4, 6);
    CHECK(parse_polynomial(p.to_string(), n) == p);
  }
  CHECK(Polynomial(3).to_string() == "0");
}

TEST_CASE("restrict_axis") {
  const auto zero = Q({"0", "0"});
  CHECK(restrict_axis(P("x1^2 + x2^2"), zero, 0) == UnivariatePolynomial(Q({"0", "0", "1"})));
  // (t - 1/10)^2 + 1/100
  CHECK(restrict_axis(P("(x1 - 1/10)^2 + (x2 - 1/10)^2"), zero, 0) ==
        UnivariatePolynomial(Q({"1/50", "-1/5", "1"})));
  const auto base = Q({"3/2", "-2"});
  const Polynomial p = P("x1^3 - 4*x1 + 1");
  CHECK(restrict_axis(p, base, 1) == UnivariatePolynomial({p.eval(base)}));
  CHECK_THROWS_AS(restrict_axis(p, base, 2), InputError);
}

TEST_CASE("global_min_univariate") {
  auto m = global_min_univariate(UnivariatePolynomial(Q({"0", "0", "1"})));
  REQUIRE(m);
  CHECK(m->value == doctest::Approx(0.0));
  CHECK(m->argmin == doctest::Approx(0.0));

  m = global_min_univariate(UnivariatePolynomial(Q({"1/50", "-1/5", "1"})));
  REQUIRE(m);
  CHECK(m->value == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(m->argmin == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_FALSE(global_min_univariate(UnivariatePolynomial(Q({"0", "0", "0", "1"}))));
  CHECK_FALSE(global_min_univariate(UnivariatePolynomial(Q({"0", "0", "-1"}))));
  m = global_min_univariate(UnivariatePolynomial(Q({"-5/2"})));
  REQUIRE(m);
  CHECK(m->value == -2.5);
  CHECK(m->argmin == 0.0);
  m = global_min_univariate(UnivariatePolynomial());
  REQUIRE(m);
  CHECK(m->value == 0.0);
  // t^4 - 2 t^2 has two global minimizers at +-1 with value -1
  m = global_min_univariate(UnivariatePolynomial(Q({"0", "0", "-2", "0", "1"})));
  REQUIRE(m);
  CHECK(m->value == doctest::Approx(-1.0));
  CHECK(std::abs(m->argmin) == doctest::Approx(1.0));
}

TEST_CASE("real_roots recovers known roots") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    std::set<int> roots;
    const int k = oracle::uniform_int(rng, 1, 5);
    while (static_cast<int>(roots.size()) < k) roots.insert(oracle::uniform_int(rng, -20, 20));
    std::vector<Rational> acc{1};
    for (int r : roots) {
      // multiply by (t - r/4), with a repeated factor now and then
      const int reps = oracle::uniform_int(rng, 1, 2);
      for (int rep = 0; rep < reps; ++rep) {
        std::vector<Rational> next(acc.size() + 1, 0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
          next[i + 1] += acc[i];
          next[i] -= acc[i] * Rational(r, 4);
        }
        acc = next;
      }
    }
    const auto found = real_roots(UnivariatePolynomial(acc));
    REQUIRE(found.size() == roots.size());
    std::size_t i = 0;
    for (int r : roots) CHECK(std::abs(found[i++] - r / 4.0) <= 1e-11);
  }
  CHECK(real_roots(UnivariatePolynomial(Q({"1", "0", "1"}))).empty());
  const auto sqrt2 = real_roots(UnivariatePolynomial(Q({"-2", "0", "1"})));
  REQUIRE(sqrt2.size() == 2);
  CHECK(std::abs(sqrt2[1] - std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("property: finite differences match gradient and hessian") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 4));
    const Polynomial p = oracle::random_polynomial(rng, n, 4, 8);
    Point x(n);
    for (auto& v : x) v = oracle::uniform(rng, -1.5, 1.5);
    const auto grad = gradient(p);
    const auto fd = oracle::fd_gradient(p, x);
    for (std::size_t i = 0; i < n; ++i) {
      const double exact = grad[i].eval(x);
      CHECK(std::abs(fd[i] - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
    const auto h = hessian(p);
    for (std::size_t i = 0; i < n; ++i) {
      const auto fdi = oracle::fd_gradient(grad[i], x);
      for (std::size_t j = 0; j < n; ++j) {
        const double exact = h[i][j].eval(x);
        CHECK(std::abs(fdi[j] - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST_CASE("property: hessian is symmetric as polynomials") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 4));
    const auto h = hessian(oracle::random_polynomial(rng, n, 5, 10));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(h[i][j] == h[j][i]);
  }
}

TEST_CASE("property: restriction then evaluation is exact") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 4));
    const Polynomial p = oracle::random_polynomial(rng, n, 4, 8);
    std::vector<Rational> base(n);
    for (auto& b : base) b = Rational(oracle::uniform_int(rng, -9, 9), oracle::uniform_int(rng, 1, 5));
    const std::size_t axis = static_cast<std::size_t>(oracle::uniform_int(rng, 0, static_cast<int>(n) - 1));
    const auto q = restrict_axis(p, base, axis);
    for (int k = 0; k < 5; ++k) {
      const Rational tt(oracle::uniform_int(rng, -20, 20), oracle::uniform_int(rng, 1, 7));
      auto moved = base;
      moved[axis] += tt;
      CHECK(q.eval(tt) == p.eval(moved));
    }
  }
}

TEST_CASE("property: global minimum bounds sampled values") {
  std::mt19937_64 rng(9);
  int bounded = 0;
  for (int t = 0; t < 200; ++t) {
    const int deg = oracle::uniform_int(rng, 0, 6);
    std::vector<Rational> c(static_cast<std::size_t>(deg + 1));
    for (auto& v : c) v = Rational(oracle::uniform_int(rng, -10, 10), 3);
    const UnivariatePolynomial q(c);
    const auto m = global_min_univariate(q);
    if (!m) continue;
    ++bounded;
    CHECK(q.eval(m->argmin) == doctest::Approx(m->value).epsilon(1e-9));
    for (int k = 0; k < 1000; ++k) {
      const double tt = oracle::uniform(rng, -10, 10);
      CHECK(m->value <= q.eval(tt) + 1e-9 * std::max(1.0, std::abs(m->value)));
    }
  }
  CHECK(bounded > 50);
}

TEST_CASE("polynomial arithmetic") {
  const Polynomial a = P("x1 + 1");
  const Polynomial b = P("x2 - 1");
  CHECK(a * b == P("x1*x2 - x1 + x2 - 1"));
  CHECK(a - a == Polynomial(2));
  CHECK((a + b).degree() == 1);
  CHECK(a.pow(3) == P("x1^3 + 3*x1^2 + 3*x1 + 1"));
  CHECK(Rational(1, 2) * a == P("x1/2 + 1/2"));
  CHECK_THROWS_AS((void)(a + P("x1", 3)), InputError);
  CHECK_THROWS_AS(Polynomial::variable(2, 2), InputError);
}
