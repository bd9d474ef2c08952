#include <doctest.h>

#include "scno/errors.hpp"
#include "scno/relaxation.hpp"
#include "support/problems.hpp"

using namespace scno;

namespace {

using V = std::vector<double>;

bool has_gradient(const RelaxationRecord& r, const V& g) {
  return std::any_of(r.active.begin(), r.active.end(), [&](const ActiveConstraint& c) { return c.gradient == g; });
}

// Raw membership test for the CC-linearization cone.
bool in_cc_cone(const V& dx, const V& dy, const V& x, const V& y, std::size_t s, double eps) {
  const std::size_t n = x.size();
  double ysum = 0.0, dsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ysum += y[i];
    dsum += dy[i];
  }
  if (std::abs(ysum - static_cast<double>(n - s)) <= eps && dsum < 0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool xz = std::abs(x[i]) <= eps;
    const bool y0 = std::abs(y[i]) <= eps;
    const bool y1 = std::abs(y[i] - 1) <= eps;
    if (!xz && y0 && dy[i] != 0) return false;
    if (xz && y0 && (dy[i] < 0 || dx[i] * dy[i] != 0)) return false;
    if (xz && y1 && (dy[i] > 0 || dx[i] != 0)) return false;
    if (xz && !y0 && !y1 && dx[i] != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("canonical_y") {
  CHECK(canonical_y(V{0, 0}, fixtures::saddle()) == V{1, 1});
  CHECK(canonical_y(V{1, 0}, fixtures::saddle()) == V{0, 1});
  CHECK_THROWS_AS(canonical_y(V{1, 1}, fixtures::saddle()), InputError);
}

TEST_CASE("relaxation feasibility and index sets") {
  const Problem p = fixtures::saddle();
  CHECK(is_relaxation_feasible(V{0, 0}, V{1, 1}, p));
  CHECK(is_relaxation_feasible(V{0, 0}, V{0.5, 0.5}, p));
  CHECK_FALSE(is_relaxation_feasible(V{0, 0}, V{0.4, 0.5}, p));
  CHECK_FALSE(is_relaxation_feasible(V{1, 0}, V{1, 1}, p));
  CHECK_FALSE(is_relaxation_feasible(V{0, 0}, V{1.5, 1}, p));
  const auto sets = relaxed_index_sets(V{1, 0, 0, 0}, V{0, 0, 1, 0.5}, ToleranceSet{});
  CHECK(sets.Ipm0 == IndexSet{0});
  CHECK(sets.I00 == IndexSet{1});
  CHECK(sets.I01 == IndexSet{2});
  CHECK(sets.I0p == IndexSet{3});
}

TEST_CASE("is_s_stationary") {
  CHECK(is_s_stationary(V{0, 0}, V{1, 1}, fixtures::saddle()));
  CHECK(is_s_stationary(V{1, 0}, canonical_y(V{1, 0}, fixtures::saddle()), fixtures::saddle()));
  CHECK_FALSE(is_s_stationary(V{0.5, 0}, V{0, 1}, fixtures::saddle()));
  // with y_1 = 0 at x = 0 the gradient must vanish on I00 too
  CHECK_FALSE(is_s_stationary(V{0, 0}, V{0, 1}, fixtures::saddle()));
  CHECK_THROWS_AS(is_s_stationary(V{1, 1}, V{0, 0}, fixtures::saddle()), InputError);
}

TEST_CASE("m_s_roundtrip") {
  CHECK(m_s_roundtrip(V{0, 0}, fixtures::saddle()));
  CHECK(m_s_roundtrip(V{0, 0}, fixtures::linear()));
}

TEST_CASE("kkt_analysis at the origin of the saddle problem") {
  const auto r = kkt_analysis(V{0, 0}, V{1, 1}, fixtures::saddle());
  CHECK(r.licq);
  CHECK(r.kkt);
  CHECK(r.multipliers_unique);
  REQUIRE(r.mu.size() == 2);
  CHECK(std::abs(r.mu[0]) <= 1e-8);
  CHECK(std::abs(r.mu[1]) <= 1e-8);
  REQUIRE(r.lambda.size() == 2);
  CHECK(r.lambda[0] == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(r.lambda[1] == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK_FALSE(r.strict_complementarity);
  CHECK(has_gradient(r, V{1, 0, 0, 0}));
  CHECK(has_gradient(r, V{0, 1, 0, 0}));
  CHECK(r.gamma == V{2, 2});
}

TEST_CASE("kkt_analysis at a minimizer: LICQ fails, KKT holds") {
  // Active gradients e3, e4, e3 + e4, e3 and e2 are linearly dependent.
  const auto r = kkt_analysis(V{1, 0}, V{0, 1}, fixtures::saddle());
  CHECK_FALSE(r.licq);
  CHECK(r.kkt);
  CHECK_FALSE(r.multipliers_unique);
  CHECK(r.stationarity_residual <= 1e-10);
  CHECK_FALSE(r.strict_complementarity);
  for (const auto& c : r.active) {
    if (c.kind == ConstraintKind::YLower || c.kind == ConstraintKind::Budget) CHECK(c.multiplier >= 0);
    if (c.kind == ConstraintKind::YUpper) CHECK(c.multiplier <= 0);
  }
}

TEST_CASE("kkt_analysis fails away from stationarity") {
  const auto r = kkt_analysis(V{0.5, 0}, V{0, 1}, fixtures::saddle());
  CHECK_FALSE(r.kkt);
  CHECK_FALSE(r.is_s_stationary);
  // sign-infeasible: linear objective at a relaxed y with y1 in (0,1)
  const auto q = kkt_analysis(V{0, 0}, V{0.5, 1}, fixtures::linear());
  CHECK(q.kkt == q.is_s_stationary);
}

TEST_CASE("cc_sosc_check") {
  CHECK(cc_sosc_check(V{0, 0}, V{1, 1}, fixtures::linear()) == CcSosc::HoldsTrivially);
  std::vector<double> eig;
  CHECK(cc_sosc_check(V{1, 0}, V{0, 1}, fixtures::saddle(), &eig) == CcSosc::Holds);
  REQUIRE(eig.size() == 1);
  CHECK(eig[0] == doctest::Approx(2.0));
  const Problem concave = fixtures::make("-(x1 - 1)^2 + x2^2", 2, 1);
  CHECK(cc_sosc_check(V{1, 0}, V{0, 1}, concave) == CcSosc::Fails);
  CHECK_THROWS_AS(cc_sosc_check(V{0.5, 0}, V{0, 1}, fixtures::saddle()), InputError);
  CHECK(to_string(CcSosc::HoldsTrivially) == "holds_trivially");
}

TEST_CASE("nondeg_from_sosc") {
  CHECK(nondeg_from_sosc(V{1, 0}, fixtures::saddle()));
  CHECK(nondeg_from_sosc(V{0, 1}, fixtures::saddle()));
  CHECK_THROWS_AS(nondeg_from_sosc(V{0, 0}, fixtures::linear()), InputError);
}

TEST_CASE("analyze_relaxation with a user y") {
  const auto r = analyze_relaxation(V{0, 0}, fixtures::saddle(), V{0.5, 1});
  CHECK(r.y == V{0.5, 1});
  CHECK(r.index_sets.I0p == IndexSet{0});
  CHECK(r.cc_sosc.has_value() == r.is_s_stationary);
  CHECK_THROWS_AS(analyze_relaxation(V{0, 0}, fixtures::saddle(), V{0.2, 0.2}), InputError);
}

TEST_CASE("property: S-stationarity at canonical y matches M-stationarity") {
  std::mt19937_64 rng(17);
  int stationary = 0;
  for (int pi = 0; pi < 20; ++pi) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 4));
    const std::size_t s = static_cast<std::size_t>(oracle::uniform_int(rng, 1, static_cast<int>(n) - 1));
    const Problem p = fixtures::random_coercive(rng, n, s);
    std::vector<Point> pts;
    for (int k = 0; k < 40; ++k) pts.push_back(fixtures::random_feasible(rng, p));
    for (const auto& e : enumerate_m_stationary(p).points) pts.push_back(e.record.point);
    for (const auto& x : pts) {
      const bool m = is_m_stationary(x, p);
      stationary += m;
      CHECK(is_s_stationary(x, canonical_y(x, p), p) == m);
      CHECK(m_s_roundtrip(x, p));
      const auto r = kkt_analysis(x, canonical_y(x, p), p);
      CHECK(r.kkt == r.is_s_stationary);
      if (r.licq && r.kkt) CHECK(r.stationarity_residual <= 1e-10);
    }
  }
  CHECK(stationary > 20);
}

TEST_CASE("property: KKT matches S-stationarity at non-canonical y") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 3));
    const std::size_t s = static_cast<std::size_t>(oracle::uniform_int(rng, 1, static_cast<int>(n) - 1));
    const Problem p = fixtures::random_quadratic(rng, n, s);
    const auto x = fixtures::random_feasible(rng, p);
    // y zero on the support, values in {0, 1/2, 1} elsewhere, kept feasible
    V y(n, 0.0);
    const auto sc = classify_support(x, p.tol());
    for (auto i : sc.I0) y[i] = oracle::uniform_int(rng, 0, 2) / 2.0;
    double sum = 0;
    for (double v : y) sum += v;
    if (sum < static_cast<double>(n - s)) continue;
    const auto r = kkt_analysis(x, y, p);
    CHECK(r.kkt == r.is_s_stationary);
  }
}

TEST_CASE("property: cone reduction agrees with raw cone sampling") {
  std::mt19937_64 rng(23);
  const std::vector<double> vals{-1.0, 0.0, 0.0, 1.0, 0.5};
  auto draw = [&] { return vals[static_cast<std::size_t>(oracle::uniform_int(rng, 0, 4))]; };
  int admitted = 0;
  for (int pi = 0; pi < 40; ++pi) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 4));
    const std::size_t s = static_cast<std::size_t>(oracle::uniform_int(rng, 1, static_cast<int>(n) - 1));
    const Problem p = fixtures::random_quadratic(rng, n, s);
    const auto x = fixtures::random_feasible(rng, p);
    V y(n, 0.0);
    for (auto i : classify_support(x, p.tol()).I0) y[i] = oracle::uniform_int(rng, 0, 2) / 2.0;
    if (!is_relaxation_feasible(x, y, p)) continue;
    const IndexSet free = cc_cone_free_indices(relaxed_index_sets(x, y, p.tol()));
    for (int k = 0; k < 1000; ++k) {
      V dx(n), dy(n);
      for (auto& v : dx) v = draw();
      for (auto& v : dy) v = draw();
      if (!in_cc_cone(dx, dy, x, y, s, 1e-12)) continue;
      ++admitted;
      for (std::size_t i = 0; i < n; ++i)
        if (!std::binary_search(free.begin(), free.end(), i)) CHECK(dx[i] == 0.0);
    }
    for (auto i : free) {
      V e(n, 0.0);
      e[i] = 1.0;
      CHECK(in_cc_cone(e, V(n, 0.0), x, y, s, 1e-12));
    }
  }
  CHECK(admitted > 500);
}

TEST_CASE("property: with k = s, CC-SOSC holds exactly when the restricted hessian is positive definite") {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int pi = 0; pi < 20; ++pi) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 4));
    const std::size_t s = static_cast<std::size_t>(oracle::uniform_int(rng, 1, static_cast<int>(n) - 1));
    const Problem p = fixtures::random_quadratic(rng, n, s);
    for (const auto& e : enumerate_m_stationary(p).points) {
      const auto& r = e.record;
      if (r.support.k != s || !r.nd2) continue;
      ++checked;
      const bool pd = r.restricted_eigenvalues.front() > p.tol().eig_zero;
      CHECK((cc_sosc_check(r.point, canonical_y(r.point, p), p) == CcSosc::Holds) == pd);
      if (pd) CHECK(nondeg_from_sosc(r.point, p));
      if (pd) CHECK(is_local_min_sampled(r.point, p, 0.05, 2000));
    }
  }
  CHECK(checked > 10);
}
