// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "scno/globalmorse.hpp"
#include "scno/relaxation.hpp"
#include "scno/subsets.hpp"
#include "scno/topology.hpp"
#include "support/problems.hpp"

using namespace scno;

namespace {

using V = std::vector<double>;

struct Outcome {
  std::vector<std::string> failures;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  }
};

double max_diff(const V& a, const V& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

const EnumeratedPoint* find(const EnumerationResult& r, const V& x, double tol = 1e-6) {
  for (const auto& p : r.points)
    if (max_diff(p.record.point, x) <= tol) return &p;
  return nullptr;
}

// The enumerated set equals `expected` within tol, one to one.
bool same_points(const EnumerationResult& r, const std::vector<V>& expected, double tol = 1e-6) {
  if (r.points.size() != expected.size()) return false;
  for (const auto& x : expected)
    if (!find(r, x, tol)) return false;
  return true;
}

Outcome criterion1() {
  Outcome o;
  const Problem p = fixtures::saddle();
  const auto r = enumerate_m_stationary(p);
  o.require(same_points(r, {{0, 0}, {1, 0}, {0, 1}}), "stationary set differs from {(0,0),(1,0),(0,1)}");
  if (const auto* e = find(r, {0, 0})) {
    o.require(e->record.cls == PointClass::SaddleTypeII && e->record.nondegenerate(), "(0,0) not a type II saddle");
    o.require(e->record.m_index == 1, "(0,0) M-index != 1");
  }
  for (const V& x : {V{1, 0}, V{0, 1}})
    if (const auto* e = find(r, x)) {
      o.require(e->record.cls == PointClass::LocalMin && e->record.m_index == 0, "minimizer misclassified");
    }
  const auto k = kkt_analysis(V{0, 0}, V{1, 1}, p);
  o.require(k.kkt, "KKT fails at (0,0,1,1)");
  o.require(k.mu.size() == 2 && std::abs(k.mu[0]) <= 1e-8 && std::abs(k.mu[1]) <= 1e-8, "mu != (0,0)");
  o.require(k.lambda.size() == 2 && std::abs(k.lambda[0] + 2) <= 1e-8 && std::abs(k.lambda[1] + 2) <= 1e-8,
            "lambda != (-2,-2)");
  o.require(!k.strict_complementarity, "strict complementarity not reported violated");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const Problem p = fixtures::linear();
  const auto r = enumerate_m_stationary(p);
  o.require(same_points(r, {{0, 0}}), "stationary set differs from {(0,0)}");
  if (const auto* e = find(r, {0, 0})) {
    o.require(e->record.nondegenerate() && e->record.m_index == 1, "(0,0) not nondegenerate with M-index 1");
  }
  const auto rel = analyze_relaxation(V{0, 0}, p);
  o.require(rel.cc_sosc == CcSosc::HoldsTrivially, "CC-SOSC not holds_trivially");
  o.require(!is_local_min_sampled(V{0, 0}, p, 0.1, 2000, 0x5eed), "sampled local minimality reported");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const Problem p = fixtures::degenerate();
  const auto rec = classify_point(V{0, 0}, p);
  o.require(rec.cls == PointClass::Degenerate && rec.nd1 == Nd1::Fails, "(0,0) not degenerate through ND1");
  o.require(is_cw_minimum(V{0, 0}, p), "unperturbed (0,0) not a CW-minimum");
  o.require(is_bf_vector(V{0, 0}, p), "unperturbed (0,0) not a BF-vector");

  const Problem q = fixtures::shifted();
  const auto r = enumerate_m_stationary(q);
  o.require(same_points(r, {{0, 0}, {0.1, 0}, {0, 0.1}}), "perturbed set differs from {(0,0),(0.1,0),(0,0.1)}");
  const auto cls = [&](const V& x) { const auto* e = find(r, x); return e ? e->record.cls : PointClass::NotStationary; };
  o.require(cls({0, 0}) == PointClass::SaddleTypeII, "perturbed (0,0) not a type II saddle");
  o.require(cls({0.1, 0}) == PointClass::LocalMin && cls({0, 0.1}) == PointClass::LocalMin,
            "perturbed minimizers misclassified");
  o.require(!is_cw_minimum(V{0, 0}, q), "perturbed (0,0) still a CW-minimum");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto saddle = morse_relation(fixtures::saddle());
  o.require(saddle.hypothesis_met && saddle.relation_lhs == 1 && saddle.relation_rhs == 1,
            "saddle example is not 1 = 1 under the hypothesis");

  // Instances whose lower level sets leave [-3,3]^n are outside the family
  // and are redrawn; any other failure of the hypothesis counts against us.
  std::mt19937_64 rng(20240601);
  int met = 0, violations = 0, equalities = 0, redrawn = 0;
  std::ostringstream unmet;
  for (int t = 0; t < 50;) {
    const std::size_t s = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 2));
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, static_cast<int>(s) + 1, 4));
    const Problem p = perturb_problem(fixtures::random_coercive(rng, n, s), Rational(1, 10), rng());
    const auto m = morse_relation(p);
    if (m.properness_warning && !m.degenerate_present) {
      ++redrawn;
      continue;
    }
    ++t;
    if (!m.hypothesis_met) {
      unmet << " #" << t << "(n=" << n << ",s=" << s << (m.degenerate_present ? ",degenerate" : "") << ")";
      continue;
    }
    ++met;
    if (!m.relation_holds) ++violations;
    if (m.relation_lhs == m.relation_rhs) ++equalities;
  }
  o.require(met == 50, "hypothesis not met on" + unmet.str());
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.detail = std::to_string(met) + "/50 instances under the hypothesis, " + std::to_string(violations) +
             " violations, " + std::to_string(equalities) + " equalities, " + std::to_string(redrawn) +
             " redrawn for leaving the box";
  return o;
}

Outcome criterion5() {
  Outcome o;
  int rows = 0;
  for (std::size_t p = 1; p <= 8; ++p)
    for (std::size_t q = 0; q < p; ++q) {
      const auto r = verify_normal_morse_data(p, q);
      ++rows;
      const std::string tag = "(p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")";
      o.require(r.skeleton_rank == static_cast<long>(binomial(p - 1, q)), "skeleton rank wrong " + tag);
      o.require(r.count_ok, "cell count wrong " + tag);
      o.require(r.contractible_ok, "union not acyclic " + tag);
      o.require(r.minimal_ok, "dropping a cell keeps acyclicity " + tag);
    }
  o.detail = std::to_string(rows) + " (p, q) pairs";
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6006);
  int points = 0, chain_bad = 0, sm_bad = 0, m_count = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 4));
    const std::size_t s = static_cast<std::size_t>(oracle::uniform_int(rng, 1, static_cast<int>(n) - 1));
    const Problem p = fixtures::random_coercive(rng, n, s);
    std::vector<Point> xs;
    for (const auto& e : enumerate_m_stationary(p).points) {
      if (xs.size() >= 25) break;
      xs.push_back(e.record.point);
    }
    while (xs.size() < 50) xs.push_back(fixtures::random_feasible(rng, p));
    for (const auto& x : xs) {
      ++points;
      const bool m = is_m_stationary(x, p);
      const bool bf = is_bf_vector(x, p);
      const bool cw = is_cw_minimum(x, p);
      m_count += m;
      if ((cw && !bf) || (bf && !m)) ++chain_bad;
      if (is_s_stationary(x, canonical_y(x, p), p) != m) ++sm_bad;
    }
  }
  o.require(points == 1000, "point count " + std::to_string(points));
  o.require(chain_bad == 0, std::to_string(chain_bad) + " CW => BF => M counterexamples");
  o.require(sm_bad == 0, std::to_string(sm_bad) + " S <=> M counterexamples");
  o.detail = std::to_string(points) + " points, " + std::to_string(m_count) + " M-stationary";
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7007);
  int grad_bad = 0, hess_bad = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 4));
    const Polynomial f = oracle::random_polynomial(rng, n, 4, 8);
    Point x(n);
    for (auto& v : x) v = oracle::uniform(rng, -2, 2);
    const auto grad = gradient(f);
    const auto hess = hessian(f);
    const auto fd = oracle::fd_gradient(f, x);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad[i].eval(std::span<const double>(x));
      if (std::abs(g - fd[i]) > 1e-6 * std::max(1.0, std::abs(g))) ++grad_bad;
      const auto fdh = oracle::fd_gradient(grad[i], x);
      for (std::size_t j = 0; j < n; ++j) {
        const double h = hess[i][j].eval(std::span<const double>(x));
        if (std::abs(h - fdh[j]) > 1e-6 * std::max(1.0, std::abs(h))) ++hess_bad;
      }
    }
  }
  o.require(grad_bad == 0, std::to_string(grad_bad) + " gradient mismatches");
  o.require(hess_bad == 0, std::to_string(hess_bad) + " Hessian mismatches");

  int solves = 0, newton_bad = 0;
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 4));
    const std::size_t s = static_cast<std::size_t>(oracle::uniform_int(rng, 2, static_cast<int>(n)) - 1);
    const Problem p = fixtures::random_quadratic(rng, n, s, 50.0);
    for (const auto& x : oracle::quadratic_stationary_points(p)) {
      IndexSet sup;
      for (std::size_t i = 0; i < n; ++i)
        if (x[i] != 0.0) sup.push_back(i);
      if (sup.size() < 2 || !p.in_box(x)) continue;
      if (std::abs(p.hessian_at(x, sup).determinant()) < 1e-6) continue;
      ++solves;
      double scale = 1.0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      bool found = false;
      for (const auto& sol : solve_on_support(p, sup))
        found = found || max_diff(sol.point, x) <= 1e-10 * scale;
      if (!found) ++newton_bad;
    }
  }
  o.require(newton_bad == 0, std::to_string(newton_bad) + " Newton solves off the exact solution");
  o.detail = "100 derivative pairs, " + std::to_string(solves) + " Newton solves";
  return o;
}

Outcome criterion8() {
  Outcome o;
  const std::vector<std::pair<std::string, Problem>> problems{
      {"saddle", fixtures::saddle()},
      {"shifted", fixtures::shifted()},
      {"perturbed", perturb_problem(fixtures::degenerate(), Rational(1, 10), 7)}};
  for (const auto& [name, p] : problems) {
    const auto e = enumerate_m_stationary(p);
    const LevelGrid coarse(p, 41, anchor_points(e));
    const LevelGrid fine(p, 81, anchor_points(e));
    const auto c41 = component_curve(coarse, e);
    const auto c81 = component_curve(fine, e);
    o.require(c41.q == c81.q, name + ": q differs between resolutions 41 and 81");
    for (const auto* g : {&coarse, &fine}) {
      const auto m = merge_bounds_check(p, *g, e);
      o.require(m.all_ok, name + ": merge bound failed");
    }
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "two-minimizer example", 1.0, criterion1},
      {2, "linear example", 1.0, criterion2},
      {3, "degenerate example and its perturbation", 0.0, criterion3},
      {4, "Morse relation on random generic instances", 60.0, criterion4},
      {5, "normal Morse data sweep", 30.0, criterion5},
      {6, "implication chain", 0.0, criterion6},
      {7, "numerical hygiene", 0.0, criterion7},
      {8, "component curve stability", 0.0, criterion8},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds)
      o.failures.push_back("runtime " + std::to_string(secs) + " s over the limit");
    std::string line = (o.failures.empty() ? "PASS " : "FAIL ") + std::to_string(c.id) + " " + c.name;
    char timing[48];
    std::snprintf(timing, sizeof timing, " [%.3f s]", secs);
    line += timing;
    if (!o.detail.empty()) line += " " + o.detail;
    for (const auto& f : o.failures) line += "; " + f;
    std::puts(line.c_str());
    failed += !o.failures.empty();
  }
  return failed ? 1 : 0;
}
