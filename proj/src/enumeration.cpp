#include "scno/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scno/errors.hpp"
#include "scno/subsets.hpp"

namespace scno {

std::vector<IndexSet> enumerate_supports(std::size_t n, std::size_t s) {
  if (s >= n) throw InputError("sparsity bound s must satisfy 0 <= s <= n-1");
  return subsets_of_size(n, s);
}

namespace {

double residual_on(const Problem& prob, const Point& x, const IndexSet& support) {
  double r = 0.0;
  for (std::size_t i : support) r = std::max(r, std::abs(prob.gradient_polys()[i].eval(x)));
  return r;
}

Eigen::VectorXd restricted_gradient(const Problem& prob, const Point& x, const IndexSet& support) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(support.size()));
  for (std::size_t a = 0; a < support.size(); ++a)
    g[static_cast<Eigen::Index>(a)] = prob.gradient_polys()[support[a]].eval(x);
  return g;
}

Point moved(const Point& x, const IndexSet& support, const Eigen::VectorXd& step, double alpha) {
  Point y = x;
  for (std::size_t a = 0; a < support.size(); ++a) y[support[a]] += alpha * step[static_cast<Eigen::Index>(a)];
  return y;
}

// Damped Newton on the restricted gradient with a Levenberg-Marquardt
// fallback when the Newton direction fails to reduce ||g||^2.
SupportSolution newton_from(const Problem& prob, const IndexSet& support, const Point& start,
                            int max_iterations, double escape_radius) {
  SupportSolution sol{start, support, start, 0, 0.0};
  Point x = start;
  Eigen::VectorXd g = restricted_gradient(prob, x, support);
  double merit = g.squaredNorm();
  const double target = 1e-28;
  int it = 0;
  for (; it < max_iterations && merit > target; ++it) {
    const Eigen::MatrixXd h = prob.hessian_at(x, support);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    bool improved = false;
    if (lu.isInvertible()) {
      const Eigen::VectorXd d = lu.solve(-g);
      for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
        Point y = moved(x, support, d, alpha);
        Eigen::VectorXd gy = restricted_gradient(prob, y, support);
        if (gy.squaredNorm() < (1.0 - 1e-4 * alpha) * merit) {
          x = std::move(y);
          g = std::move(gy);
          merit = g.squaredNorm();
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      const Eigen::MatrixXd hth = h.transpose() * h;
      const Eigen::VectorXd rhs = -h.transpose() * g;
      const double scale = std::max(1.0, hth.diagonal().maxCoeff());
      for (double mu = 1e-6 * scale; mu < 1e8 * scale; mu *= 10.0) {
        const Eigen::MatrixXd damped =
            hth + mu * Eigen::MatrixXd::Identity(h.rows(), h.cols());
        const Eigen::VectorXd d = damped.ldlt().solve(rhs);
        Point y = moved(x, support, d, 1.0);
        Eigen::VectorXd gy = restricted_gradient(prob, y, support);
        if (gy.squaredNorm() < merit) {
          x = std::move(y);
          g = std::move(gy);
          merit = g.squaredNorm();
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
    const bool escaped = std::any_of(support.begin(), support.end(),
                                     [&](std::size_t i) { return std::abs(x[i]) > escape_radius; });
    if (escaped) break;
  }
  sol.point = std::move(x);
  sol.iterations = it;
  sol.residual = residual_on(prob, sol.point, support);
  return sol;
}

std::vector<SupportSolution> solve_axis_exactly(const Problem& prob, const IndexSet& support) {
  const std::size_t axis = support.front();
  const Point origin(prob.n(), 0.0);
  const UnivariatePolynomial slope = restrict_axis(prob.objective(), origin, axis).derivative();
  std::vector<SupportSolution> out;
  for (double t : real_roots(slope)) {
    Point x = origin;
    x[axis] = t;
    out.push_back({x, support, x, 0, residual_on(prob, x, support)});
  }
  return out;
}

}  // namespace

std::vector<SupportSolution> solve_on_support(const Problem& prob, const IndexSet& support,
                                              const EnumerationOptions& options) {
  if (support.size() > prob.s()) throw InputError("support larger than the sparsity bound");
  if (options.starts_per_axis < 1) throw InputError("starts_per_axis must be at least 1");
  const std::size_t n = prob.n();
  const auto& tol = prob.tol();

  if (support.empty()) {
    Point zero(n, 0.0);
    return {SupportSolution{zero, support, zero, 0, 0.0}};
  }

  std::vector<SupportSolution> raw;
  const Point origin(n, 0.0);
  const bool axis_degenerate =
      support.size() == 1 &&
      restrict_axis(prob.objective(), origin, support.front()).derivative().is_zero();
  if (support.size() == 1 && !axis_degenerate) {
    raw = solve_axis_exactly(prob, support);
  } else {
    double extent = 0.0;
    for (const auto& iv : prob.box()) extent = std::max({extent, std::abs(iv.lo), std::abs(iv.hi)});
    const double escape = 1e3 * (extent + 1.0);
    const auto m = static_cast<std::size_t>(options.starts_per_axis);
    std::vector<std::size_t> digit(support.size(), 0);
    for (;;) {
      Point start(n, 0.0);
      for (std::size_t a = 0; a < support.size(); ++a) {
        const auto& iv = prob.box()[support[a]];
        start[support[a]] = iv.lo + (static_cast<double>(digit[a]) + 0.5) * (iv.hi - iv.lo) / static_cast<double>(m);
      }
      raw.push_back(newton_from(prob, support, start, options.max_newton_iterations, escape));
      std::size_t a = 0;
      while (a < digit.size() && ++digit[a] == m) digit[a++] = 0;
      if (a == digit.size()) break;
    }
  }

  std::vector<SupportSolution> out;
  for (auto& sol : raw) {
    if (sol.residual > tol.grad_zero) continue;
    if (!prob.in_box(sol.point, tol.dedupe_radius)) continue;
    out.push_back(std::move(sol));
  }
  return out;
}

ClassCounts tally(const std::vector<EnumeratedPoint>& points) {
  ClassCounts c;
  for (const auto& p : points) {
    switch (p.record.cls) {
      case PointClass::LocalMin: ++c.r; break;
      case PointClass::SaddleTypeI: ++c.r_I; break;
      case PointClass::SaddleTypeII: ++c.r_II; break;
      case PointClass::HigherSaddle: ++c.n_higher; break;
      case PointClass::Degenerate: ++c.n_degenerate; break;
      case PointClass::NotStationary: break;
    }
  }
  return c;
}

EnumerationResult enumerate_m_stationary(const Problem& prob, const EnumerationOptions& options) {
  const auto& tol = prob.tol();
  std::vector<SupportSolution> candidates;
  for (std::size_t size = 0; size <= prob.s(); ++size) {
    for (const IndexSet& support : subsets_of_size(prob.n(), size)) {
      auto sols = solve_on_support(prob, support, options);
      candidates.insert(candidates.end(), std::make_move_iterator(sols.begin()),
                        std::make_move_iterator(sols.end()));
    }
  }
  // Entries inside the zero band belong to a smaller support.
  for (auto& c : candidates)
    for (double& v : c.point)
      if (std::abs(v) <= tol.zero_entry) v = 0.0;

  std::sort(candidates.begin(), candidates.end(), [](const SupportSolution& a, const SupportSolution& b) {
    if (a.point != b.point) return a.point < b.point;
    if (a.scheduled_support.size() != b.scheduled_support.size())
      return a.scheduled_support.size() < b.scheduled_support.size();
    if (a.scheduled_support != b.scheduled_support) return a.scheduled_support < b.scheduled_support;
    return a.start < b.start;
  });

  std::vector<SupportSolution> kept;
  for (auto& c : candidates) {
    auto near = std::find_if(kept.begin(), kept.end(), [&](const SupportSolution& k) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < c.point.size(); ++i) d2 += (c.point[i] - k.point[i]) * (c.point[i] - k.point[i]);
      return std::sqrt(d2) <= tol.dedupe_radius;
    });
    if (near == kept.end()) {
      kept.push_back(std::move(c));
    } else if (c.residual < near->residual) {
      *near = std::move(c);
    }
  }

  EnumerationResult result;
  result.options = options;
  for (auto& k : kept) {
    StationaryRecord rec = classify_point(k.point, prob);
    if (!rec.is_m_stationary) continue;
    result.points.push_back({std::move(rec), std::move(k)});
  }
  std::sort(result.points.begin(), result.points.end(),
            [](const EnumeratedPoint& a, const EnumeratedPoint& b) { return a.record.point < b.record.point; });
  result.counts = tally(result.points);
  result.completeness_note =
      "multistart Newton (" + std::to_string(options.starts_per_axis) +
      " starts per axis) on supports of size >= 2, exact root isolation on single axes; "
      "completeness of the list is not certified";
  return result;
}

Problem perturb_problem(const Problem& prob, const Rational& epsilon, std::uint64_t seed) {
  if (epsilon < 0) throw InputError("perturbation size must be nonnegative");
  if (epsilon == 0) return prob;
  const std::size_t n = prob.n();
  std::mt19937_64 rng(seed);
  // Plain modulo keeps the draw identical across standard libraries.
  auto coefficient = [&] {
    const long k = static_cast<long>(rng() % 2001) - 1000;
    Rational c = epsilon * Rational(k, 1000);
    c.canonicalize();
    return c;
  };
  std::map<Exponents, Rational> extra;
  for (std::size_t i = 0; i < n; ++i) {
    Exponents e(n, 0);
    e[i] = 1;
    extra[e] += coefficient();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Exponents e(n, 0);
      e[i] += 1;
      e[j] += 1;
      extra[e] += coefficient();
    }
  }
  return prob.with_objective(prob.objective() + Polynomial(n, std::move(extra)));
}

}  // namespace scno
