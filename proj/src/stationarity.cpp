#include "scno/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scno/errors.hpp"
#include "scno/subsets.hpp"

namespace scno {

void ToleranceSet::validate() const {
  for (double v : {zero_entry, grad_zero, eig_zero, dedupe_radius}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("tolerances must be strictly positive");
  }
}

Problem::Problem(std::size_t s, Polynomial objective, std::vector<Interval> box, ToleranceSet tol)
    : s_(s), objective_(std::move(objective)), box_(std::move(box)), tol_(tol) {
  const std::size_t n = objective_.nvars();
  if (s_ >= n) throw InputError("sparsity bound s must satisfy 0 <= s <= n-1");
  if (box_.size() != n) throw InputError("box must have one interval per variable");
  for (const auto& iv : box_) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi)
      throw InputError("box intervals must be finite and nonempty");
    if (iv.lo > 0.0 || iv.hi < 0.0) throw InputError("box must contain the origin");
  }
  tol_.validate();
  grad_ = gradient(objective_);
  hess_ = hessian(objective_);
}

void Problem::check_dim(std::span<const double> x) const {
  if (x.size() != n())
    throw InputError("point has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(n()));
}

double Problem::value(std::span<const double> x) const {
  check_dim(x);
  return objective_.eval(x);
}

std::vector<double> Problem::gradient_at(std::span<const double> x) const {
  check_dim(x);
  std::vector<double> g(n());
  for (std::size_t i = 0; i < n(); ++i) g[i] = grad_[i].eval(x);
  return g;
}

Eigen::MatrixXd Problem::hessian_at(std::span<const double> x) const {
  IndexSet all(n());
  for (std::size_t i = 0; i < n(); ++i) all[i] = i;
  return hessian_at(x, all);
}

Eigen::MatrixXd Problem::hessian_at(std::span<const double> x, const IndexSet& idx) const {
  check_dim(x);
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      h(a, b) = hess_[idx[a]][idx[b]].eval(x);
      h(b, a) = h(a, b);
    }
  }
  return h;
}

bool Problem::in_box(std::span<const double> x, double slack) const {
  check_dim(x);
  for (std::size_t i = 0; i < n(); ++i)
    if (x[i] < box_[i].lo - slack || x[i] > box_[i].hi + slack) return false;
  return true;
}

Problem Problem::with_objective(Polynomial objective) const {
  return Problem(s_, std::move(objective), box_, tol_);
}

Problem Problem::with_tolerances(ToleranceSet tol) const { return Problem(s_, objective_, box_, tol); }

std::string to_string(Nd1 v) {
  switch (v) {
    case Nd1::Holds: return "holds";
    case Nd1::Fails: return "fails";
    case Nd1::Vacuous: return "vacuous";
  }
  return "?";
}

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::LocalMin: return "LocalMin";
    case PointClass::SaddleTypeI: return "SaddleTypeI";
    case PointClass::SaddleTypeII: return "SaddleTypeII";
    case PointClass::HigherSaddle: return "HigherSaddle";
    case PointClass::Degenerate: return "Degenerate";
    case PointClass::NotStationary: return "NotStationary";
  }
  return "?";
}

SupportClassification classify_support(std::span<const double> x, const ToleranceSet& tol) {
  SupportClassification sc;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) <= tol.zero_entry) {
      sc.I0.push_back(i);
    } else {
      sc.I1.push_back(i);
    }
  }
  sc.k = sc.I1.size();
  return sc;
}

bool is_feasible(std::span<const double> x, const Problem& prob) {
  if (x.size() != prob.n()) throw InputError("point dimension does not match problem");
  return classify_support(x, prob.tol()).k <= prob.s();
}

namespace {

void require_feasible(std::span<const double> x, const Problem& prob) {
  if (!is_feasible(x, prob)) throw InputError("point violates the sparsity constraint");
}

bool vanishes_on(const std::vector<double>& g, const IndexSet& idx, double tol) {
  return std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return std::abs(g[i]) <= tol; });
}

PointClass class_of(const StationaryRecord& r, std::size_t s) {
  if (!r.feasible || !r.is_m_stationary) return PointClass::NotStationary;
  if (!r.nondegenerate()) return PointClass::Degenerate;
  const int mi = *r.m_index;
  if (mi == 0) return PointClass::LocalMin;
  if (mi == 1) return r.support.k == s ? PointClass::SaddleTypeI : PointClass::SaddleTypeII;
  return PointClass::HigherSaddle;
}

StationaryRecord analyze(std::span<const double> x, const Problem& prob) {
  const auto& tol = prob.tol();
  StationaryRecord rec;
  rec.point.assign(x.begin(), x.end());
  rec.support = classify_support(x, tol);
  rec.feasible = rec.support.k <= prob.s();
  rec.value = prob.value(x);
  rec.gradient = prob.gradient_at(x);
  rec.is_m_stationary = rec.feasible && vanishes_on(rec.gradient, rec.support.I1, tol.grad_zero);

  const std::size_t k = rec.support.k;
  if (k >= prob.s()) {
    rec.nd1 = Nd1::Vacuous;
  } else {
    const bool all_nonzero = std::all_of(rec.support.I0.begin(), rec.support.I0.end(), [&](std::size_t i) {
      return std::abs(rec.gradient[i]) > tol.grad_zero;
    });
    rec.nd1 = all_nonzero ? Nd1::Holds : Nd1::Fails;
  }

  int negative = 0;
  rec.nd2 = true;
  if (k > 0) {
    const Eigen::MatrixXd h = prob.hessian_at(x, rec.support.I1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double ev = es.eigenvalues()[i];
      rec.restricted_eigenvalues.push_back(ev);
      if (std::abs(ev) <= tol.eig_zero) rec.nd2 = false;
      if (ev < -tol.eig_zero) ++negative;
    }
  }
  if (rec.is_m_stationary && rec.nd2) {
    rec.qi = negative;
    rec.m_index = static_cast<int>(prob.s()) - static_cast<int>(k) + negative;
  }
  rec.cls = class_of(rec, prob.s());
  return rec;
}

}  // namespace

bool is_m_stationary(std::span<const double> x, const Problem& prob) {
  require_feasible(x, prob);
  const auto sc = classify_support(x, prob.tol());
  return vanishes_on(prob.gradient_at(x), sc.I1, prob.tol().grad_zero);
}

StationaryRecord check_nondegeneracy(std::span<const double> x, const Problem& prob) {
  if (!is_m_stationary(x, prob)) throw InputError("point is not M-stationary");
  return analyze(x, prob);
}

StationaryRecord classify_point(std::span<const double> x, const Problem& prob) {
  if (x.size() != prob.n()) throw InputError("point dimension does not match problem");
  return analyze(x, prob);
}

bool is_local_min_sampled(std::span<const double> x, const Problem& prob, double radius,
                          int samples, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InputError("radius must be positive");
  if (samples <= 0) throw InputError("sample count must be positive");
  require_feasible(x, prob);
  const std::size_t n = prob.n();
  const auto sc = classify_support(x, prob.tol());
  const double fx = prob.value(x);
  const double slack = prob.tol().grad_zero;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> decade(0.0, 3.0);

  auto beats = [&](const Point& z) {
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist = std::max(dist, std::abs(z[i] - x[i]));
    if (dist > radius) return false;
    return prob.value(z) < fx - slack;
  };

  for (std::size_t size = 0; size <= prob.s(); ++size) {
    for (const IndexSet& J : subsets_of_size(n, size)) {
      const bool superset = std::includes(J.begin(), J.end(), sc.I1.begin(), sc.I1.end());
      const bool subset = std::includes(sc.I1.begin(), sc.I1.end(), J.begin(), J.end());
      if (!superset && !subset) continue;

      Point base(n, 0.0);
      for (std::size_t i : J) base[i] = x[i];

      // Axis probes at a few scales, then random probes at random scales.
      for (std::size_t i : J) {
        for (double scale : {1.0, 0.1, 0.01, 0.001}) {
          for (double sign : {-1.0, 1.0}) {
            Point z = base;
            z[i] += sign * scale * radius;
            if (beats(z)) return false;
          }
        }
      }
      if (J.empty()) {
        if (beats(base)) return false;
        continue;
      }
      for (int t = 0; t < samples; ++t) {
        const double rho = radius * std::pow(10.0, -decade(rng));
        Point z = base;
        for (std::size_t i : J) z[i] += rho * unit(rng);
        if (beats(z)) return false;
      }
    }
  }
  return true;
}

bool is_bf_vector(std::span<const double> x, const Problem& prob) {
  require_feasible(x, prob);
  const auto sc = classify_support(x, prob.tol());
  const auto g = prob.gradient_at(x);
  if (sc.k < prob.s()) {
    IndexSet all(prob.n());
    for (std::size_t i = 0; i < prob.n(); ++i) all[i] = i;
    return vanishes_on(g, all, prob.tol().grad_zero);
  }
  return vanishes_on(g, sc.I1, prob.tol().grad_zero);
}

bool is_cw_minimum(std::span<const double> x, const Problem& prob) {
  require_feasible(x, prob);
  const auto sc = classify_support(x, prob.tol());
  const std::size_t n = prob.n();
  std::vector<Rational> exact;
  exact.reserve(n);
  for (double v : x) exact.push_back(to_rational(v));
  const double fx = prob.objective().eval(exact).get_d();
  const double slack = prob.tol().grad_zero;

  auto line_ok = [&](const std::vector<Rational>& base, std::size_t axis) {
    const auto m = global_min_univariate(restrict_axis(prob.objective(), base, axis));
    return m.has_value() && m->value >= fx - slack;
  };

  if (sc.k < prob.s()) {
    for (std::size_t i = 0; i < n; ++i)
      if (!line_ok(exact, i)) return false;
    return true;
  }
  for (std::size_t i : sc.I1) {
    std::vector<Rational> base = exact;
    base[i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (!line_ok(base, j)) return false;
  }
  return true;
}

}  // namespace scno
