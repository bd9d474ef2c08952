#include "scno/relaxation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "scno/errors.hpp"

namespace scno {

std::string to_string(CcSosc v) {
  switch (v) {
    case CcSosc::HoldsTrivially: return "holds_trivially";
    case CcSosc::Holds: return "holds";
    case CcSosc::Fails: return "fails";
  }
  return "?";
}

std::string ActiveConstraint::name() const {
  const std::string i = std::to_string(index + 1);
  switch (kind) {
    case ConstraintKind::Budget: return "sum(y) >= n-s";
    case ConstraintKind::YLower: return "y" + i + " >= 0";
    case ConstraintKind::YUpper: return "y" + i + " <= 1";
    case ConstraintKind::Complementarity: return "x" + i + "*y" + i + " = 0";
  }
  return "?";
}

std::vector<double> canonical_y(std::span<const double> x, const Problem& prob) {
  if (!is_feasible(x, prob)) throw InputError("point violates the sparsity constraint");
  const auto sc = classify_support(x, prob.tol());
  std::vector<double> y(prob.n(), 1.0);
  for (std::size_t i : sc.I1) y[i] = 0.0;
  return y;
}

RelaxedIndexSets relaxed_index_sets(std::span<const double> x, std::span<const double> y,
                                    const ToleranceSet& tol) {
  if (x.size() != y.size()) throw InputError("x and y differ in length");
  RelaxedIndexSets sets;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool x_zero = std::abs(x[i]) <= tol.zero_entry;
    const bool y_zero = std::abs(y[i]) <= tol.zero_entry;
    const bool y_one = std::abs(y[i] - 1.0) <= tol.zero_entry;
    if (!x_zero) {
      if (y_zero) sets.Ipm0.push_back(i);
      // x_i != 0 with y_i != 0 is infeasible and lands in no set.
    } else if (y_zero) {
      sets.I00.push_back(i);
    } else if (y_one) {
      sets.I01.push_back(i);
    } else {
      sets.I0p.push_back(i);
    }
  }
  return sets;
}

bool is_relaxation_feasible(std::span<const double> x, std::span<const double> y, const Problem& prob) {
  const std::size_t n = prob.n();
  if (x.size() != n || y.size() != n) throw InputError("point dimension does not match problem");
  const double tol = prob.tol().zero_entry;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] < -tol || y[i] > 1.0 + tol) return false;
    if (std::abs(x[i] * y[i]) > tol) return false;
    sum += y[i];
  }
  return sum >= static_cast<double>(n - prob.s()) - tol;
}

namespace {

void require_relaxation_feasible(std::span<const double> x, std::span<const double> y,
                                 const Problem& prob) {
  if (!is_relaxation_feasible(x, y, prob)) throw InputError("(x, y) is infeasible for the relaxation");
}

bool sign_admissible(const ActiveConstraint& c, double slack) {
  switch (c.kind) {
    case ConstraintKind::Budget:
    case ConstraintKind::YLower: return c.multiplier >= -slack;
    case ConstraintKind::YUpper: return c.multiplier <= slack;
    case ConstraintKind::Complementarity: return true;
  }
  return false;
}

std::vector<ActiveConstraint> active_constraints(std::span<const double> x, std::span<const double> y,
                                                 const Problem& prob) {
  const std::size_t n = prob.n();
  const double tol = prob.tol().zero_entry;
  std::vector<ActiveConstraint> active;
  const double sum = std::accumulate(y.begin(), y.end(), 0.0);
  if (std::abs(sum - static_cast<double>(n - prob.s())) <= tol) {
    ActiveConstraint c{ConstraintKind::Budget, 0, std::vector<double>(2 * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) c.gradient[n + i] = 1.0;
    active.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> g(2 * n, 0.0);
    g[n + i] = 1.0;
    if (std::abs(y[i]) <= tol) active.push_back({ConstraintKind::YLower, i, g});
    if (std::abs(y[i] - 1.0) <= tol) active.push_back({ConstraintKind::YUpper, i, g});
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> g(2 * n, 0.0);
    g[i] = y[i];
    g[n + i] = x[i];
    active.push_back({ConstraintKind::Complementarity, i, std::move(g)});
  }
  return active;
}

}  // namespace

bool is_s_stationary(std::span<const double> x, std::span<const double> y, const Problem& prob) {
  require_relaxation_feasible(x, y, prob);
  const auto sets = relaxed_index_sets(x, y, prob.tol());
  const auto g = prob.gradient_at(x);
  auto vanish = [&](const IndexSet& idx) {
    return std::all_of(idx.begin(), idx.end(),
                       [&](std::size_t i) { return std::abs(g[i]) <= prob.tol().grad_zero; });
  };
  return vanish(sets.Ipm0) && vanish(sets.I00);
}

bool m_s_roundtrip(std::span<const double> x, const Problem& prob) {
  const auto y = canonical_y(x, prob);
  return is_m_stationary(x, prob) == is_s_stationary(x, y, prob);
}

RelaxationRecord kkt_analysis(std::span<const double> x, std::span<const double> y, const Problem& prob) {
  require_relaxation_feasible(x, y, prob);
  const std::size_t n = prob.n();
  const double grad_tol = prob.tol().grad_zero;

  RelaxationRecord rec;
  rec.y.assign(y.begin(), y.end());
  rec.index_sets = relaxed_index_sets(x, y, prob.tol());
  rec.is_s_stationary = is_s_stationary(x, y, prob);
  const auto g = prob.gradient_at(x);
  rec.gamma.resize(n);
  for (std::size_t i = 0; i < n; ++i) rec.gamma[i] = -g[i];

  rec.active = active_constraints(x, y, prob);
  const auto m = static_cast<Eigen::Index>(rec.active.size());
  Eigen::MatrixXd A(2 * n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (std::size_t r = 0; r < 2 * n; ++r) A(static_cast<Eigen::Index>(r), j) = rec.active[j].gradient[r];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n));
  for (std::size_t i = 0; i < n; ++i) rhs[static_cast<Eigen::Index>(i)] = g[i];

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  rec.licq = lu.rank() == m;
  rec.multipliers_unique = rec.licq;

  auto try_columns = [&](const std::vector<Eigen::Index>& cols, Eigen::VectorXd& nu) {
    Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
    nu = Eigen::VectorXd::Zero(m);
    if (!cols.empty()) {
      const Eigen::VectorXd part = sub.completeOrthogonalDecomposition().solve(rhs);
      for (std::size_t c = 0; c < cols.size(); ++c) nu[cols[c]] = part[static_cast<Eigen::Index>(c)];
    }
    const double residual = (A * nu - rhs).lpNorm<Eigen::Infinity>();
    bool signs = true;
    for (Eigen::Index j = 0; j < m; ++j) {
      ActiveConstraint probe = rec.active[j];
      probe.multiplier = nu[j];
      signs = signs && sign_admissible(probe, grad_tol);
    }
    return std::pair{residual, signs};
  };

  std::vector<Eigen::Index> constrained;
  for (Eigen::Index j = 0; j < m; ++j)
    if (rec.active[j].is_inequality()) constrained.push_back(j);

  Eigen::VectorXd nu;
  std::vector<Eigen::Index> all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  auto [residual, signs] = try_columns(all, nu);
  rec.stationarity_residual = residual;
  rec.kkt = residual <= grad_tol && signs;

  if (!rec.kkt && !rec.licq && residual <= grad_tol) {
    // A sign-feasible multiplier, if any exists, is the minimum-norm solution
    // over the columns left after zeroing some sign-constrained multipliers.
    const std::size_t c = constrained.size();
    if (c > 20) throw NumericError("too many active inequalities for exhaustive multiplier search");
    std::vector<std::uint32_t> masks((std::size_t{1} << c) - 1);
    std::iota(masks.begin(), masks.end(), 1U);
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
    for (std::uint32_t mask : masks) {
      std::vector<Eigen::Index> cols;
      for (Eigen::Index j = 0; j < m; ++j) {
        const auto pos = std::find(constrained.begin(), constrained.end(), j);
        if (pos != constrained.end() && (mask >> (pos - constrained.begin())) & 1U) continue;
        cols.push_back(j);
      }
      Eigen::VectorXd cand;
      auto [res, ok] = try_columns(cols, cand);
      if (res <= grad_tol && ok) {
        nu = cand;
        rec.stationarity_residual = res;
        rec.kkt = true;
        break;
      }
    }
  }

  rec.lambda.assign(n, 0.0);
  rec.strict_complementarity = rec.kkt;
  // Round-off from the least-squares solve is not a multiplier.
  const double noise = 1e-12 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  for (Eigen::Index j = 0; j < m; ++j) {
    auto& c = rec.active[j];
    c.multiplier = std::abs(nu[j]) <= noise ? 0.0 : nu[j];
    if (c.kind == ConstraintKind::Complementarity) {
      rec.lambda[c.index] = c.multiplier;
    } else {
      rec.mu.push_back(c.multiplier);
      if (std::abs(c.multiplier) <= grad_tol || !sign_admissible(c, 0.0)) rec.strict_complementarity = false;
    }
  }
  return rec;
}

IndexSet cc_cone_free_indices(const RelaxedIndexSets& sets) {
  IndexSet free = sets.Ipm0;
  free.insert(free.end(), sets.I00.begin(), sets.I00.end());
  std::sort(free.begin(), free.end());
  return free;
}

CcSosc cc_sosc_check(std::span<const double> x, std::span<const double> y, const Problem& prob,
                     std::vector<double>* eigenvalues) {
  if (!is_s_stationary(x, y, prob)) throw InputError("(x, y) is not S-stationary");
  const IndexSet free = cc_cone_free_indices(relaxed_index_sets(x, y, prob.tol()));
  if (free.empty()) return CcSosc::HoldsTrivially;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prob.hessian_at(x, free), Eigen::EigenvaluesOnly);
  if (eigenvalues) eigenvalues->assign(es.eigenvalues().begin(), es.eigenvalues().end());
  return es.eigenvalues().minCoeff() > prob.tol().eig_zero ? CcSosc::Holds : CcSosc::Fails;
}

bool nondeg_from_sosc(std::span<const double> x, const Problem& prob) {
  if (!is_m_stationary(x, prob)) throw InputError("point is not M-stationary");
  if (classify_support(x, prob.tol()).k != prob.s())
    throw InputError("implication only claimed when the sparsity constraint is active");
  const auto y = canonical_y(x, prob);
  const CcSosc sosc = cc_sosc_check(x, y, prob);
  if (sosc == CcSosc::Fails) return true;
  return check_nondegeneracy(x, prob).cls == PointClass::LocalMin;
}

RelaxationRecord analyze_relaxation(std::span<const double> x, const Problem& prob,
                                    std::optional<std::vector<double>> y) {
  const std::vector<double> yy = y ? std::move(*y) : canonical_y(x, prob);
  RelaxationRecord rec = kkt_analysis(x, yy, prob);
  if (rec.is_s_stationary) {
    rec.cc_sosc = cc_sosc_check(x, yy, prob, &rec.cc_sosc_eigenvalues);
  }
  return rec;
}

}  // namespace scno
