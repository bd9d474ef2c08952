#pragma once

// The continuous relaxation
//   min f(x)  s.t.  sum_i y_i >= n - s,  0 <= y_i <= 1,  x_i y_i = 0,
// analysed at a point (x, y): index sets, S-stationarity, KKT multipliers
// and the second-order condition on the CC-linearization cone.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scno/stationarity.hpp"

namespace scno {

struct RelaxedIndexSets {
  IndexSet Ipm0;  ///< x_i != 0, y_i = 0
  IndexSet I00;   ///< x_i = 0,  y_i = 0
  IndexSet I01;   ///< x_i = 0,  y_i = 1
  IndexSet I0p;   ///< x_i = 0,  0 < y_i < 1
};

enum class CcSosc { HoldsTrivially, Holds, Fails };
std::string to_string(CcSosc v);

enum class ConstraintKind {
  Budget,           ///< sum y >= n - s, multiplier >= 0
  YLower,           ///< y_i >= 0,       multiplier >= 0
  YUpper,           ///< y_i <= 1,       multiplier <= 0
  Complementarity,  ///< x_i y_i = 0,    multiplier free
};

/// Active constraint of the relaxation. The gradient is that of the
/// constraint function itself (sum y, y_i or x_i y_i) over (x, y), and the
/// multiplier enters as  grad f = sum_j multiplier_j * gradient_j.
struct ActiveConstraint {
  ConstraintKind kind;
  std::size_t index = 0;  ///< coordinate for per-index constraints
  std::vector<double> gradient;
  double multiplier = 0.0;

  std::string name() const;
  bool is_inequality() const noexcept { return kind != ConstraintKind::Complementarity; }
};

struct RelaxationRecord {
  std::vector<double> y;
  RelaxedIndexSets index_sets;
  bool is_s_stationary = false;
  std::vector<double> gamma;            ///< S-stationarity multipliers, -grad f
  std::vector<ActiveConstraint> active; ///< multipliers filled when kkt holds
  std::vector<double> mu;               ///< multipliers of active inequalities, in `active` order
  std::vector<double> lambda;           ///< complementarity multipliers, one per coordinate
  bool licq = false;
  bool kkt = false;
  bool multipliers_unique = false;
  bool strict_complementarity = false;
  double stationarity_residual = 0.0;
  std::optional<CcSosc> cc_sosc;  ///< present when S-stationary
  std::vector<double> cc_sosc_eigenvalues;
};

/// y_i = 0 on the support of x, 1 elsewhere. Throws InputError for infeasible x.
std::vector<double> canonical_y(std::span<const double> x, const Problem& prob);

RelaxedIndexSets relaxed_index_sets(std::span<const double> x, std::span<const double> y,
                                    const ToleranceSet& tol);

bool is_relaxation_feasible(std::span<const double> x, std::span<const double> y, const Problem& prob);

/// Throws InputError when (x, y) is infeasible for the relaxation.
bool is_s_stationary(std::span<const double> x, std::span<const double> y, const Problem& prob);

/// M-stationarity of x agrees with S-stationarity of (x, canonical_y(x)).
bool m_s_roundtrip(std::span<const double> x, const Problem& prob);

/// Active set, LICQ, KKT multipliers and strict complementarity at (x, y).
/// Without LICQ the multiplier system is searched exhaustively over which
/// sign-constrained multipliers vanish. Throws InputError for infeasible pairs.
RelaxationRecord kkt_analysis(std::span<const double> x, std::span<const double> y, const Problem& prob);

/// The d_x-projection of the CC-linearization cone is the coordinate subspace
/// on I+-0 and I00, so the check reduces to a restricted Hessian.
/// Throws InputError unless (x, y) is S-stationary.
CcSosc cc_sosc_check(std::span<const double> x, std::span<const double> y, const Problem& prob,
                     std::vector<double>* eigenvalues = nullptr);

/// Indices on which d_x may be nonzero inside the CC-linearization cone.
IndexSet cc_cone_free_indices(const RelaxedIndexSets& sets);

/// Truth value of "CC-SOSC at canonical y implies nondegenerate local minimizer".
/// Requires an M-stationary x with ||x||_0 = s; throws InputError otherwise.
bool nondeg_from_sosc(std::span<const double> x, const Problem& prob);

/// kkt_analysis plus the CC-SOSC verdict, at the canonical y unless one is given.
RelaxationRecord analyze_relaxation(std::span<const double> x, const Problem& prob,
                                    std::optional<std::vector<double>> y = std::nullopt);

}  // namespace scno
