#pragma once

// Problem definition and pointwise classification of feasible points of
//   min f(x)  s.t.  ||x||_0 <= s.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scno/polyfun.hpp"

namespace scno {

using Point = std::vector<double>;
using IndexSet = std::vector<std::size_t>;  // sorted, 0-based

struct ToleranceSet {
  double zero_entry = 1e-9;     ///< |x_i| at or below this counts as zero
  double grad_zero = 1e-8;      ///< |df/dx_i| at or below this counts as zero
  double eig_zero = 1e-8;       ///< restricted Hessian eigenvalue treated as singular
  double dedupe_radius = 1e-6;  ///< points closer than this are merged

  void validate() const;
};

struct Interval {
  double lo;
  double hi;
};

/// Immutable problem data with derivative polynomials precomputed.
class Problem {
 public:
  Problem(std::size_t s, Polynomial objective, std::vector<Interval> box, ToleranceSet tol = {});

  std::size_t n() const noexcept { return objective_.nvars(); }
  std::size_t s() const noexcept { return s_; }
  const Polynomial& objective() const noexcept { return objective_; }
  const std::vector<Interval>& box() const noexcept { return box_; }
  const ToleranceSet& tol() const noexcept { return tol_; }

  double value(std::span<const double> x) const;
  std::vector<double> gradient_at(std::span<const double> x) const;
  Eigen::MatrixXd hessian_at(std::span<const double> x) const;
  /// Hessian block on rows/columns `idx`.
  Eigen::MatrixXd hessian_at(std::span<const double> x, const IndexSet& idx) const;

  const std::vector<Polynomial>& gradient_polys() const noexcept { return grad_; }
  const std::vector<std::vector<Polynomial>>& hessian_polys() const noexcept { return hess_; }

  bool in_box(std::span<const double> x, double slack = 0.0) const;

  Problem with_objective(Polynomial objective) const;
  Problem with_tolerances(ToleranceSet tol) const;

 private:
  void check_dim(std::span<const double> x) const;

  std::size_t s_;
  Polynomial objective_;
  std::vector<Interval> box_;
  ToleranceSet tol_;
  std::vector<Polynomial> grad_;
  std::vector<std::vector<Polynomial>> hess_;
};

struct SupportClassification {
  IndexSet I0;
  IndexSet I1;
  std::size_t k = 0;
};

enum class Nd1 { Holds, Fails, Vacuous };

enum class PointClass { LocalMin, SaddleTypeI, SaddleTypeII, HigherSaddle, Degenerate, NotStationary };

std::string to_string(Nd1 v);
std::string to_string(PointClass c);

struct StationaryRecord {
  Point point;
  SupportClassification support;
  bool feasible = false;
  bool is_m_stationary = false;
  Nd1 nd1 = Nd1::Vacuous;
  bool nd2 = false;
  std::optional<int> qi;
  std::optional<int> m_index;
  PointClass cls = PointClass::NotStationary;
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> restricted_eigenvalues;  ///< ascending

  bool nondegenerate() const noexcept {
    return is_m_stationary && nd1 != Nd1::Fails && nd2;
  }
};

SupportClassification classify_support(std::span<const double> x, const ToleranceSet& tol);
bool is_feasible(std::span<const double> x, const Problem& prob);

/// Throws InputError for infeasible x.
bool is_m_stationary(std::span<const double> x, const Problem& prob);

/// Full ND1/ND2/QI/M-index analysis. Throws InputError unless x is M-stationary.
StationaryRecord check_nondegeneracy(std::span<const double> x, const Problem& prob);

/// Like check_nondegeneracy, but infeasible or non-stationary points produce a
/// NotStationary record instead of an error.
StationaryRecord classify_point(std::span<const double> x, const Problem& prob);

/// Compares f(x) against feasible samples z with ||z - x||_inf <= radius, drawn
/// on every support J with |J| <= s that contains or is contained in I1(x).
bool is_local_min_sampled(std::span<const double> x, const Problem& prob, double radius,
                          int samples, std::uint64_t seed = 0x5eed);

/// Basic feasibility. Throws InputError for infeasible x.
bool is_bf_vector(std::span<const double> x, const Problem& prob);

/// Coordinate-wise minimality, decided with exact univariate restrictions.
/// Throws InputError for infeasible x.
bool is_cw_minimum(std::span<const double> x, const Problem& prob);

}  // namespace scno
