#pragma once

// Enumeration of all M-stationary points inside the problem box.

#include <cstdint>
#include <string>
#include <vector>

#include "scno/stationarity.hpp"

namespace scno {

struct EnumerationOptions {
  int starts_per_axis = 5;          ///< Newton start grid density per support dimension
  int max_newton_iterations = 100;
};

/// One converged root of the restricted stationarity system.
struct SupportSolution {
  Point point;
  IndexSet scheduled_support;
  Point start;
  int iterations = 0;
  double residual = 0.0;
};

struct ClassCounts {
  int r = 0;     ///< local minimizers
  int r_I = 0;   ///< saddles with k = s, QI = 1
  int r_II = 0;  ///< saddles with k = s - 1, QI = 0
  int n_degenerate = 0;
  int n_higher = 0;
};

struct EnumeratedPoint {
  StationaryRecord record;
  SupportSolution provenance;
};

struct EnumerationResult {
  std::vector<EnumeratedPoint> points;  ///< sorted lexicographically by point
  ClassCounts counts;
  EnumerationOptions options;
  std::string completeness_note;
};

/// All subsets of {0..n-1} of size exactly s (only the empty set when s = 0).
std::vector<IndexSet> enumerate_supports(std::size_t n, std::size_t s);

/// Solutions of df/dx_i = 0 (i in support) with x zero off the support, inside the box.
/// One-dimensional supports are solved by exact real-root isolation; larger
/// supports by damped Newton from a uniform start grid.
std::vector<SupportSolution> solve_on_support(const Problem& prob, const IndexSet& support,
                                              const EnumerationOptions& options = {});

/// Runs solve_on_support on every support of size 0..s, reassigns points to
/// their actual support, merges duplicates and classifies the survivors.
EnumerationResult enumerate_m_stationary(const Problem& prob, const EnumerationOptions& options = {});

ClassCounts tally(const std::vector<EnumeratedPoint>& points);

/// Adds sum c_i x_i + sum_{i<=j} d_ij x_i x_j with |c_i|, |d_ij| <= epsilon,
/// drawn deterministically from `seed`. epsilon = 0 returns the problem unchanged.
Problem perturb_problem(const Problem& prob, const Rational& epsilon, std::uint64_t seed);

}  // namespace scno
