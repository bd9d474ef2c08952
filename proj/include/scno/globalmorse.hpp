#pragma once

// Connected components of discretized lower level sets
//   M^a = { x : ||x||_0 <= s, f(x) <= a }
// and the global counting relation between minimizers and index-one saddles.

#include <cstdint>
#include <string>
#include <vector>

#include "scno/enumeration.hpp"

namespace scno {

/// Grid nodes on the union of coordinate subspaces of dimension <= s inside
/// the box. Every axis includes the coordinate 0, so subspaces share nodes
/// where they intersect. Nodes are adjacent when they differ by one grid step
/// in one coordinate. Nonzero coordinates of the anchor points that lie
/// strictly inside the box are added to the axes, so every anchor is a node.
class LevelGrid {
 public:
  LevelGrid(const Problem& prob, int resolution = 41, const std::vector<Point>& anchors = {});

  int resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const noexcept { return edges_; }
  bool on_boundary(std::size_t node) const { return boundary_[node] != 0; }
  Point coordinates(std::size_t node) const;

 private:
  int resolution_;
  std::size_t n_;
  std::vector<std::vector<double>> axes_;
  std::vector<std::uint16_t> index_;  // n_ entries per node
  std::vector<double> values_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

struct LevelComponents {
  int count = 0;
  bool touches_boundary = false;
};

/// Union-find over the nodes with f <= a.
LevelComponents components_at_level(const LevelGrid& grid, double a);

/// Same counts for many levels from one sorted sweep over nodes and edges.
std::vector<LevelComponents> components_at_levels(const LevelGrid& grid, std::vector<double> levels);

struct ComponentCurve {
  std::vector<double> critical_values;  ///< distinct, ascending
  std::vector<double> levels;           ///< one below, one between each pair, one above
  std::vector<int> q;
  std::vector<bool> touches_boundary;
};

/// Critical values closer than this (relative to max(1, |v|)) are treated as equal.
inline constexpr double kCriticalValueMergeTol = 1e-8;

ComponentCurve component_curve(const LevelGrid& grid, const EnumerationResult& records);

struct MergeEntry {
  Point point;
  PointClass cls = PointClass::NotStationary;
  double value = 0.0;
  int dq_observed = 0;
  int bound_lo = 0;
  int bound_hi = 0;
  bool ok = false;
  /// Shares its critical value with other records; the bound then applies to
  /// the summed change of the whole group.
  bool coincident = false;
};

struct MergeCheck {
  std::vector<MergeEntry> entries;
  bool all_ok = true;
  std::vector<std::string> warnings;
};

/// Observed change of q across each critical value against the local bound:
/// minimizer +1, type I in [-1, 0], type II in [-(n-s), 0], higher index 0.
MergeCheck merge_bounds_check(const Problem& prob, const LevelGrid& grid, const EnumerationResult& records);

struct MorseOptions {
  int resolution = 41;
  EnumerationOptions enumeration;
};

struct MorseReport {
  EnumerationResult enumeration;
  ClassCounts counts;
  std::size_t n_minus_s = 0;
  long relation_lhs = 0;  ///< r_I + (n - s) r_II
  long relation_rhs = 0;  ///< r - 1
  bool relation_holds = false;
  bool degenerate_present = false;
  bool properness_warning = false;
  bool hypothesis_met = false;
  std::string verdict;  ///< "holds", "violated" or "not_claimed"
  ComponentCurve curve;
  MergeCheck merges;
  std::vector<std::string> warnings;
};

/// Coordinates of the enumerated points, for use as grid anchors.
std::vector<Point> anchor_points(const EnumerationResult& records);

/// Enumerates and builds a grid anchored at the enumerated points.
MorseReport morse_relation(const Problem& prob, const MorseOptions& options = {});
MorseReport morse_relation(const Problem& prob, EnumerationResult enumeration, const LevelGrid& grid);

}  // namespace scno
