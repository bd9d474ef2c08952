#include "scno/globalmorse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "scno/errors.hpp"
#include "scno/subsets.hpp"
#include "scno/union_find.hpp"

namespace scno {

LevelGrid::LevelGrid(const Problem& prob, int resolution, const std::vector<Point>& anchors)
    : resolution_(resolution), n_(prob.n()) {
  if (resolution < 2) throw InputError("grid resolution must be at least 2");
  std::vector<std::size_t> zero(n_);
  std::vector<std::uint64_t> radix_weight(n_);
  std::uint64_t weight = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    const auto [lo, hi] = prob.box()[i];
    std::vector<double> axis{0.0};
    if (hi > lo) {
      for (int k = 0; k < resolution; ++k) {
        double v = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(resolution - 1);
        if (std::abs(v) <= 1e-12 * (hi - lo)) v = 0.0;
        axis.push_back(v);
      }
      for (const Point& a : anchors) {
        if (a.size() != n_) throw InputError("anchor point has the wrong length");
        if (a[i] != 0.0 && a[i] > lo && a[i] < hi) axis.push_back(a[i]);
      }
    }
    const double merge = 1e-12 * std::max(1.0, hi - lo);
    std::erase_if(axis, [&](double v) { return v != 0.0 && std::abs(v) <= merge; });
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end(), [&](double a, double b) { return b - a <= merge; }),
               axis.end());
    if (axis.size() > std::numeric_limits<std::uint16_t>::max()) throw InputError("grid resolution too large");
    zero[i] = static_cast<std::size_t>(std::find(axis.begin(), axis.end(), 0.0) - axis.begin());
    radix_weight[i] = weight;
    if (weight > std::numeric_limits<std::uint64_t>::max() / axis.size())
      throw InputError("grid too large to index");
    weight *= axis.size();
    axes_.push_back(std::move(axis));
  }

  std::unordered_map<std::uint64_t, std::uint32_t> id_of;
  auto key_of = [&](const std::uint16_t* idx) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < n_; ++i) key += idx[i] * radix_weight[i];
    return key;
  };

  std::vector<std::uint16_t> cur(n_);
  for (std::size_t size = 0; size <= prob.s(); ++size) {
    for (const IndexSet& support : subsets_of_size(n_, size)) {
      for (std::size_t i = 0; i < n_; ++i) cur[i] = static_cast<std::uint16_t>(zero[i]);
      // Odometer over the nonzero grid indices of each support coordinate.
      std::vector<std::size_t> digit(support.size(), 0);
      bool empty_axis = false;
      for (std::size_t j : support) empty_axis = empty_axis || axes_[j].size() < 2;
      if (empty_axis) continue;
      for (;;) {
        for (std::size_t a = 0; a < support.size(); ++a) {
          const std::size_t j = support[a];
          std::size_t idx = digit[a];
          if (idx >= zero[j]) ++idx;
          cur[j] = static_cast<std::uint16_t>(idx);
        }
        if (values_.size() >= std::numeric_limits<std::uint32_t>::max() / 2)
          throw InputError("grid has too many nodes");
        const auto id = static_cast<std::uint32_t>(values_.size());
        id_of.emplace(key_of(cur.data()), id);
        index_.insert(index_.end(), cur.begin(), cur.end());
        values_.push_back(0.0);
        std::size_t a = 0;
        while (a < digit.size() && ++digit[a] == axes_[support[a]].size() - 1) digit[a++] = 0;
        if (a == digit.size()) break;
      }
    }
  }

  boundary_.assign(values_.size(), 0);
  Point x(n_);
  for (std::size_t node = 0; node < values_.size(); ++node) {
    const std::uint16_t* idx = &index_[node * n_];
    std::size_t support_size = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      x[i] = axes_[i][idx[i]];
      if (x[i] != 0.0) {
        ++support_size;
        if (idx[i] == 0 || std::size_t{idx[i]} + 1 == axes_[i].size()) boundary_[node] = 1;
      }
    }
    values_[node] = prob.objective().eval(x);
    std::vector<std::uint16_t> nb(idx, idx + n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (std::size_t{idx[i]} + 1 >= axes_[i].size()) continue;
      const bool grows = idx[i] == zero[i];
      if (grows && support_size + 1 > prob.s()) continue;
      nb[i] = static_cast<std::uint16_t>(idx[i] + 1);
      const auto it = id_of.find(key_of(nb.data()));
      nb[i] = idx[i];
      if (it == id_of.end()) throw NumericError("grid neighbour missing");
      edges_.emplace_back(static_cast<std::uint32_t>(node), it->second);
    }
  }
}

Point LevelGrid::coordinates(std::size_t node) const {
  Point x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = axes_[i][index_[node * n_ + i]];
  return x;
}

LevelComponents components_at_level(const LevelGrid& grid, double a) {
  const auto& v = grid.values();
  UnionFind uf(v.size());
  LevelComponents out;
  for (std::size_t node = 0; node < v.size(); ++node) {
    if (v[node] > a) continue;
    ++out.count;
    if (grid.on_boundary(node)) out.touches_boundary = true;
  }
  for (auto [p, q] : grid.edges())
    if (v[p] <= a && v[q] <= a && uf.unite(p, q)) --out.count;
  return out;
}

std::vector<LevelComponents> components_at_levels(const LevelGrid& grid, std::vector<double> levels) {
  const auto& v = grid.values();
  std::vector<std::size_t> level_order(levels.size());
  std::iota(level_order.begin(), level_order.end(), std::size_t{0});
  std::sort(level_order.begin(), level_order.end(),
            [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });

  std::vector<std::uint32_t> nodes(v.size());
  std::iota(nodes.begin(), nodes.end(), 0U);
  std::sort(nodes.begin(), nodes.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges = grid.edges();
  auto edge_level = [&](const auto& e) { return std::max(v[e.first], v[e.second]); };
  std::sort(edges.begin(), edges.end(), [&](const auto& a, const auto& b) { return edge_level(a) < edge_level(b); });

  UnionFind uf(v.size());
  std::vector<LevelComponents> out(levels.size());
  LevelComponents running;
  std::size_t next_node = 0;
  std::size_t next_edge = 0;
  for (std::size_t li : level_order) {
    const double a = levels[li];
    for (; next_node < nodes.size() && v[nodes[next_node]] <= a; ++next_node) {
      ++running.count;
      if (grid.on_boundary(nodes[next_node])) running.touches_boundary = true;
    }
    for (; next_edge < edges.size() && edge_level(edges[next_edge]) <= a; ++next_edge)
      if (uf.unite(edges[next_edge].first, edges[next_edge].second)) --running.count;
    out[li] = running;
  }
  return out;
}

namespace {

bool same_value(double a, double b) {
  return std::abs(a - b) <= kCriticalValueMergeTol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<double> distinct_critical_values(const EnumerationResult& records) {
  std::vector<double> values;
  for (const auto& p : records.points) values.push_back(p.record.value);
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  for (double v : values)
    if (distinct.empty() || !same_value(distinct.back(), v)) distinct.push_back(v);
  return distinct;
}

std::vector<double> probe_levels(const std::vector<double>& critical) {
  if (critical.empty()) return {0.0};
  std::vector<double> levels{critical.front() - 1.0};
  for (std::size_t i = 0; i + 1 < critical.size(); ++i) levels.push_back(0.5 * (critical[i] + critical[i + 1]));
  levels.push_back(critical.back() + 1.0);
  return levels;
}

std::pair<int, int> local_bound(PointClass cls, int n_minus_s) {
  switch (cls) {
    case PointClass::LocalMin: return {1, 1};
    case PointClass::SaddleTypeI: return {-1, 0};
    case PointClass::SaddleTypeII: return {-n_minus_s, 0};
    case PointClass::HigherSaddle: return {0, 0};
    default: return {std::numeric_limits<int>::min(), std::numeric_limits<int>::max()};
  }
}

}  // namespace

ComponentCurve component_curve(const LevelGrid& grid, const EnumerationResult& records) {
  ComponentCurve curve;
  curve.critical_values = distinct_critical_values(records);
  curve.levels = probe_levels(curve.critical_values);
  for (const auto& c : components_at_levels(grid, curve.levels)) {
    curve.q.push_back(c.count);
    curve.touches_boundary.push_back(c.touches_boundary);
  }
  return curve;
}

MergeCheck merge_bounds_check(const Problem& prob, const LevelGrid& grid, const EnumerationResult& records) {
  const ComponentCurve curve = component_curve(grid, records);
  const int n_minus_s = static_cast<int>(prob.n() - prob.s());
  MergeCheck check;

  // Group records by critical value; index j has probes j (below) and j + 1 (above).
  std::vector<std::vector<const EnumeratedPoint*>> groups(curve.critical_values.size());
  for (const auto& p : records.points) {
    const auto it = std::find_if(curve.critical_values.begin(), curve.critical_values.end(),
                                 [&](double c) { return same_value(c, p.record.value); });
    groups[static_cast<std::size_t>(it - curve.critical_values.begin())].push_back(&p);
  }
  bool coincident_any = false;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    const int dq = curve.q[j + 1] - curve.q[j];
    int lo = 0;
    int hi = 0;
    bool bounded = true;
    for (const auto* p : groups[j]) {
      if (!p->record.nondegenerate()) {
        bounded = false;
        continue;
      }
      const auto [a, b] = local_bound(p->record.cls, n_minus_s);
      lo += a;
      hi += b;
    }
    const bool coincident = groups[j].size() > 1;
    coincident_any = coincident_any || coincident;
    for (const auto* p : groups[j]) {
      MergeEntry e;
      e.point = p->record.point;
      e.cls = p->record.cls;
      e.value = p->record.value;
      e.dq_observed = dq;
      e.bound_lo = bounded ? lo : 0;
      e.bound_hi = bounded ? hi : 0;
      e.coincident = coincident;
      e.ok = bounded && dq >= lo && dq <= hi;
      if (!bounded) {
        check.warnings.push_back("degenerate point at critical value " + std::to_string(curve.critical_values[j]) +
                                 ": no local bound applies");
      }
      check.all_ok = check.all_ok && e.ok;
      check.entries.push_back(std::move(e));
    }
  }
  if (coincident_any) {
    check.warnings.push_back(
        "several M-stationary points share a critical value; their bounds were summed. "
        "Use perturb_problem to separate the values for per-point checks");
  }
  return check;
}

MorseReport morse_relation(const Problem& prob, EnumerationResult enumeration, const LevelGrid& grid) {
  MorseReport rep;
  rep.counts = enumeration.counts;
  rep.n_minus_s = prob.n() - prob.s();
  rep.relation_lhs = rep.counts.r_I + static_cast<long>(rep.n_minus_s) * rep.counts.r_II;
  rep.relation_rhs = rep.counts.r - 1L;
  rep.relation_holds = rep.relation_lhs >= rep.relation_rhs;
  rep.degenerate_present = rep.counts.n_degenerate > 0;
  rep.curve = component_curve(grid, enumeration);
  rep.merges = merge_bounds_check(prob, grid, enumeration);
  rep.properness_warning =
      std::any_of(rep.curve.touches_boundary.begin(), rep.curve.touches_boundary.end(), [](bool b) { return b; });
  const bool top_connected = !rep.curve.q.empty() && rep.curve.q.back() == 1;
  rep.hypothesis_met = !rep.degenerate_present && !rep.properness_warning && top_connected;
  rep.verdict = rep.hypothesis_met ? (rep.relation_holds ? "holds" : "violated") : "not_claimed";

  if (rep.degenerate_present)
    rep.warnings.push_back("degenerate M-stationary points present; relation not claimed (try perturb)");
  if (rep.properness_warning)
    rep.warnings.push_back("a lower level set reaches the box boundary; properness is not established");
  if (!top_connected)
    rep.warnings.push_back("the top probe level set is not connected; connectedness hypothesis fails");
  rep.warnings.insert(rep.warnings.end(), rep.merges.warnings.begin(), rep.merges.warnings.end());
  rep.enumeration = std::move(enumeration);
  return rep;
}

std::vector<Point> anchor_points(const EnumerationResult& records) {
  std::vector<Point> out;
  for (const auto& p : records.points) out.push_back(p.record.point);
  return out;
}

MorseReport morse_relation(const Problem& prob, const MorseOptions& options) {
  EnumerationResult e = enumerate_m_stationary(prob, options.enumeration);
  const LevelGrid grid(prob, options.resolution, anchor_points(e));
  return morse_relation(prob, std::move(e), grid);
}

}  // namespace scno
