#include "scno/topology.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "scno/errors.hpp"
#include "scno/subsets.hpp"

namespace scno {

namespace {

bool face_less(Face a, Face b) {
  const int da = face_dimension(a);
  const int db = face_dimension(b);
  return da != db ? da < db : a < b;
}

Face mask_of(const VertexList& vs, std::size_t n_vertices) {
  Face f = 0;
  for (std::size_t v : vs) {
    if (v >= n_vertices) throw InputError("vertex index out of range");
    f |= Face{1} << v;
  }
  return f;
}

VertexList vertices_of(Face f) {
  VertexList vs;
  for (std::size_t v = 0; v < 64; ++v)
    if ((f >> v) & 1U) vs.push_back(v);
  return vs;
}

}  // namespace

SimplicialComplex::SimplicialComplex(std::size_t n_vertices, std::vector<Face> closed_faces)
    : n_vertices_(n_vertices), faces_(std::move(closed_faces)) {
  std::sort(faces_.begin(), faces_.end(), face_less);
  faces_.erase(std::unique(faces_.begin(), faces_.end()), faces_.end());
}

SimplicialComplex::SimplicialComplex(std::size_t n_vertices, const std::vector<VertexList>& facets)
    : n_vertices_(n_vertices) {
  if (n_vertices == 0 || n_vertices > 64) throw InputError("complex must have 1..64 vertices");
  std::set<Face> all;
  for (const auto& facet : facets) {
    const Face f = mask_of(facet, n_vertices);
    if (f == 0) throw InputError("facets must be nonempty");
    if (facet.size() > 20) throw InputError("facet too large for explicit closure");
    // Every nonempty submask of f.
    for (Face sub = f; sub != 0; sub = (sub - 1) & f) all.insert(sub);
  }
  faces_.assign(all.begin(), all.end());
  std::sort(faces_.begin(), faces_.end(), face_less);
}

std::vector<Face> SimplicialComplex::faces_of_dimension(int d) const {
  std::vector<Face> out;
  for (Face f : faces_)
    if (face_dimension(f) == d) out.push_back(f);
  return out;
}

int SimplicialComplex::dimension() const noexcept {
  return faces_.empty() ? -1 : face_dimension(faces_.back());
}

bool SimplicialComplex::contains(Face f) const {
  return std::binary_search(faces_.begin(), faces_.end(), f, face_less);
}

std::vector<VertexList> SimplicialComplex::facets() const {
  std::vector<VertexList> out;
  for (Face f : faces_) {
    const bool maximal = std::none_of(faces_.begin(), faces_.end(),
                                      [&](Face g) { return g != f && (g & f) == f; });
    if (maximal) out.push_back(vertices_of(f));
  }
  return out;
}

SimplicialComplex SimplicialComplex::unite(const SimplicialComplex& other) const {
  std::vector<Face> merged = faces_;
  merged.insert(merged.end(), other.faces_.begin(), other.faces_.end());
  return SimplicialComplex(std::max(n_vertices_, other.n_vertices_), std::move(merged));
}

SimplicialComplex SimplicialComplex::without(const std::vector<Face>& removed) const {
  for (Face r : removed) {
    const bool has_coface = std::any_of(faces_.begin(), faces_.end(),
                                        [&](Face g) { return g != r && (g & r) == r; });
    if (has_coface) throw InputError("only maximal faces can be removed");
  }
  std::vector<Face> kept;
  for (Face f : faces_)
    if (std::find(removed.begin(), removed.end(), f) == removed.end()) kept.push_back(f);
  return SimplicialComplex(n_vertices_, std::move(kept));
}

bool BettiProfile::acyclic() const {
  return std::all_of(reduced.begin(), reduced.end(), [](long b) { return b == 0; });
}

SimplicialComplex simplex_skeleton(std::size_t p, int dim) {
  if (p == 0) throw InputError("simplex needs at least one vertex");
  if (dim < -1) throw InputError("skeleton dimension must be >= -1");
  if (dim > static_cast<int>(p) - 1) throw InputError("skeleton dimension exceeds simplex dimension");
  std::vector<VertexList> facets;
  if (dim >= 0) facets = subsets_of_size(p, static_cast<std::size_t>(dim) + 1);
  return SimplicialComplex(p, facets);
}

namespace {

// Boundary matrix d_d : C_d -> C_{d-1}, rows indexed by (d-1)-faces. The
// (-1)-chains are spanned by the empty face.
struct Boundary {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::pair<std::size_t, int>>> columns;  // (row, sign)
};

Boundary boundary_matrix(const std::vector<Face>& lower, const std::vector<Face>& upper) {
  Boundary b;
  b.rows = lower.size();
  b.cols = upper.size();
  for (Face f : upper) {
    std::vector<std::pair<std::size_t, int>> col;
    int sign = 1;
    for (std::size_t v = 0; v < 64; ++v) {
      if (!((f >> v) & 1U)) continue;
      const Face facet = f & ~(Face{1} << v);
      const auto it = std::lower_bound(lower.begin(), lower.end(), facet, face_less);
      if (it == lower.end() || *it != facet) throw NumericError("complex is not closed under faces");
      col.emplace_back(static_cast<std::size_t>(it - lower.begin()), sign);
      sign = -sign;
    }
    b.columns.push_back(std::move(col));
  }
  return b;
}

long rank_rational(const Boundary& b) {
  if (b.rows == 0 || b.cols == 0) return 0;
  std::vector<std::vector<mpq_class>> m(b.rows, std::vector<mpq_class>(b.cols));
  for (std::size_t c = 0; c < b.cols; ++c)
    for (auto [r, s] : b.columns[c]) m[r][c] = s;
  long rank = 0;
  std::size_t row = 0;
  for (std::size_t c = 0; c < b.cols && row < b.rows; ++c) {
    std::size_t piv = row;
    while (piv < b.rows && m[piv][c] == 0) ++piv;
    if (piv == b.rows) continue;
    std::swap(m[piv], m[row]);
    const mpq_class inv = 1 / m[row][c];
    for (std::size_t k = c; k < b.cols; ++k) m[row][k] *= inv;
    for (std::size_t r = row + 1; r < b.rows; ++r) {
      if (m[r][c] == 0) continue;
      const mpq_class factor = m[r][c];
      for (std::size_t k = c; k < b.cols; ++k)
        if (m[row][k] != 0) m[r][k] -= factor * m[row][k];
    }
    ++row;
    ++rank;
  }
  return rank;
}

long rank_mod2(const Boundary& b) {
  if (b.rows == 0 || b.cols == 0) return 0;
  const std::size_t words = (b.cols + 63) / 64;
  std::vector<std::vector<std::uint64_t>> m(b.rows, std::vector<std::uint64_t>(words, 0));
  for (std::size_t c = 0; c < b.cols; ++c)
    for (auto [r, s] : b.columns[c]) m[r][c / 64] ^= std::uint64_t{1} << (c % 64);
  long rank = 0;
  std::size_t row = 0;
  for (std::size_t c = 0; c < b.cols && row < b.rows; ++c) {
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    std::size_t piv = row;
    while (piv < b.rows && !(m[piv][c / 64] & bit)) ++piv;
    if (piv == b.rows) continue;
    std::swap(m[piv], m[row]);
    for (std::size_t r = 0; r < b.rows; ++r) {
      if (r != row && (m[r][c / 64] & bit))
        for (std::size_t w = 0; w < words; ++w) m[r][w] ^= m[row][w];
    }
    ++row;
    ++rank;
  }
  return rank;
}

}  // namespace

BettiProfile betti(const SimplicialComplex& complex, Field field) {
  const int top = complex.dimension();
  // chains[d + 1] lists the d-faces; the empty face stands alone in dimension -1.
  std::vector<std::vector<Face>> chains(static_cast<std::size_t>(top + 2));
  chains[0] = {Face{0}};
  for (Face f : complex.faces()) chains[static_cast<std::size_t>(face_dimension(f) + 1)].push_back(f);

  // ranks[d + 1] = rank of the boundary map out of dimension d.
  std::vector<long> ranks(chains.size() + 1, 0);
  for (std::size_t idx = 1; idx < chains.size(); ++idx) {
    const Boundary b = boundary_matrix(chains[idx - 1], chains[idx]);
    ranks[idx] = field == Field::Rational ? rank_rational(b) : rank_mod2(b);
  }
  BettiProfile profile;
  for (std::size_t idx = 0; idx < chains.size(); ++idx) {
    profile.reduced.push_back(static_cast<long>(chains[idx].size()) - ranks[idx] - ranks[idx + 1]);
  }
  for (std::size_t idx = 1; idx < chains.size(); ++idx) {
    const long count = static_cast<long>(chains[idx].size());
    profile.euler_characteristic += (idx % 2 == 1) ? count : -count;
  }
  return profile;
}

std::vector<VertexList> attached_cell_family(std::size_t p, std::size_t q) {
  if (p == 0 || q >= p) throw InputError("attached cells need 0 <= q < p");
  std::vector<VertexList> family;
  for (auto rest : subsets_of_size(p - 1, q)) {
    VertexList cell{0};
    for (std::size_t v : rest) cell.push_back(v + 1);
    family.push_back(std::move(cell));
  }
  return family;
}

bool greedy_collapse(const SimplicialComplex& complex) {
  std::vector<Face> faces = complex.faces();
  bool progress = true;
  while (progress && faces.size() > 1) {
    progress = false;
    // Highest-dimensional free faces first.
    for (auto it = faces.rbegin(); it != faces.rend(); ++it) {
      const Face sigma = *it;
      Face coface = 0;
      int cofaces = 0;
      for (Face g : faces) {
        if (g != sigma && (g & sigma) == sigma) {
          ++cofaces;
          coface = g;
          if (cofaces > 1) break;
        }
      }
      if (cofaces == 1 && face_dimension(coface) == face_dimension(sigma) + 1) {
        std::erase(faces, sigma);
        std::erase(faces, coface);
        progress = true;
        break;
      }
    }
  }
  return faces.size() == 1;
}

NormalMorseReport verify_normal_morse_data(std::size_t p, std::size_t q) {
  if (p == 0 || q >= p) throw InputError("normal Morse data needs 0 <= q < p");
  NormalMorseReport rep;
  rep.p = p;
  rep.q = q;
  const int qi = static_cast<int>(q);
  const SimplicialComplex skeleton = simplex_skeleton(p, qi - 1);
  const auto family = attached_cell_family(p, q);
  const SimplicialComplex cells(p, family);
  const SimplicialComplex united = skeleton.unite(cells);

  rep.cell_count = family.size();
  rep.expected_count = binomial(p - 1, q);
  const BettiProfile skel = betti(skeleton);
  rep.skeleton_rank = skel.at(qi - 1);
  rep.count_ok = rep.cell_count == rep.expected_count &&
                 rep.skeleton_rank == static_cast<long>(rep.expected_count);

  const BettiProfile whole = betti(united);
  rep.contractible_ok = whole.acyclic();

  rep.minimal_ok = true;
  for (const auto& cell : family) {
    const BettiProfile reduced = betti(united.without({mask_of(cell, p)}));
    if (reduced.at(qi) == 0 && reduced.at(qi - 1) == 0) rep.minimal_ok = false;
  }
  rep.collapsible = greedy_collapse(united);
  rep.mod2_agrees = betti(skeleton, Field::Mod2).reduced == skel.reduced &&
                    betti(united, Field::Mod2).reduced == whole.reduced;
  return rep;
}

std::string to_facet_text(const SimplicialComplex& complex) {
  std::ostringstream os;
  for (const auto& facet : complex.facets()) {
    for (std::size_t i = 0; i < facet.size(); ++i) os << (i ? " " : "") << facet[i] + 1;
    os << '\n';
  }
  return os.str();
}

SimplicialComplex parse_facet_text(std::string_view text, std::size_t n_vertices) {
  std::vector<VertexList> facets;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    VertexList facet;
    long v = 0;
    while (ls >> v) {
      if (v < 1 || static_cast<std::size_t>(v) > n_vertices)
        throw ParseError("vertex index out of range", line_no, 1);
      facet.push_back(static_cast<std::size_t>(v - 1));
    }
    if (!ls.eof()) throw ParseError("expected vertex indices", line_no, 1);
    facets.push_back(std::move(facet));
  }
  return SimplicialComplex(n_vertices, facets);
}

}  // namespace scno
