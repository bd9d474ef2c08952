#pragma once

// Finite simplicial complexes on at most 64 vertices, reduced homology ranks,
// and the normal-Morse-data check for sparsity-constrained level sets:
// attaching C(p-1, q) q-cells through vertex 1 to the (q-1)-skeleton of the
// (p-1)-simplex yields an acyclic complex, and no attached cell is redundant.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scno {

using Face = std::uint64_t;  ///< vertex bitmask, bit v set for vertex v (0-based)
using VertexList = std::vector<std::size_t>;

inline int face_dimension(Face f) noexcept { return static_cast<int>(__builtin_popcountll(f)) - 1; }

class SimplicialComplex {
 public:
  /// Closure of the given facets. Vertex lists are 0-based; an empty facet
  /// list is the void complex (only the empty face).
  SimplicialComplex(std::size_t n_vertices, const std::vector<VertexList>& facets);

  std::size_t n_vertices() const noexcept { return n_vertices_; }
  /// Nonempty faces, sorted by dimension then bitmask.
  const std::vector<Face>& faces() const noexcept { return faces_; }
  std::vector<Face> faces_of_dimension(int d) const;
  std::vector<VertexList> facets() const;
  int dimension() const noexcept;  ///< -1 for the void complex
  bool contains(Face f) const;

  SimplicialComplex unite(const SimplicialComplex& other) const;
  SimplicialComplex without(const std::vector<Face>& removed) const;

 private:
  SimplicialComplex(std::size_t n_vertices, std::vector<Face> closed_faces);
  std::size_t n_vertices_;
  std::vector<Face> faces_;
};

enum class Field { Rational, Mod2 };

struct BettiProfile {
  /// Reduced Betti numbers; entry d + 1 holds dimension d, so index 0 is
  /// dimension -1 (nonzero only for the void complex).
  std::vector<long> reduced;
  long euler_characteristic = 0;  ///< alternating count of nonempty faces

  long at(int d) const { return d + 1 < static_cast<int>(reduced.size()) && d >= -1 ? reduced[d + 1] : 0; }
  bool acyclic() const;
};

/// Faces of dimension <= dim of the simplex on p vertices. Throws InputError if dim > p-1.
SimplicialComplex simplex_skeleton(std::size_t p, int dim);

BettiProfile betti(const SimplicialComplex& complex, Field field = Field::Rational);

/// (q+1)-subsets of {0..p-1} containing vertex 0.
std::vector<VertexList> attached_cell_family(std::size_t p, std::size_t q);

/// Repeated elementary collapses of free faces; true when a single vertex remains.
bool greedy_collapse(const SimplicialComplex& complex);

struct NormalMorseReport {
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t cell_count = 0;
  std::uint64_t expected_count = 0;  ///< C(p-1, q)
  long skeleton_rank = 0;            ///< reduced H_{q-1} of the (q-1)-skeleton
  bool count_ok = false;
  bool contractible_ok = false;      ///< skeleton plus cells is acyclic
  bool minimal_ok = false;           ///< dropping any one cell breaks acyclicity
  bool collapsible = false;          ///< greedy collapse reached a point
  bool mod2_agrees = false;          ///< same Betti numbers over GF(2)

  bool all_ok() const noexcept { return count_ok && contractible_ok && minimal_ok; }
};

/// Throws InputError unless 0 <= q < p.
NormalMorseReport verify_normal_morse_data(std::size_t p, std::size_t q);

/// One facet per line, space-separated 1-based vertex indices.
std::string to_facet_text(const SimplicialComplex& complex);
SimplicialComplex parse_facet_text(std::string_view text, std::size_t n_vertices);

}  // namespace scno
