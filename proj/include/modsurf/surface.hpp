#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace modsurf {

class SurfaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One signed letter of a polygon word.
struct Lit {
  std::string id;
  int exp = 1;  // +1 or -1

  Lit() = default;
  Lit(std::string i, int e) : id(std::move(i)), exp(e) {}
  Lit inverse() const { return Lit(id, -exp); }
  bool operator==(const Lit& o) const { return id == o.id && exp == o.exp; }
};

using Word = std::vector<Lit>;

Word word_inverse(const Word& w);
Word word_concat(const Word& a, const Word& b);
// cancel adjacent x x^-1 pairs
Word word_reduce(const Word& w);
std::string word_str(const Word& w);
Word parse_word(const std::string& text);

// Polygons as signed-letter words. A letter id occurring twice (with
// opposite exponents) is a paired edge; an id occurring once is free.
// "pair: (c d)" directives in the text format alias the second id to the
// first before validation.
struct GluingPattern {
  std::vector<Word> polygons;
  std::string group_hint;  // optional "group:" directive

  struct Occurrence {
    int polygon;
    int side;
    int exp;
  };
  // validated occurrence table: letter id -> 1 or 2 occurrences
  std::map<std::string, std::vector<Occurrence>> occurrences() const;
  bool is_free(const std::string& letter) const;
  void validate() const;
};

GluingPattern parse_pattern(const std::string& text);
std::string print_pattern(const GluingPattern& p);

struct BoundaryEdge {
  std::string letter;
  int source_vertex = -1;
  int target_vertex = -1;
  int component = -1;  // boundary circle index
};

struct SurfaceInfo {
  int euler_characteristic = 0;
  int num_vertices = 0;
  int num_polygons = 0;
  int num_edge_classes = 0;
  int num_boundary_components = 0;
  int num_surface_components = 0;
  std::vector<BoundaryEdge> boundary_edges;  // traversal order per component
  std::vector<bool> vertex_on_boundary;
  // every letter's oriented endpoints (source, target vertex class)
  std::map<std::string, std::pair<int, int>> letter_endpoints;
  bool a1 = false;  // every surface component has boundary
  bool a2 = false;  // every boundary component carries a vertex
  bool a3 = false;  // no interior vertices

  int num_interior_vertices() const {
    int n = 0;
    for (bool b : vertex_on_boundary)
      if (!b) ++n;
    return n;
  }
  // free generator count of the fundamental groupoid
  int graph_edge_count() const { return num_vertices - euler_characteristic; }
};

SurfaceInfo analyze(const GluingPattern& p);

// Letter renaming produced by the cut/glue moves: each entry expresses a
// letter of the NEW pattern as a word over letters of the OLD one.
using GeneratorCorrespondence = std::map<std::string, Word>;

// Cut one polygon along the diagonal between corners i and j (non-adjacent).
// The fresh paired letter `new_letter` satisfies
//   new_letter = (w_i ... w_{j-1})^{-1}
// in the old pattern; the correspondence records that word.
std::pair<GluingPattern, GeneratorCorrespondence> cut_diagonal(
    const GluingPattern& p, int polygon, int corner_i, int corner_j,
    const std::string& new_letter);

// Merge the two polygons sharing the paired letter (inverse of cut_diagonal).
GluingPattern glue_edges(const GluingPattern& p, const std::string& letter);

// Insert a fresh interior vertex by splitting corner `corner` of a polygon
// with the null 2-gon "g g^-1".
std::pair<GluingPattern, GeneratorCorrespondence> add_interior_vertex_cut(
    const GluingPattern& p, int polygon, int corner,
    const std::string& new_letter);

}  // namespace modsurf
