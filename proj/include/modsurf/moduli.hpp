#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modsurf/lie_group.hpp"
#include "modsurf/surface.hpp"

namespace modsurf {

class ModuliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Free-generator coordinates on the space of groupoid homomorphisms of a
// glued surface: one group factor per generator, one eliminated letter per
// polygon, boundary edges as words over the generators.
struct ModuliChart {
  GluingPattern pattern;
  SurfaceInfo info;
  const LieGroupModel* group = nullptr;

  std::vector<std::string> generators;  // ordered set S
  std::map<std::string, int> gen_index;

  struct Dependent {
    std::string letter;
    int polygon = -1;
    Word solving;   // over generators and earlier dependents
    Word expanded;  // over generators only, freely reduced
  };
  std::vector<Dependent> dependents;  // in elimination order

  // every letter as a word over the generators (generators map to themselves)
  std::map<std::string, Word> letter_words;

  struct Boundary {
    std::string letter;
    Word word;  // over generators
    int source_vertex = -1;
    int target_vertex = -1;
    int component = -1;
  };
  std::vector<Boundary> boundary;  // order of info.boundary_edges

  // oriented endpoints of each generator
  std::vector<int> gen_source;
  std::vector<int> gen_target;

  int num_vertices() const { return info.num_vertices; }
  int num_generators() const { return static_cast<int>(generators.size()); }
  int tangent_dim() const { return num_generators() * group->dim(); }
  int vertex_dim() const { return num_vertices() * group->dim(); }
  int boundary_dim() const {
    return static_cast<int>(boundary.size()) * group->dim();
  }
};

ModuliChart build_chart(const GluingPattern& pattern,
                        const LieGroupModel& group,
                        const std::map<int, std::string>& elimination_hint = {});

// assignment S -> G
struct ModuliPoint {
  std::vector<GroupElement> g;
};

// Left-trivialized tangents live in flat coordinates: dim = |S| * dim(g),
// generator blocks in chart order.
using Tangent = Eigen::VectorXd;

ModuliPoint identity_point(const ModuliChart& chart);
ModuliPoint random_point(const ModuliChart& chart, Rng& rng);
Tangent random_tangent(const ModuliChart& chart, Rng& rng);

// point with each generator moved to g_s exp(t v_s), then retracted
ModuliPoint move_point(const ModuliChart& chart, const ModuliPoint& point,
                       const Tangent& v, double t);

GroupElement holonomy(const ModuliChart& chart, const ModuliPoint& point,
                      const Word& word);

// value and left-trivialized differential of a word map, as a linear
// operator from chart tangents to the algebra
struct WordJet {
  GroupElement value;
  Eigen::MatrixXd diff;  // dim(g) x tangent_dim
};

WordJet word_jet(const ModuliChart& chart, const ModuliPoint& point,
                 const Word& word);

std::vector<GroupElement> boundary_holonomy(const ModuliChart& chart,
                                            const ModuliPoint& point);

// stacked d Phi: one dim(g) row block per boundary edge
Eigen::MatrixXd boundary_differential(const ModuliChart& chart,
                                      const ModuliPoint& point);

// h: one group element per vertex class
ModuliPoint action_apply(const ModuliChart& chart,
                         const std::vector<GroupElement>& h,
                         const ModuliPoint& point);

// generating vector field of xi (flat |V|*dim coordinates, vertex blocks)
Tangent generating_vector(const ModuliChart& chart, const Eigen::VectorXd& xi,
                          const ModuliPoint& point);

// the linear map xi -> generating_vector(xi) as a matrix
Eigen::MatrixXd generating_matrix(const ModuliChart& chart,
                                  const ModuliPoint& point);

// nullspace basis of the generating map (columns, |V|*dim coordinates)
Eigen::MatrixXd stabilizer_basis(const ModuliChart& chart,
                                 const ModuliPoint& point,
                                 double rel_tol = 1e-9);

// chart with every boundary word rewritten through the substitution;
// invertibility is validated by round-tripping random points
ModuliChart mcg_substitute(const ModuliChart& chart,
                           const std::map<std::string, Word>& subst,
                           const std::map<std::string, Word>& inverse_subst,
                           Rng& rng);

// the point map induced by a substitution: result(s) = hol(subst(s))
ModuliPoint substitute_point(const ModuliChart& chart,
                             const std::map<std::string, Word>& subst,
                             const ModuliPoint& point);

// expand a word over pattern letters into a word over generators
Word expand_word(const ModuliChart& chart, const Word& word);

// Evaluate chart `to`'s generators at a point of chart `from`. A generator g
// of `to` is read as the word corr.at(g) when present (letters of `from`),
// and as the letter g of `from` otherwise.
ModuliPoint transport_point(const ModuliChart& from, const ModuliPoint& point,
                            const ModuliChart& to,
                            const GeneratorCorrespondence& corr = {});

// Elimination hints for the two pieces of a diagonal cut: the piece holding
// the original dependent letter keeps it, the other piece eliminates the
// fresh diagonal letter. Default last-letter elimination can cycle on cut
// patterns; this choice never does.
std::map<int, std::string> diagonal_cut_hints(
    const GluingPattern& cut_pattern, const std::string& new_letter,
    const std::string& original_dependent);

}  // namespace modsurf
