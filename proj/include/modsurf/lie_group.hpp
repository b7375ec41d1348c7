#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "modsurf/rng.hpp"

namespace modsurf {

using Cmat = Eigen::MatrixXcd;
using Rmat = Eigen::MatrixXd;
using Rvec = Eigen::VectorXd;

// Algebra elements are real coordinate vectors in the model's basis.
using AlgebraVector = Eigen::VectorXd;

enum class GroupConstraint {
  kSpecialUnitary,     // g* g = I, det g = 1
  kSpecialLinearReal,  // real entries, det g = 1
  kUnitDiagonal,       // diagonal, unit-modulus entries (torus)
  kNone,
};

class LieGroupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroupElement;

// A concrete matrix group: algebra basis, structure constants, an invariant
// metric, and the pointwise Maurer-Cartan calculus built on them.
class LieGroupModel {
 public:
  LieGroupModel(std::string name, std::vector<Cmat> basis, Rmat gram,
                GroupConstraint constraint);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int matrix_size() const { return matrix_size_; }
  const Rmat& gram() const { return gram_; }
  GroupConstraint constraint() const { return constraint_; }
  const Cmat& basis(int i) const { return basis_[static_cast<size_t>(i)]; }
  double structure_constant(int i, int j, int k) const {
    return c_[static_cast<size_t>((i * dim() + j) * dim() + k)];
  }
  bool abelian() const { return abelian_; }

  // metric pairing of algebra coordinate vectors
  double pair(const Rvec& x, const Rvec& y) const;

  // [x, y] via structure constants
  Rvec bracket(const Rvec& x, const Rvec& y) const;

  Cmat algebra_matrix(const Rvec& x) const;

  // re-expand a matrix lying in the algebra span; throws if it does not
  Rvec coords_of(const Cmat& m, double tol = 1e-8) const;

  Cmat exp_matrix(const Rvec& x) const;

  // Ad_g as a real dim x dim matrix in basis coordinates
  Rmat adjoint_matrix(const Cmat& g) const;

  Cmat identity_matrix() const;
  Cmat retract(const Cmat& m) const;
  double constraint_defect(const Cmat& m) const;

  GroupElement element(Cmat m, double tol = 1e-10) const;
  GroupElement identity() const;
  GroupElement exponential(const Rvec& x) const;

  // value of the Cartan 3-form on left-trivialized tangents; equals
  // (1/2)<u,[v,w]> at every base point
  double eta(const Rvec& u, const Rvec& v, const Rvec& w) const;

  static const LieGroupModel& su2();
  static const LieGroupModel& sl2r();
  static const LieGroupModel& torus2();
  // registry lookup by name ("SU2", "SL2R", "T2"); nullptr when unknown
  static const LieGroupModel* find(const std::string& name);
  // custom model from a JSON description file
  static std::shared_ptr<const LieGroupModel> load_file(
      const std::string& path);

 private:
  void validate() const;

  std::string name_;
  std::vector<Cmat> basis_;
  Rmat gram_;
  GroupConstraint constraint_;
  int matrix_size_;
  std::vector<double> c_;   // structure constants, flattened
  Rmat expand_pinv_;        // pseudo-inverse of the basis vectorization
  Rmat gram_inv_;
  bool abelian_ = false;
};

struct GroupElement {
  const LieGroupModel* model = nullptr;
  Cmat m;

  GroupElement() = default;
  GroupElement(const LieGroupModel* mod, Cmat mat)
      : model(mod), m(std::move(mat)) {}

  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& other) const;
  bool same_model(const GroupElement& other) const {
    return model == other.model;
  }
};

// Ad_g x in basis coordinates
AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& x);

// beta evaluated at (g1,g2) on left-trivialized tangent pairs u=(u1,u2),
// w=(w1,w2):  (1/2)(<u1, Ad_{g2} w2> - <w1, Ad_{g2} u2>)
double beta_at(const GroupElement& g1, const GroupElement& g2, const Rvec& u1,
               const Rvec& u2, const Rvec& w1, const Rvec& w2);

double eta_at(const GroupElement& g, const Rvec& u, const Rvec& v,
              const Rvec& w);

// Conjugation-invariant scalar on the group. `directional`, when provided,
// must return d/dt|0 eval(g exp(tX)) for an algebra matrix X.
struct InvariantFunction {
  std::string name;
  std::function<double(const GroupElement&)> eval;
  std::function<double(const GroupElement&, const Cmat&)> directional;

  static InvariantFunction re_trace();
  static InvariantFunction constant(double value);
};

// The unique algebra vector with d/dt|0 f(g exp(t xi)) = <phi_dot, xi>.
AlgebraVector phi_dot(const InvariantFunction& f, const GroupElement& g,
                      double fd_step = 1e-5);

GroupElement random_element(const LieGroupModel& model, Rng& rng);
AlgebraVector random_algebra_vector(const LieGroupModel& model, Rng& rng);

// |Inv*eta + eta| on left-trivialized tangents at g (algebraic, no FD).
double inv_eta_defect(const GroupElement& g, const Rvec& u, const Rvec& v,
                      const Rvec& w);

// |Mult*eta - pr1*eta - pr2*eta + d beta| at (g1,g2) on three constant
// left-trivialized tangent pairs; the d beta term is evaluated by central
// finite differences along exp-curves.
double mult_eta_defect(const GroupElement& g1, const GroupElement& g2,
                       const Rvec tri1[2], const Rvec tri2[2],
                       const Rvec tri3[2], double fd_step = 1e-4);

// |iota((xi',xi)_G) eta + d((theta^R.xi' + theta^L.xi)/2)| on tangents v, w.
double contraction_eta_defect(const GroupElement& g, const Rvec& xi_prime,
                              const Rvec& xi, const Rvec& v, const Rvec& w,
                              double fd_step = 1e-4);

}  // namespace modsurf
