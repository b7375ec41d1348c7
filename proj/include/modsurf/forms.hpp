#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "modsurf/moduli.hpp"

namespace modsurf {

class FormsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Computational carrier of the bullet product: a group-valued map jet
// together with the 2-form accumulated so far, all at a fixed base point.
// `diff` is the left-trivialized differential, `two_form` an antisymmetric
// matrix on chart tangents.
struct SeveraPair {
  GroupElement value;
  Eigen::MatrixXd diff;      // dim(g) x N
  Eigen::MatrixXd two_form;  // N x N, antisymmetric

  static SeveraPair unit(const ModuliChart& chart);
};

// (v1,w1) * (v2,w2) = (v1 v2, w1 + w2 - (v1,v2)*beta)
SeveraPair severa_mul(const SeveraPair& p, const SeveraPair& q);
SeveraPair severa_inverse(const SeveraPair& p);

// jet of a single pattern letter (zero 2-form); dependents auto-expand
SeveraPair letter_pair(const ModuliChart& chart, const ModuliPoint& point,
                       const Lit& lit);

// fold of a word's letter jets
SeveraPair word_pair(const ModuliChart& chart, const ModuliPoint& point,
                     const Word& word);

// The canonical 2-form in chart coordinates: per polygon, folds the side
// jets, skipping the eliminated letter after a cyclic rotation; the polygon
// relation is verified to `relation_tol` on the way.
Eigen::MatrixXd omega_at(const ModuliChart& chart, const ModuliPoint& point,
                         double relation_tol = 1e-8);

// |d omega (X1,X2,X3) + sum_e eta(dPhi_e X1, dPhi_e X2, dPhi_e X3)|
// with d omega computed on constant left-trivialized fields by central
// differences along exp-curves.
double verify_d_omega(const ModuliChart& chart, const ModuliPoint& point,
                      const Tangent& x1, const Tangent& x2, const Tangent& x3,
                      double fd_step = 1e-4);

// |omega(xi_M, v) - (1/2) sum_e (<Ad_{Phi_e} u_e, xi_t> + <u_e, xi_s>)|
// with u_e = dPhi_e(v); fully algebraic. The sign of the sum follows the
// convention that xi_M is the derivative of exp(t xi) acting on the point.
double verify_moment(const ModuliChart& chart, const ModuliPoint& point,
                     const Eigen::VectorXd& xi, const Tangent& v);

struct OmegaReport {
  Eigen::MatrixXd omega;
  Eigen::MatrixXd d_phi;         // stacked
  Eigen::MatrixXd kernel_basis;  // nullspace of omega
  int rank_d_phi = 0;
  int stabilizer_dim = 0;
  double min_degeneracy_sigma = 0.0;  // sigma_min of stacked [omega; dPhi]
  // gap between ker(omega) and the span of generating vectors of
  //   { xi : xi_t + Ad_{Phi_e} xi_s = 0 for all e }
  double kernel_identity_gap = 0.0;
  bool kernel_identity_checked = false;  // requires (A3)
  bool rank_identity_holds = false;      // rank dPhi = |V| dim g - stab dim
};

OmegaReport kernel_report(const ModuliChart& chart, const ModuliPoint& point,
                          double svd_tol = 1e-9);

// Max operator-norm deviation over samples between omega on chart_a and the
// pullback of omega on chart_b through the point map induced by `a_in_b`
// (each a-generator as a word over b's letters). Points are sampled on b.
double compare_patterns(const ModuliChart& chart_a, const ModuliChart& chart_b,
                        const GeneratorCorrespondence& a_in_b, int n_samples,
                        Rng& rng);

struct ReductionCheck {
  bool regular = false;        // trivial stabilizer at the point
  double relation_defect = 0;  // |Phi_cap - e|
  double kernel_gap = 1.0;     // nullspace(omega|_Z) vs orbit directions
};

// At a point with the designated boundary holonomy equal to e: restrict
// omega to ker(dPhi_cap) and compare its nullspace with the orbit span.
ReductionCheck reduction_kernel_check(const ModuliChart& chart,
                                      const ModuliPoint& point,
                                      const std::string& cap_letter,
                                      double tol = 1e-8);

// |(d two_form - value*eta)(x1,x2,x3)| for a point-dependent pair family,
// by central differences. `builder` must return the pair at any nearby point.
using PairFamily =
    std::function<SeveraPair(const ModuliChart&, const ModuliPoint&)>;
double homomorphism_defect(const ModuliChart& chart, const ModuliPoint& point,
                           const PairFamily& builder, const Tangent& x1,
                           const Tangent& x2, const Tangent& x3,
                           double fd_step = 1e-4);

}  // namespace modsurf
