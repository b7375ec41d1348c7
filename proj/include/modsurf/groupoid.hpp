#pragma once

#include "modsurf/lie_group.hpp"
#include "modsurf/moduli.hpp"

namespace modsurf {

class GroupoidError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point of the cylinder moduli groupoid over G: a is the boundary loop
// holonomy at the source vertex, c the connecting path holonomy. Source is
// a, target is c a c^{-1}, units are (a, e).
struct CylinderPoint {
  GroupElement a;
  GroupElement c;
};

CylinderPoint make_cylinder_point(const GroupElement& a,
                                  const GroupElement& c);
GroupElement source_of(const CylinderPoint& p);
GroupElement target_of(const CylinderPoint& p);
CylinderPoint unit_at(const GroupElement& a);
CylinderPoint groupoid_inverse(const CylinderPoint& p);

// p after q: composable when p.a = target(q); value (q.a, p.c q.c)
CylinderPoint compose(const CylinderPoint& p, const CylinderPoint& q,
                      double tol = 1e-8);

// closed-form 2-form on left-trivialized tangent pairs v = (v_a, v_c),
// w = (w_a, w_c):
//   -(1/2) c*thL.(a*thL + a*thR) + (1/2) c*thL.Ad_a(c*thL)
double cylinder_omega(const CylinderPoint& p, const Rvec& va, const Rvec& vc,
                      const Rvec& wa, const Rvec& wc);

// the same 2-form as a 2d x 2d matrix in (a, c) block order
Eigen::MatrixXd cylinder_omega_matrix(const CylinderPoint& p);

// (a, c) -> (a, c a); preserves the boundary holonomies exactly
CylinderPoint dehn_twist(const CylinderPoint& p);

struct GroupoidReport {
  double axiom_defect = 0.0;           // unit/inverse/associativity
  double multiplicativity_defect = 0;  // relative
  double d_omega_defect = 0.0;         // dw = t*eta - s*eta, FD
  double min_nondegeneracy = 1e300;    // sigma_min of [omega; Ts; Tt]
  double dehn_twist_omega_defect = 0;
  double closed_form_vs_severa = 0.0;  // against the chart machinery
};

GroupoidReport verify_groupoid(const LieGroupModel& model, int n_samples,
                               Rng& rng, double fd_step = 1e-4);

// Orbit 2-form on generating fields of tuples (a_1..a_n), edges running
// v_{i+1} -> v_i cyclically:
//   (1/2) sum_i [ <Ad_{a_i} xi_{i+1}, zeta_i> - <Ad_{a_{i-1}^{-1}} xi_{i-1}, zeta_i> ]
// For n = 1 this is (1/2)<(Ad_a - Ad_{a^{-1}}) xi, zeta>. The expression is
// the pullback of the cylinder-groupoid 2-form to a source fiber, descended
// to the orbit (cross-checked numerically against the chart machinery).
double orbit_form(const LieGroupModel& model,
                  const std::vector<GroupElement>& a, const Eigen::VectorXd& xi,
                  const Eigen::VectorXd& zeta);

// |iota(xi_O) omega_O - (1/2) iota_O*(thL + thR).xi| on the n = 1 orbit
// (relative; the sign follows the xi_O = d/dt exp(t xi).a convention)
double orbit_momentum_defect(const GroupElement& a, const Rvec& xi,
                             const Rvec& zeta);

// n = 2 cross-check: pull the chart-built cylinder-over-two-vertices 2-form
// back to a source fiber and push down to the orbit; compares with
// orbit_form at the target tuple. Returns the worst relative deviation.
double orbit_descent_defect(const LieGroupModel& model, int n_samples,
                            Rng& rng);

}  // namespace modsurf
