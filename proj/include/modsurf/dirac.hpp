#pragma once

#include "modsurf/dynamics.hpp"
#include "modsurf/forms.hpp"
#include "modsurf/moduli.hpp"

namespace modsurf {

class DiracError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Element of the twisted generalized tangent fiber over a tuple in G^E:
// vector and covector parts per boundary edge, covectors identified with
// algebra vectors through the invariant metric, everything left-trivialized.
struct CourantElement {
  std::vector<Rvec> vec;
  std::vector<Rvec> cov;
};

// <x,y> = sum_e (<mu_x, v_y> + <mu_y, v_x>)
double courant_pair(const LieGroupModel& model, const CourantElement& x,
                    const CourantElement& y);

// single-factor trivializing section at g:
//   vec = xi - Ad_{g^{-1}} xi', cov = (xi + Ad_{g^{-1}} xi')/2,
// satisfying <s(xi',xi), s(zeta',zeta)> = <xi,zeta> - <xi',zeta'>
CourantElement trivializing_section(const GroupElement& g, const Rvec& xi_prime,
                                    const Rvec& xi);

struct DiracFiber {
  std::vector<CourantElement> basis;
  double isotropy_defect = 0.0;
};

// The structure fiber A at Phi(kappa): sigma(xi)|_e = s^e(xi_t, xi_s) over a
// basis of the vertex algebra. Lagrangian: |V| = |E| on boundary circles.
DiracFiber structure_fiber(const ModuliChart& chart, const ModuliPoint& point);

struct DiracMorphismReport {
  double existence_residual = 0.0;   // worst over the A-basis
  double uniqueness_sigma = 0.0;     // sigma_min of the relation system
  double comorphism_defect = 0.0;    // solved v against the generating vector
  double d_omega_defect = 0.0;       // condition (1), FD
  double moment_defect = 0.0;        // condition (2), algebraic
  double min_degeneracy = 0.0;       // condition (3)
  bool pass = false;
};

// Checks that every A-basis element is related to a unique tangent vector
// under v ~ w + nu iff w = dPhi(v), dPhi*nu = iota_v omega, and that the
// induced action is the vertex-group action. `omega_override`, when given,
// replaces the canonical 2-form (negative controls).
DiracMorphismReport verify_dirac_morphism(
    const ModuliChart& chart, const ModuliPoint& point,
    const Eigen::MatrixXd* omega_override = nullptr, double exist_tol = 1e-8,
    double sigma_tol = 1e-9);

struct RangeKernelReport {
  double ann_range_gap = 1.0;   // ann(ran dPhi) vs stabilizer covectors
  double kernel_iso_gap = 1.0;  // omega-flat image of ker dPhi vs ann(S_m)
  double kernel_iso_condition = 0.0;
};

RangeKernelReport range_kernel_props(const ModuliChart& chart,
                                     const ModuliPoint& point);

struct BivectorReport {
  Eigen::MatrixXd pi;           // pi# on metric-identified covectors
  double antisymmetry = 0.0;    // relative
  double transversality_sigma = 0.0;
  // pi#(df) against the Hamiltonian field in the anchor's sign convention
  double hamiltonian_defect = 0.0;
};

// Quasi-Poisson bivector from the Lagrangian splitting A + B, where B is
// the antidiagonal-type complement b(xi)|_e = s^e(xi_t, -xi_s).
BivectorReport quasi_poisson_bivector(
    const ModuliChart& chart, const ModuliPoint& point,
    const std::vector<LoopFunction>& probes = {});

// pi(df, dg); equals the Poisson bracket omega(X_f, X_g) of invariant
// functions
double bivector_bracket(const ModuliChart& chart, const ModuliPoint& point,
                        const Eigen::MatrixXd& pi_sharp, const LoopFunction& f,
                        const LoopFunction& g);

}  // namespace modsurf
