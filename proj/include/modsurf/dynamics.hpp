#pragma once

#include <map>

#include "modsurf/forms.hpp"
#include "modsurf/moduli.hpp"

namespace modsurf {

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// f = phi(holonomy of a loop word)
struct LoopFunction {
  Word loop;
  InvariantFunction phi;
};

double eval_loop(const ModuliChart& chart, const ModuliPoint& point,
                 const LoopFunction& f);

// differential of f as a plain linear functional on chart tangents
Eigen::VectorXd d_loop(const ModuliChart& chart, const ModuliPoint& point,
                       const LoopFunction& f);

// The unique v with iota(v) omega = -df and dPhi(v) = 0, via least squares
// on the stacked system; the residual certifies that f is admissible.
Tangent hamiltonian_vector_raw(const ModuliChart& chart,
                               const ModuliPoint& point,
                               const Eigen::VectorXd& df,
                               double* residual = nullptr,
                               double tol = 1e-9);

Tangent hamiltonian_vector(const ModuliChart& chart, const ModuliPoint& point,
                           const LoopFunction& f, double* residual = nullptr,
                           double tol = 1e-9);

// Flow of phi_alpha for a boundary loop alpha whose component carries only
// the vertex `vertex`: the action of exp(-t phi_dot(kappa(a))) at that
// vertex. `loop_word` must be the boundary edge's word based there.
ModuliPoint boundary_loop_flow(const ModuliChart& chart,
                               const ModuliPoint& point, int vertex,
                               const Word& loop_word,
                               const InvariantFunction& phi, double t);

// Crossing data of one word's curve with a simple interior loop: the word is
// segment_0 ... segment_l (free reduction allowed), with a sign per interior
// crossing point and the loop's own class transported to the base.
struct IntersectionData {
  std::vector<Word> segments;  // l+1 words whose concatenation is the target
  std::vector<int> signs;      // l entries, +1 or -1
  Word loop;                   // class of alpha

  void validate(const Word& target) const;
};

// kappa_t of the word described by `data`:
//   prod_i exp(t eps_i phi_dot(kappa(a_i))) . kappa(b),
// a_i = b_0...b_{i-1} a b_{i-1}^{-1}...b_0^{-1}. The same signs feed
// goldman_bracket, so one data set describes a configuration coherently;
// signs are oriented so the flow is Hamiltonian for iota(X) omega = -df.
GroupElement goldman_flow_holonomy(const ModuliChart& chart,
                                   const ModuliPoint& point,
                                   const IntersectionData& data,
                                   const InvariantFunction& phi, double t);

// flow of the whole point: per-generator crossing data; absent generators
// carry no crossings and stay fixed
ModuliPoint goldman_flow(const ModuliChart& chart, const ModuliPoint& point,
                         const std::map<std::string, IntersectionData>& data,
                         const InvariantFunction& phi, double t);

// classical RK4 in the exp chart; reports the worst boundary-holonomy drift
// against the starting point when requested
ModuliPoint flow_integrate(const ModuliChart& chart, const ModuliPoint& point,
                           const LoopFunction& f, double t_final, int n_steps,
                           double* phi_drift = nullptr);

// Bracket data: per crossing of alpha with beta, the local sign and a
// conjugator word from the base to the crossing point.
struct BracketData {
  Word alpha;
  Word beta;
  struct Crossing {
    int sign = 1;
    Word conjugator;
  };
  std::vector<Crossing> crossings;
};

// sum_i eps_i <phi_dot(kappa(a_i)), psi_dot(kappa(b_i))> with
// a_i = g_i alpha g_i^{-1}, b_i = g_i beta g_i^{-1}
double goldman_bracket(const ModuliChart& chart, const ModuliPoint& point,
                       const BracketData& data, const InvariantFunction& phi,
                       const InvariantFunction& psi);

// omega(X_f, X_g)
double poisson_bracket_numeric(const ModuliChart& chart,
                               const ModuliPoint& point, const LoopFunction& f,
                               const LoopFunction& g);

}  // namespace modsurf
