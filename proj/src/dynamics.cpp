#include "modsurf/dynamics.hpp"

#include <algorithm>

#include "modsurf/linalg.hpp"

namespace modsurf {

double eval_loop(const ModuliChart& chart, const ModuliPoint& point,
                 const LoopFunction& f) {
  return f.phi.eval(holonomy(chart, point, f.loop));
}

Eigen::VectorXd d_loop(const ModuliChart& chart, const ModuliPoint& point,
                       const LoopFunction& f) {
  const auto jet = word_jet(chart, point, f.loop);
  const Rvec grad = phi_dot(f.phi, jet.value);
  // df(v) = <phi_dot, D v>
  return jet.diff.transpose() * chart.group->gram() * grad;
}

Tangent hamiltonian_vector_raw(const ModuliChart& chart,
                               const ModuliPoint& point,
                               const Eigen::VectorXd& df, double* residual,
                               double tol) {
  const Eigen::MatrixXd omega = omega_at(chart, point);
  const Eigen::MatrixXd d_phi = boundary_differential(chart, point);
  const int n = chart.tangent_dim();
  Eigen::MatrixXd lhs(n + d_phi.rows(), n);
  // iota(v) omega as a functional is z -> omega(v,z) = (omega^T v).z
  lhs.topRows(n) = omega.transpose();
  lhs.bottomRows(d_phi.rows()) = d_phi;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lhs.rows());
  rhs.head(n) = -df;

  double res = 0.0;
  const Tangent v = linalg::lstsq(lhs, rhs, &res);
  if (residual != nullptr) *residual = res;
  if (res > tol * std::max(1.0, df.norm()))
    throw DynamicsError(
        "no Hamiltonian vector field: df is not admissible (residual " +
        std::to_string(res) + ")");
  return v;
}

Tangent hamiltonian_vector(const ModuliChart& chart, const ModuliPoint& point,
                           const LoopFunction& f, double* residual,
                           double tol) {
  return hamiltonian_vector_raw(chart, point, d_loop(chart, point, f),
                                residual, tol);
}

ModuliPoint boundary_loop_flow(const ModuliChart& chart,
                               const ModuliPoint& point, int vertex,
                               const Word& loop_word,
                               const InvariantFunction& phi, double t) {
  if (vertex < 0 || vertex >= chart.num_vertices())
    throw DynamicsError("boundary_loop_flow: vertex index out of range");
  // the boundary component of `vertex` must carry no other vertex
  int component = -1;
  for (const auto& b : chart.boundary)
    if (b.source_vertex == vertex || b.target_vertex == vertex)
      component = b.component;
  if (component < 0)
    throw DynamicsError("boundary_loop_flow: vertex is not on the boundary");
  for (const auto& b : chart.boundary)
    if (b.component == component &&
        (b.source_vertex != vertex || b.target_vertex != vertex))
      throw DynamicsError(
          "boundary_loop_flow: boundary component carries another vertex");

  const Rvec xi = phi_dot(phi, holonomy(chart, point, loop_word));
  std::vector<GroupElement> h(static_cast<size_t>(chart.num_vertices()),
                              chart.group->identity());
  h[static_cast<size_t>(vertex)] = chart.group->exponential(-t * xi);
  return action_apply(chart, h, point);
}

void IntersectionData::validate(const Word& target) const {
  if (signs.size() + 1 != segments.size())
    throw DynamicsError("intersection data: need one segment more than signs");
  for (int s : signs)
    if (s != 1 && s != -1)
      throw DynamicsError("intersection data: signs must be +1 or -1");
  Word concat;
  for (const Word& seg : segments) concat = word_concat(concat, seg);
  if (word_reduce(concat) != word_reduce(target))
    throw DynamicsError(
        "intersection data: segments do not concatenate to the target word");
}

GroupElement goldman_flow_holonomy(const ModuliChart& chart,
                                   const ModuliPoint& point,
                                   const IntersectionData& data,
                                   const InvariantFunction& phi, double t) {
  Word target;
  for (const Word& seg : data.segments) target = word_concat(target, seg);
  data.validate(target);

  Cmat acc = chart.group->identity_matrix();
  Word prefix;  // b_0 ... b_{i-1}
  for (size_t i = 0; i < data.signs.size(); ++i) {
    prefix = word_concat(prefix, data.segments[i]);
    const Word conj = word_reduce(word_concat(
        word_concat(prefix, data.loop), word_inverse(prefix)));
    const Rvec xi = phi_dot(phi, holonomy(chart, point, conj));
    acc = acc * chart.group->exp_matrix(t * data.signs[i] * xi);
  }
  return GroupElement(chart.group,
                      acc * holonomy(chart, point, target).m);
}

ModuliPoint goldman_flow(const ModuliChart& chart, const ModuliPoint& point,
                         const std::map<std::string, IntersectionData>& data,
                         const InvariantFunction& phi, double t) {
  ModuliPoint out;
  for (int i = 0; i < chart.num_generators(); ++i) {
    const std::string& s = chart.generators[static_cast<size_t>(i)];
    auto it = data.find(s);
    if (it == data.end()) {
      out.g.push_back(point.g[static_cast<size_t>(i)]);
      continue;
    }
    it->second.validate(Word{Lit(s, 1)});
    out.g.push_back(
        goldman_flow_holonomy(chart, point, it->second, phi, t));
  }
  return out;
}

ModuliPoint flow_integrate(const ModuliChart& chart, const ModuliPoint& point,
                           const LoopFunction& f, double t_final, int n_steps,
                           double* phi_drift) {
  if (n_steps < 1) throw DynamicsError("flow_integrate: need n_steps >= 1");
  const double h = t_final / n_steps;
  const auto phi0 = boundary_holonomy(chart, point);

  ModuliPoint cur = point;
  auto field = [&](const ModuliPoint& p) {
    return hamiltonian_vector(chart, p, f);
  };
  for (int step = 0; step < n_steps; ++step) {
    const Tangent k1 = field(cur);
    const Tangent k2 = field(move_point(chart, cur, k1, 0.5 * h));
    const Tangent k3 = field(move_point(chart, cur, k2, 0.5 * h));
    const Tangent k4 = field(move_point(chart, cur, k3, h));
    const Tangent k = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    cur = move_point(chart, cur, k, h);
  }

  if (phi_drift != nullptr) {
    double worst = 0.0;
    const auto phi1 = boundary_holonomy(chart, cur);
    for (size_t e = 0; e < phi0.size(); ++e)
      worst = std::max(worst, (phi1[e].m - phi0[e].m).norm());
    *phi_drift = worst;
  }
  return cur;
}

double goldman_bracket(const ModuliChart& chart, const ModuliPoint& point,
                       const BracketData& data, const InvariantFunction& phi,
                       const InvariantFunction& psi) {
  double sum = 0.0;
  for (const auto& crossing : data.crossings) {
    if (crossing.sign != 1 && crossing.sign != -1)
      throw DynamicsError("bracket data: signs must be +1 or -1");
    const Word a = word_reduce(word_concat(
        word_concat(crossing.conjugator, data.alpha),
        word_inverse(crossing.conjugator)));
    const Word b = word_reduce(word_concat(
        word_concat(crossing.conjugator, data.beta),
        word_inverse(crossing.conjugator)));
    const Rvec da = phi_dot(phi, holonomy(chart, point, a));
    const Rvec db = phi_dot(psi, holonomy(chart, point, b));
    sum += crossing.sign * chart.group->pair(da, db);
  }
  return sum;
}

double poisson_bracket_numeric(const ModuliChart& chart,
                               const ModuliPoint& point, const LoopFunction& f,
                               const LoopFunction& g) {
  const Tangent xf = hamiltonian_vector(chart, point, f);
  const Tangent xg = hamiltonian_vector(chart, point, g);
  return xf.dot(omega_at(chart, point) * xg);
}

}  // namespace modsurf
