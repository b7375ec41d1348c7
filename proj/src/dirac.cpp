#include "modsurf/dirac.hpp"

#include <algorithm>

#include "modsurf/linalg.hpp"

namespace modsurf {

double courant_pair(const LieGroupModel& model, const CourantElement& x,
                    const CourantElement& y) {
  if (x.vec.size() != y.vec.size())
    throw DiracError("courant_pair: edge count mismatch");
  double sum = 0.0;
  for (size_t e = 0; e < x.vec.size(); ++e)
    sum += model.pair(x.cov[e], y.vec[e]) + model.pair(y.cov[e], x.vec[e]);
  return sum;
}

CourantElement trivializing_section(const GroupElement& g, const Rvec& xi_prime,
                                    const Rvec& xi) {
  const Rmat ad_inv = g.model->adjoint_matrix(g.m.inverse());
  CourantElement out;
  out.vec.push_back(xi - ad_inv * xi_prime);
  out.cov.push_back(0.5 * (xi + ad_inv * xi_prime));
  return out;
}

namespace {

// sigma(xi) over all boundary edges at the point's boundary holonomies
CourantElement structure_section(const ModuliChart& chart,
                                 const std::vector<GroupElement>& phis,
                                 const Eigen::VectorXd& xi) {
  const int d = chart.group->dim();
  CourantElement out;
  for (size_t e = 0; e < chart.boundary.size(); ++e) {
    const auto& b = chart.boundary[e];
    const Rvec xt = xi.segment(b.target_vertex * d, d);
    const Rvec xs = xi.segment(b.source_vertex * d, d);
    const CourantElement one = trivializing_section(phis[e], xt, xs);
    out.vec.push_back(one.vec[0]);
    out.cov.push_back(one.cov[0]);
  }
  return out;
}

Eigen::VectorXd flatten(const std::vector<Rvec>& parts) {
  int total = 0;
  for (const auto& p : parts) total += static_cast<int>(p.size());
  Eigen::VectorXd out(total);
  int at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += static_cast<int>(p.size());
  }
  return out;
}

Eigen::MatrixXd block_gram(const LieGroupModel& model, int blocks) {
  const int d = model.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(blocks * d, blocks * d);
  for (int i = 0; i < blocks; ++i) g.block(i * d, i * d, d, d) = model.gram();
  return g;
}

}  // namespace

DiracFiber structure_fiber(const ModuliChart& chart,
                           const ModuliPoint& point) {
  const auto phis = boundary_holonomy(chart, point);
  DiracFiber fiber;
  for (int k = 0; k < chart.vertex_dim(); ++k) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(chart.vertex_dim());
    xi(k) = 1.0;
    fiber.basis.push_back(structure_section(chart, phis, xi));
  }
  // relative defect: section magnitudes grow with the adjoint factors
  auto magnitude = [](const CourantElement& x) {
    double m = 0.0;
    for (size_t e = 0; e < x.vec.size(); ++e)
      m += x.vec[e].norm() + x.cov[e].norm();
    return m;
  };
  for (size_t i = 0; i < fiber.basis.size(); ++i)
    for (size_t j = i; j < fiber.basis.size(); ++j) {
      const double scale = std::max(
          1.0, magnitude(fiber.basis[i]) * magnitude(fiber.basis[j]));
      fiber.isotropy_defect =
          std::max(fiber.isotropy_defect,
                   std::abs(courant_pair(*chart.group, fiber.basis[i],
                                         fiber.basis[j])) /
                       scale);
    }
  return fiber;
}

DiracMorphismReport verify_dirac_morphism(const ModuliChart& chart,
                                          const ModuliPoint& point,
                                          const Eigen::MatrixXd* omega_override,
                                          double exist_tol, double sigma_tol) {
  const int d = chart.group->dim();
  const int n = chart.tangent_dim();
  DiracMorphismReport rep;

  const Eigen::MatrixXd omega =
      omega_override != nullptr ? *omega_override : omega_at(chart, point);
  const Eigen::MatrixXd d_phi = boundary_differential(chart, point);
  const Eigen::MatrixXd gram_e =
      block_gram(*chart.group, static_cast<int>(chart.boundary.size()));

  // relation system: dPhi v = vec part, omega^T v = dPhi^T G nu
  Eigen::MatrixXd lhs(d_phi.rows() + n, n);
  lhs.topRows(d_phi.rows()) = d_phi;
  lhs.bottomRows(n) = omega.transpose();
  rep.uniqueness_sigma = linalg::smallest_singular_value(lhs);

  // relation: v ~ w + nu iff w = dPhi(v) and 0 = dPhi*nu + iota_v omega;
  // the anchor of the trivializing sections is the d/dt exp(-t xi) action
  // convention, so sigma(xi) relates to the generating vector of -xi
  const auto fiber = structure_fiber(chart, point);
  for (int k = 0; k < chart.vertex_dim(); ++k) {
    const Eigen::VectorXd w = flatten(fiber.basis[static_cast<size_t>(k)].vec);
    const Eigen::VectorXd nu =
        flatten(fiber.basis[static_cast<size_t>(k)].cov);
    Eigen::VectorXd rhs(lhs.rows());
    rhs.head(d_phi.rows()) = w;
    rhs.tail(n) = -(d_phi.transpose() * gram_e * nu);
    double res = 0.0;
    const Eigen::VectorXd v = linalg::lstsq(lhs, rhs, &res);
    rep.existence_residual = std::max(
        rep.existence_residual, res / std::max(1.0, rhs.norm()));

    Eigen::VectorXd xi = Eigen::VectorXd::Zero(chart.vertex_dim());
    xi(k) = 1.0;
    rep.comorphism_defect =
        std::max(rep.comorphism_defect,
                 (v + generating_vector(chart, xi, point)).norm());
  }

  // Hamiltonian-space conditions, for diagnosis when something fails
  Rng probe(0x5eed);
  rep.d_omega_defect =
      verify_d_omega(chart, point, random_tangent(chart, probe),
                     random_tangent(chart, probe),
                     random_tangent(chart, probe));
  Eigen::VectorXd xi(chart.vertex_dim());
  for (int i = 0; i < xi.size(); ++i) xi(i) = probe.uniform();
  rep.moment_defect =
      verify_moment(chart, point, xi, random_tangent(chart, probe));
  Eigen::MatrixXd stacked(omega.rows() + d_phi.rows(), n);
  stacked << omega, d_phi;
  rep.min_degeneracy = linalg::smallest_singular_value(stacked);

  rep.pass = rep.existence_residual <= exist_tol &&
             rep.uniqueness_sigma > sigma_tol &&
             rep.comorphism_defect <= 1e-6;
  return rep;
}

RangeKernelReport range_kernel_props(const ModuliChart& chart,
                                     const ModuliPoint& point) {
  RangeKernelReport rep;
  const int n = chart.tangent_dim();
  const Eigen::MatrixXd d_phi = boundary_differential(chart, point);
  const Eigen::MatrixXd gram_e =
      block_gram(*chart.group, static_cast<int>(chart.boundary.size()));
  const Eigen::MatrixXd gram_s =
      block_gram(*chart.group, chart.num_generators());

  // ann(ran dPhi) in metric-identified covector coordinates
  const Eigen::MatrixXd ann_range =
      linalg::nullspace(d_phi.transpose() * gram_e);

  // stabilizer covectors: covector parts of sigma(xi) for stabilizer xi
  const Eigen::MatrixXd stab = stabilizer_basis(chart, point);
  const auto phis = boundary_holonomy(chart, point);
  Eigen::MatrixXd k_m(gram_e.rows(), stab.cols());
  for (int k = 0; k < stab.cols(); ++k) {
    const CourantElement sec = structure_section(chart, phis, stab.col(k));
    k_m.col(k) = flatten(sec.cov);
  }
  rep.ann_range_gap = linalg::subspace_gap(ann_range, k_m);

  // omega-flat restricted to ker dPhi lands on ann(S_m) isomorphically
  const Eigen::MatrixXd omega = omega_at(chart, point);
  const Eigen::MatrixXd ker_phi = linalg::nullspace(d_phi);
  const Eigen::MatrixXd gen = generating_matrix(chart, point);
  const Eigen::MatrixXd ann_orbit =
      linalg::nullspace(gen.transpose() * gram_s);
  const Eigen::MatrixXd image =
      gram_s.ldlt().solve(omega.transpose() * ker_phi);
  rep.kernel_iso_gap = linalg::subspace_gap(image, ann_orbit);
  if (ker_phi.cols() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(image);
    const auto& sv = svd.singularValues();
    rep.kernel_iso_condition =
        sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : 1e300;
  }
  (void)n;
  return rep;
}

BivectorReport quasi_poisson_bivector(const ModuliChart& chart,
                                      const ModuliPoint& point,
                                      const std::vector<LoopFunction>& probes) {
  const int d = chart.group->dim();
  const int n = chart.tangent_dim();
  const int vd = chart.vertex_dim();
  BivectorReport rep;

  const Eigen::MatrixXd omega = omega_at(chart, point);
  const Eigen::MatrixXd d_phi = boundary_differential(chart, point);
  const Eigen::MatrixXd gram_e =
      block_gram(*chart.group, static_cast<int>(chart.boundary.size()));
  const Eigen::MatrixXd gram_s =
      block_gram(*chart.group, chart.num_generators());
  const auto phis = boundary_holonomy(chart, point);

  // B-fiber sections: b(xi)|_e = s^e(xi_t, -xi_s); assemble the vector and
  // covector parts of a basis
  Eigen::MatrixXd vec_b(d_phi.rows(), vd);
  Eigen::MatrixXd cov_b(d_phi.rows(), vd);
  for (int k = 0; k < vd; ++k) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(vd);
    xi(k) = 1.0;
    CourantElement sec;
    for (size_t e = 0; e < chart.boundary.size(); ++e) {
      const auto& bd = chart.boundary[e];
      const Rvec xt = xi.segment(bd.target_vertex * d, d);
      const Rvec xs = xi.segment(bd.source_vertex * d, d);
      const CourantElement one = trivializing_section(phis[e], xt, -xs);
      sec.vec.push_back(one.vec[0]);
      sec.cov.push_back(one.cov[0]);
    }
    vec_b.col(k) = flatten(sec.vec);
    cov_b.col(k) = flatten(sec.cov);
  }

  // preimage of B under the same relation as the A-morphism: pairs
  // (v, zeta) with dPhi v = vec_b zeta and
  // mu = (TPhi)* cov_b zeta + iota_v omega (metric-identified)
  Eigen::MatrixXd constraint(d_phi.rows(), n + vd);
  constraint.leftCols(n) = d_phi;
  constraint.rightCols(vd) = -vec_b;
  const Eigen::MatrixXd params = linalg::nullspace(constraint);
  if (params.cols() != n)
    throw DiracError("quasi-Poisson: preimage of B has unexpected dimension");

  Eigen::MatrixXd v_part(n, n), mu_part(n, n);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd v = params.col(k).head(n);
    const Eigen::VectorXd zeta = params.col(k).tail(vd);
    v_part.col(k) = v;
    const Eigen::VectorXd mu_plain =
        d_phi.transpose() * gram_e * (cov_b * zeta) + omega.transpose() * v;
    mu_part.col(k) = gram_s.ldlt().solve(mu_plain);
  }

  // transversality to TM: the covector parts must span
  rep.transversality_sigma = linalg::smallest_singular_value(mu_part);
  if (rep.transversality_sigma < 1e-12)
    throw DiracError("quasi-Poisson: splitting not transverse to TM at point");
  const Eigen::MatrixXd pi_sharp =
      v_part * mu_part.colPivHouseholderQr().inverse();

  // pi(mu, nu) = <mu, pi# nu>; antisymmetry of G pi#
  rep.pi = pi_sharp;
  const Eigen::MatrixXd g_pi = gram_s * pi_sharp;
  rep.antisymmetry = (g_pi + g_pi.transpose()).norm() /
                     std::max(1.0, g_pi.norm());

  // pi#(df) is the Hamiltonian vector field in the anchor's sign convention
  // (the d/dt exp(-t xi) one), i.e. -X_f here; the bracket pi(df, dg) then
  // reproduces {f,g} = omega(X_f, X_g) on the nose
  for (const auto& f : probes) {
    const Eigen::VectorXd df_plain = d_loop(chart, point, f);
    const Eigen::VectorXd df_cov = gram_s.ldlt().solve(df_plain);
    const Tangent xf = hamiltonian_vector(chart, point, f);
    rep.hamiltonian_defect =
        std::max(rep.hamiltonian_defect,
                 (pi_sharp * df_cov + xf).norm() / std::max(1.0, xf.norm()));
  }
  return rep;
}

double bivector_bracket(const ModuliChart& chart, const ModuliPoint& point,
                        const Eigen::MatrixXd& pi_sharp, const LoopFunction& f,
                        const LoopFunction& g) {
  const Eigen::MatrixXd gram_s =
      block_gram(*chart.group, chart.num_generators());
  const Eigen::VectorXd df = d_loop(chart, point, f);
  const Eigen::VectorXd dg_cov =
      gram_s.ldlt().solve(d_loop(chart, point, g));
  return df.dot(pi_sharp * dg_cov);
}

}  // namespace modsurf
