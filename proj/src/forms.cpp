#include "modsurf/forms.hpp"

#include <algorithm>

#include "modsurf/linalg.hpp"

namespace modsurf {

SeveraPair SeveraPair::unit(const ModuliChart& chart) {
  const int n = chart.tangent_dim();
  return SeveraPair{chart.group->identity(),
                    Eigen::MatrixXd::Zero(chart.group->dim(), n),
                    Eigen::MatrixXd::Zero(n, n)};
}

SeveraPair severa_mul(const SeveraPair& p, const SeveraPair& q) {
  if (!p.value.same_model(q.value) || p.diff.cols() != q.diff.cols())
    throw FormsError("severa_mul: mismatched pairs");
  const LieGroupModel& mod = *p.value.model;
  const Eigen::MatrixXd ad_q = mod.adjoint_matrix(q.value.m);
  // (p,q)* beta on tangents v,w:
  //   (1/2)(<Dp v, Ad_q Dq w> - <Dp w, Ad_q Dq v>)
  const Eigen::MatrixXd cross =
      0.5 * p.diff.transpose() * mod.gram() * ad_q * q.diff;
  const Eigen::MatrixXd beta_pull = cross - cross.transpose();
  SeveraPair out;
  out.value = p.value * q.value;
  out.diff = mod.adjoint_matrix(q.value.m.inverse()) * p.diff + q.diff;
  out.two_form = p.two_form + q.two_form - beta_pull;
  return out;
}

SeveraPair severa_inverse(const SeveraPair& p) {
  const LieGroupModel& mod = *p.value.model;
  SeveraPair out;
  out.value = p.value.inverse();
  out.diff = -mod.adjoint_matrix(p.value.m) * p.diff;
  out.two_form = -p.two_form;
  return out;
}

SeveraPair letter_pair(const ModuliChart& chart, const ModuliPoint& point,
                       const Lit& lit) {
  const auto jet = word_jet(chart, point, Word{Lit(lit.id, 1)});
  SeveraPair p{jet.value, jet.diff,
               Eigen::MatrixXd::Zero(chart.tangent_dim(), chart.tangent_dim())};
  return lit.exp == 1 ? p : severa_inverse(p);
}

SeveraPair word_pair(const ModuliChart& chart, const ModuliPoint& point,
                     const Word& word) {
  SeveraPair acc = SeveraPair::unit(chart);
  for (const Lit& l : word) acc = severa_mul(acc, letter_pair(chart, point, l));
  return acc;
}

Eigen::MatrixXd omega_at(const ModuliChart& chart, const ModuliPoint& point,
                         double relation_tol) {
  const int n = chart.tangent_dim();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  for (const auto& dep : chart.dependents) {
    const Word& poly =
        chart.pattern.polygons[static_cast<size_t>(dep.polygon)];
    const int sides = static_cast<int>(poly.size());
    int dep_pos = -1;
    for (int k = 0; k < sides; ++k)
      if (poly[static_cast<size_t>(k)].id == dep.letter) dep_pos = k;

    // rotate the relation so the eliminated letter sits last, then fold the
    // first n-1 jets; the last letter's value closes the relation
    SeveraPair acc = SeveraPair::unit(chart);
    for (int k = 1; k < sides; ++k)
      acc = severa_mul(
          acc, letter_pair(chart, point,
                           poly[static_cast<size_t>((dep_pos + k) % sides)]));
    const Lit dep_lit = poly[static_cast<size_t>(dep_pos)];
    const GroupElement closing = holonomy(chart, point, Word{dep_lit});
    if ((acc.value.m * closing.m - chart.group->identity_matrix()).norm() >
        relation_tol)
      throw FormsError("polygon relation violated at the given point");
    omega += acc.two_form;
  }
  return omega;
}

double verify_d_omega(const ModuliChart& chart, const ModuliPoint& point,
                      const Tangent& x1, const Tangent& x2, const Tangent& x3,
                      double fd_step) {
  const int d = chart.group->dim();
  auto omega_of = [&](const ModuliPoint& p) { return omega_at(chart, p); };
  auto pairing = [&](const Eigen::MatrixXd& om, const Tangent& a,
                     const Tangent& b) { return a.dot(om * b); };
  // fourth-order central differences: the truncation error of the two-point
  // stencil is visible at this tolerance on noncompact groups
  auto deriv = [&](const Tangent& dir, const Tangent& a, const Tangent& b) {
    auto f = [&](double t) {
      return pairing(omega_of(move_point(chart, point, dir, t)), a, b);
    };
    // paired differences cancel exactly when the field is constant
    const double inner = f(fd_step) - f(-fd_step);
    const double outer = f(2.0 * fd_step) - f(-2.0 * fd_step);
    return (8.0 * inner - outer) / (12.0 * fd_step);
  };
  auto alg_bracket = [&](const Tangent& a, const Tangent& b) {
    Tangent out(a.size());
    for (int i = 0; i * d < a.size(); ++i)
      out.segment(i * d, d) =
          chart.group->bracket(a.segment(i * d, d), b.segment(i * d, d));
    return out;
  };

  const Eigen::MatrixXd om0 = omega_of(point);
  double d_omega = deriv(x1, x2, x3) - deriv(x2, x1, x3) + deriv(x3, x1, x2);
  d_omega -= pairing(om0, alg_bracket(x1, x2), x3);
  d_omega += pairing(om0, alg_bracket(x1, x3), x2);
  d_omega -= pairing(om0, alg_bracket(x2, x3), x1);

  double eta_sum = 0.0;
  for (const auto& b : chart.boundary) {
    const auto jet = word_jet(chart, point, b.word);
    eta_sum += chart.group->eta(jet.diff * x1, jet.diff * x2, jet.diff * x3);
  }
  // relative defect: both sides reach ~1e4 on noncompact groups and the
  // 2-form assembly loses a few digits to cancellation there
  const double scale =
      std::max({1.0, std::abs(d_omega), std::abs(eta_sum)});
  return std::abs(d_omega + eta_sum) / scale;
}

double verify_moment(const ModuliChart& chart, const ModuliPoint& point,
                     const Eigen::VectorXd& xi, const Tangent& v) {
  const int d = chart.group->dim();
  const Eigen::MatrixXd omega = omega_at(chart, point);
  const Tangent xm = generating_vector(chart, xi, point);
  const double lhs = xm.dot(omega * v);

  double rhs = 0.0;
  for (const auto& b : chart.boundary) {
    const auto jet = word_jet(chart, point, b.word);
    const Rvec u = jet.diff * v;
    const Rvec xt = xi.segment(b.target_vertex * d, d);
    const Rvec xs = xi.segment(b.source_vertex * d, d);
    rhs += chart.group->pair(adjoint(jet.value, u), xt) +
           chart.group->pair(u, xs);
  }
  // with the generating field d/dt|0 exp(t xi).kappa and the wedge order
  // (alpha.gamma)(v,w) = <alpha(v),gamma(w)> - <alpha(w),gamma(v)>, the
  // contraction identity reads iota(xi_M) omega = +(1/2) sum_e (...).
  // The identity is exact; the defect is normalized by the evaluation scale
  // of the bilinear contraction, which grows with the adjoint factors on
  // noncompact groups.
  const double scale = std::max({1.0, std::abs(lhs), 0.5 * std::abs(rhs),
                                 omega.norm() * xm.norm() * v.norm()});
  return std::abs(lhs - 0.5 * rhs) / scale;
}

OmegaReport kernel_report(const ModuliChart& chart, const ModuliPoint& point,
                          double svd_tol) {
  const int d = chart.group->dim();
  OmegaReport rep;
  rep.omega = omega_at(chart, point);
  rep.d_phi = boundary_differential(chart, point);
  rep.kernel_basis = linalg::nullspace(rep.omega, svd_tol);

  const Eigen::MatrixXd gen = generating_matrix(chart, point);
  rep.stabilizer_dim = static_cast<int>(linalg::nullspace(gen, svd_tol).cols());
  rep.rank_d_phi = linalg::numerical_rank(rep.d_phi, svd_tol);
  rep.rank_identity_holds =
      rep.rank_d_phi == chart.vertex_dim() - rep.stabilizer_dim;

  Eigen::MatrixXd stacked(rep.omega.rows() + rep.d_phi.rows(),
                          chart.tangent_dim());
  stacked << rep.omega, rep.d_phi;
  rep.min_degeneracy_sigma = linalg::smallest_singular_value(stacked);

  if (chart.info.a3) {
    // constraint xi_t + Ad_{Phi_e} xi_s = 0 for every boundary edge
    Eigen::MatrixXd constraint = Eigen::MatrixXd::Zero(
        chart.boundary_dim(), chart.vertex_dim());
    const auto phis = boundary_holonomy(chart, point);
    for (int e = 0; e < static_cast<int>(chart.boundary.size()); ++e) {
      const auto& b = chart.boundary[static_cast<size_t>(e)];
      constraint.block(e * d, b.target_vertex * d, d, d) +=
          Eigen::MatrixXd::Identity(d, d);
      constraint.block(e * d, b.source_vertex * d, d, d) +=
          chart.group->adjoint_matrix(phis[static_cast<size_t>(e)].m);
    }
    const Eigen::MatrixXd xi_basis = linalg::nullspace(constraint, svd_tol);
    const Eigen::MatrixXd span = gen * xi_basis;
    rep.kernel_identity_gap = linalg::subspace_gap(rep.kernel_basis, span);
    rep.kernel_identity_checked = true;
  }
  return rep;
}

double compare_patterns(const ModuliChart& chart_a, const ModuliChart& chart_b,
                        const GeneratorCorrespondence& a_in_b, int n_samples,
                        Rng& rng) {
  const int d = chart_a.group->dim();
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const ModuliPoint pb = random_point(chart_b, rng);
    const ModuliPoint pa = transport_point(chart_b, pb, chart_a, a_in_b);

    Eigen::MatrixXd jac(chart_a.tangent_dim(), chart_b.tangent_dim());
    for (int i = 0; i < chart_a.num_generators(); ++i) {
      const std::string& g = chart_a.generators[static_cast<size_t>(i)];
      auto it = a_in_b.find(g);
      const Word w = it == a_in_b.end() ? Word{Lit(g, 1)} : it->second;
      jac.middleRows(i * d, d) = word_jet(chart_b, pb, w).diff;
    }
    const Eigen::MatrixXd pulled =
        jac.transpose() * omega_at(chart_a, pa) * jac;
    worst = std::max(worst,
                     linalg::operator_norm(pulled - omega_at(chart_b, pb)));
  }
  return worst;
}

ReductionCheck reduction_kernel_check(const ModuliChart& chart,
                                      const ModuliPoint& point,
                                      const std::string& cap_letter,
                                      double tol) {
  ReductionCheck out;
  const Word cap_word = chart.letter_words.at(cap_letter);
  const auto cap_jet = word_jet(chart, point, cap_word);
  out.relation_defect =
      (cap_jet.value.m - chart.group->identity_matrix()).norm();
  if (out.relation_defect > tol)
    throw FormsError("point does not lie on the capped level set");

  out.regular = stabilizer_basis(chart, point).cols() == 0;
  if (!out.regular) return out;

  const Eigen::MatrixXd z_basis = linalg::nullspace(cap_jet.diff);
  const Eigen::MatrixXd omega = omega_at(chart, point);
  const Eigen::MatrixXd omega_z =
      z_basis.transpose() * omega * z_basis;
  const Eigen::MatrixXd null_z = z_basis * linalg::nullspace(omega_z);
  const Eigen::MatrixXd orbit =
      linalg::col_span(generating_matrix(chart, point));
  out.kernel_gap = linalg::subspace_gap(null_z, orbit);
  return out;
}

double homomorphism_defect(const ModuliChart& chart, const ModuliPoint& point,
                           const PairFamily& builder, const Tangent& x1,
                           const Tangent& x2, const Tangent& x3,
                           double fd_step) {
  const int d = chart.group->dim();
  auto pairing = [&](const Eigen::MatrixXd& om, const Tangent& a,
                     const Tangent& b) { return a.dot(om * b); };
  auto deriv = [&](const Tangent& dir, const Tangent& a, const Tangent& b) {
    const auto pp = builder(chart, move_point(chart, point, dir, fd_step));
    const auto pm = builder(chart, move_point(chart, point, dir, -fd_step));
    return (pairing(pp.two_form, a, b) - pairing(pm.two_form, a, b)) /
           (2.0 * fd_step);
  };
  auto alg_bracket = [&](const Tangent& a, const Tangent& b) {
    Tangent out(a.size());
    for (int i = 0; i * d < a.size(); ++i)
      out.segment(i * d, d) =
          chart.group->bracket(a.segment(i * d, d), b.segment(i * d, d));
    return out;
  };
  const SeveraPair p0 = builder(chart, point);
  double d_two_form =
      deriv(x1, x2, x3) - deriv(x2, x1, x3) + deriv(x3, x1, x2);
  d_two_form -= pairing(p0.two_form, alg_bracket(x1, x2), x3);
  d_two_form += pairing(p0.two_form, alg_bracket(x1, x3), x2);
  d_two_form -= pairing(p0.two_form, alg_bracket(x2, x3), x1);

  const double eta_pull =
      chart.group->eta(p0.diff * x1, p0.diff * x2, p0.diff * x3);
  return d_two_form - eta_pull;
}

}  // namespace modsurf
