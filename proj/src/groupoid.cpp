#include "modsurf/groupoid.hpp"

#include <algorithm>

#include "modsurf/forms.hpp"
#include "modsurf/linalg.hpp"
#include "modsurf/stock.hpp"

namespace modsurf {

namespace {

const LieGroupModel& model_of(const CylinderPoint& p) { return *p.a.model; }

}  // namespace

CylinderPoint make_cylinder_point(const GroupElement& a,
                                  const GroupElement& c) {
  if (!a.same_model(c))
    throw GroupoidError("cylinder point needs one group model");
  return CylinderPoint{a, c};
}

GroupElement source_of(const CylinderPoint& p) { return p.a; }

GroupElement target_of(const CylinderPoint& p) {
  return GroupElement(p.a.model, p.c.m * p.a.m * p.c.m.inverse());
}

CylinderPoint unit_at(const GroupElement& a) {
  return CylinderPoint{a, a.model->identity()};
}

CylinderPoint groupoid_inverse(const CylinderPoint& p) {
  return CylinderPoint{target_of(p),
                       GroupElement(p.a.model, p.c.m.inverse())};
}

CylinderPoint compose(const CylinderPoint& p, const CylinderPoint& q,
                      double tol) {
  if ((p.a.m - target_of(q).m).norm() > tol)
    throw GroupoidError("compose: source/target mismatch");
  return CylinderPoint{q.a, GroupElement(p.a.model, p.c.m * q.c.m)};
}

double cylinder_omega(const CylinderPoint& p, const Rvec& va, const Rvec& vc,
                      const Rvec& wa, const Rvec& wc) {
  const LieGroupModel& mod = model_of(p);
  const Rmat ad_a = mod.adjoint_matrix(p.a.m);
  const Rvec wa_both = wa + ad_a * wa;
  const Rvec va_both = va + ad_a * va;
  const double term1 =
      -0.5 * (mod.pair(vc, wa_both) - mod.pair(wc, va_both));
  const double term2 =
      0.5 * (mod.pair(vc, ad_a * wc) - mod.pair(wc, ad_a * vc));
  return term1 + term2;
}

Eigen::MatrixXd cylinder_omega_matrix(const CylinderPoint& p) {
  const LieGroupModel& mod = model_of(p);
  const int d = mod.dim();
  const Rmat ad_a = mod.adjoint_matrix(p.a.m);
  const Rmat g = mod.gram();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  const Rmat g_both = g * (Rmat::Identity(d, d) + ad_a);
  omega.block(d, 0, d, d) = -0.5 * g_both;            // (c, a)
  omega.block(0, d, d, d) = 0.5 * g_both.transpose();  // (a, c)
  const Rmat mixed = g * ad_a;
  omega.block(d, d, d, d) = 0.5 * (mixed - mixed.transpose());
  return omega;
}

CylinderPoint dehn_twist(const CylinderPoint& p) {
  return CylinderPoint{p.a, GroupElement(p.a.model, p.c.m * p.a.m)};
}

GroupoidReport verify_groupoid(const LieGroupModel& model, int n_samples,
                               Rng& rng, double fd_step) {
  GroupoidReport rep;
  const int d = model.dim();

  // chart route for the closed-form comparison
  const auto chart = build_chart(stock::pattern("cylinder"), model);
  const int ia = chart.gen_index.at("a");
  const int ic = chart.gen_index.at("c");

  for (int s = 0; s < n_samples; ++s) {
    const CylinderPoint q{random_element(model, rng),
                          random_element(model, rng)};
    const CylinderPoint p{target_of(q), random_element(model, rng)};

    // groupoid axioms
    {
      const CylinderPoint pu = compose(p, unit_at(source_of(p)));
      const CylinderPoint up = compose(unit_at(target_of(p)), p);
      rep.axiom_defect = std::max(
          {rep.axiom_defect, (pu.a.m - p.a.m).norm(), (pu.c.m - p.c.m).norm(),
           (up.a.m - p.a.m).norm(), (up.c.m - p.c.m).norm()});
      const CylinderPoint inv = groupoid_inverse(p);
      const CylinderPoint to_unit = compose(p, inv);
      rep.axiom_defect =
          std::max({rep.axiom_defect,
                    (to_unit.a.m - target_of(p).m).norm(),
                    (to_unit.c.m - model.identity_matrix()).norm()});
      const CylinderPoint r{target_of(p), random_element(model, rng)};
      const CylinderPoint left = compose(compose(r, p), q);
      const CylinderPoint right = compose(r, compose(p, q));
      rep.axiom_defect =
          std::max({rep.axiom_defect, (left.a.m - right.a.m).norm(),
                    (left.c.m - right.c.m).norm()});
    }

    // multiplicativity on composable tangent lifts
    {
      const Rmat ad_cq = model.adjoint_matrix(q.c.m);
      const Rmat ad_aq_inv = model.adjoint_matrix(q.a.m.inverse());
      auto lift = [&](Rng& r2) {
        Eigen::VectorXd t(4 * d);  // (a_p, c_p, a_q, c_q) blocks
        Rvec dcp(d), daq(d), dcq(d);
        for (int i = 0; i < d; ++i) dcp(i) = r2.uniform();
        for (int i = 0; i < d; ++i) daq(i) = r2.uniform();
        for (int i = 0; i < d; ++i) dcq(i) = r2.uniform();
        const Rvec dap = ad_cq * (ad_aq_inv * dcq + daq - dcq);
        t << dap, dcp, daq, dcq;
        return t;
      };
      const Eigen::VectorXd v = lift(rng), w = lift(rng);
      auto omega_pair = [&](const CylinderPoint& pt, const Rvec& x,
                            const Rvec& y) {
        return cylinder_omega(pt, x.head(d), x.tail(d), y.head(d), y.tail(d));
      };
      const Rvec vp = v.head(2 * d), wp = w.head(2 * d);
      const Rvec vq = v.tail(2 * d), wq = w.tail(2 * d);
      // pushforward through Mult(p, q) = (a_q, c_p c_q)
      const Rmat ad_cq_inv = model.adjoint_matrix(q.c.m.inverse());
      auto push = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd out(2 * d);
        out.head(d) = x.segment(2 * d, d);  // delta a_q
        out.tail(d) = ad_cq_inv * x.segment(d, d) + x.tail(d);
        return out;
      };
      const CylinderPoint m = compose(p, q);
      const double lhs = omega_pair(m, push(v), push(w));
      const double rhs = omega_pair(p, vp, wp) + omega_pair(q, vq, wq);
      const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
      rep.multiplicativity_defect = std::max(
          rep.multiplicativity_defect, std::abs(lhs - rhs) / scale);
    }

    // d omega = t*eta - s*eta by finite differences
    {
      auto omega_fn = [&](const CylinderPoint& pt, const Rvec& x,
                          const Rvec& y) {
        return cylinder_omega(pt, x.head(d), x.tail(d), y.head(d), y.tail(d));
      };
      Eigen::VectorXd x1(2 * d), x2(2 * d), x3(2 * d);
      for (int i = 0; i < 2 * d; ++i) {
        x1(i) = rng.uniform();
        x2(i) = rng.uniform();
        x3(i) = rng.uniform();
      }
      auto moved = [&](const Rvec& dir, double t) {
        return CylinderPoint{
            GroupElement(&model, p.a.m * model.exp_matrix(t * dir.head(d))),
            GroupElement(&model, p.c.m * model.exp_matrix(t * dir.tail(d)))};
      };
      auto deriv = [&](const Rvec& dir, const Rvec& aa, const Rvec& bb) {
        return (omega_fn(moved(dir, fd_step), aa, bb) -
                omega_fn(moved(dir, -fd_step), aa, bb)) /
               (2.0 * fd_step);
      };
      auto br = [&](const Rvec& aa, const Rvec& bb) {
        Eigen::VectorXd out(2 * d);
        out.head(d) = model.bracket(aa.head(d), bb.head(d));
        out.tail(d) = model.bracket(aa.tail(d), bb.tail(d));
        return out;
      };
      double d_omega = deriv(x1, x2, x3) - deriv(x2, x1, x3) +
                       deriv(x3, x1, x2);
      d_omega -= omega_fn(p, br(x1, x2), x3);
      d_omega += omega_fn(p, br(x1, x3), x2);
      d_omega -= omega_fn(p, br(x2, x3), x1);

      // s = a: push = delta a; t = c a c^{-1}
      const Rmat ad_c = model.adjoint_matrix(p.c.m);
      const Rmat ad_ainv = model.adjoint_matrix(p.a.m.inverse());
      auto push_t = [&](const Rvec& x) -> Rvec {
        return ad_c * (ad_ainv * x.tail(d) + x.head(d) - x.tail(d));
      };
      const double rhs =
          model.eta(push_t(x1), push_t(x2), push_t(x3)) -
          model.eta(x1.head(d), x2.head(d), x3.head(d));
      rep.d_omega_defect =
          std::max(rep.d_omega_defect, std::abs(d_omega - rhs));
    }

    // minimal nondegeneracy of [omega; Ts; Tt]
    {
      Eigen::MatrixXd stacked(4 * d, 2 * d);
      stacked.topRows(2 * d) = cylinder_omega_matrix(p);
      Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(d, 2 * d);
      ds.leftCols(d) = Rmat::Identity(d, d);
      Eigen::MatrixXd dt(d, 2 * d);
      const Rmat ad_c = model.adjoint_matrix(p.c.m);
      const Rmat ad_ainv = model.adjoint_matrix(p.a.m.inverse());
      dt.leftCols(d) = ad_c;
      dt.rightCols(d) = ad_c * (ad_ainv - Rmat::Identity(d, d));
      stacked.middleRows(2 * d, d) = ds;
      stacked.bottomRows(d) = dt;
      rep.min_nondegeneracy = std::min(
          rep.min_nondegeneracy, linalg::smallest_singular_value(stacked));
    }

    // Dehn twist: Phi preserved exactly, omega transported
    {
      const CylinderPoint tw = dehn_twist(p);
      const Rmat ad_ainv = model.adjoint_matrix(p.a.m.inverse());
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * d, 2 * d);
      jac.topLeftCorner(d, d) = Rmat::Identity(d, d);
      jac.bottomLeftCorner(d, d) = Rmat::Identity(d, d);
      jac.bottomRightCorner(d, d) = ad_ainv;
      const Eigen::MatrixXd reference = cylinder_omega_matrix(p);
      const Eigen::MatrixXd pulled =
          jac.transpose() * cylinder_omega_matrix(tw) * jac;
      rep.dehn_twist_omega_defect = std::max(
          rep.dehn_twist_omega_defect,
          linalg::operator_norm(pulled - reference) /
              std::max(1.0, linalg::operator_norm(reference)));
    }

    // closed form against the chart-built 2-form
    {
      ModuliPoint mp = identity_point(chart);
      mp.g[static_cast<size_t>(ia)] = p.a;
      mp.g[static_cast<size_t>(ic)] = p.c;
      Eigen::MatrixXd chart_omega = omega_at(chart, mp);
      // chart blocks are in generator order; map to (a, c)
      Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(2 * d, 2 * d);
      perm.block(ia * d, 0, d, d) = Rmat::Identity(d, d);
      perm.block(ic * d, d, d, d) = Rmat::Identity(d, d);
      const Eigen::MatrixXd closed = cylinder_omega_matrix(p);
      const Eigen::MatrixXd reordered =
          perm.transpose() * chart_omega * perm;
      rep.closed_form_vs_severa =
          std::max(rep.closed_form_vs_severa,
                   linalg::operator_norm(reordered - closed) /
                       std::max(1.0, linalg::operator_norm(closed)));
    }
  }
  return rep;
}

double orbit_form(const LieGroupModel& model,
                  const std::vector<GroupElement>& a, const Eigen::VectorXd& xi,
                  const Eigen::VectorXd& zeta) {
  const int n = static_cast<int>(a.size());
  const int d = model.dim();
  if (xi.size() != n * d || zeta.size() != n * d)
    throw GroupoidError("orbit_form: tuple index mismatch");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const int prev = (i - 1 + n) % n;
    const Rmat ad = model.adjoint_matrix(a[static_cast<size_t>(i)].m);
    const Rmat ad_prev_inv =
        model.adjoint_matrix(a[static_cast<size_t>(prev)].m.inverse());
    const Rvec xnext = xi.segment(((i + 1) % n) * d, d);
    const Rvec xprev = xi.segment(prev * d, d);
    const Rvec zi = zeta.segment(i * d, d);
    sum += model.pair(ad * xnext, zi) - model.pair(ad_prev_inv * xprev, zi);
  }
  return 0.5 * sum;
}

double orbit_momentum_defect(const GroupElement& a, const Rvec& xi,
                             const Rvec& zeta) {
  const LieGroupModel& mod = *a.model;
  const double lhs = orbit_form(mod, {a}, xi, zeta);
  // iota(xi_O) omega_O = (1/2) iota_O*(thL + thR).xi for the generating
  // field d/dt|0 exp(t xi).a; on zeta_O the right side evaluates with
  // thL(zeta_O) + thR(zeta_O) = (Ad_{a^{-1}} - Ad_a) zeta
  const Rmat ad = mod.adjoint_matrix(a.m);
  const Rmat ad_inv = mod.adjoint_matrix(a.m.inverse());
  const double rhs = 0.5 * mod.pair((ad_inv - ad) * zeta, xi);
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

double orbit_descent_defect(const LieGroupModel& model, int n_samples,
                            Rng& rng) {
  const auto chart = build_chart(stock::pattern("cylinder2"), model);
  const int d = model.dim();

  // the boundary circle holding b1 is the orbit side
  int comp = -1;
  for (const auto& b : chart.boundary)
    if (b.letter == "b1") comp = b.component;
  std::vector<int> edge_idx;
  for (int e = 0; e < static_cast<int>(chart.boundary.size()); ++e)
    if (chart.boundary[static_cast<size_t>(e)].component == comp)
      edge_idx.push_back(e);
  const int n = static_cast<int>(edge_idx.size());

  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const auto point = random_point(chart, rng);
    const auto phis = boundary_holonomy(chart, point);

    Eigen::VectorXd xi = Eigen::VectorXd::Zero(chart.vertex_dim());
    Eigen::VectorXd zeta = Eigen::VectorXd::Zero(chart.vertex_dim());
    std::vector<GroupElement> tuple;
    Eigen::VectorXd xi_t(n * d), zeta_t(n * d);
    for (int k = 0; k < n; ++k) {
      const auto& edge = chart.boundary[static_cast<size_t>(edge_idx[k])];
      tuple.push_back(phis[static_cast<size_t>(edge_idx[k])]);
      for (int i = 0; i < d; ++i) {
        xi_t(k * d + i) = rng.uniform();
        zeta_t(k * d + i) = rng.uniform();
      }
      xi.segment(edge.target_vertex * d, d) = xi_t.segment(k * d, d);
      zeta.segment(edge.target_vertex * d, d) = zeta_t.segment(k * d, d);
    }

    const Tangent v = generating_vector(chart, xi, point);
    const Tangent w = generating_vector(chart, zeta, point);
    const double lhs = v.dot(omega_at(chart, point) * w);
    const double rhs = orbit_form(model, tuple, xi_t, zeta_t);
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace modsurf
