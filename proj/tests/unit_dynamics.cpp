#include "doctest.h"

#include "modsurf/dynamics.hpp"
#include "modsurf/linalg.hpp"
#include "modsurf/stock.hpp"

using namespace modsurf;

namespace {

// the standard one-holed-torus configuration: alpha in the class of the
// a-loop crosses the b-curve once; certified against the Hamiltonian-vector
// oracle (the other segment layout breaks the boundary holonomy)
std::map<std::string, IntersectionData> torus_a_loop_data() {
  IntersectionData b_data;
  b_data.segments = {parse_word("b"), {}};
  b_data.signs = {-1};
  b_data.loop = parse_word("a");
  return {{"b", b_data}};
}

Tangent flow_derivative(const ModuliChart& chart, const ModuliPoint& p,
                        const std::map<std::string, IntersectionData>& data,
                        const InvariantFunction& phi, double h = 1e-6) {
  const auto pp = goldman_flow(chart, p, data, phi, h);
  const auto pm = goldman_flow(chart, p, data, phi, -h);
  const int d = chart.group->dim();
  Tangent fd(chart.tangent_dim());
  for (int i = 0; i < chart.num_generators(); ++i) {
    const Cmat diff = (p.g[static_cast<size_t>(i)].m.inverse() *
                       (pp.g[static_cast<size_t>(i)].m -
                        pm.g[static_cast<size_t>(i)].m)) /
                      (2.0 * h);
    fd.segment(i * d, d) = chart.group->coords_of(diff, 1e-3);
  }
  return fd;
}

double point_distance(const ModuliPoint& a, const ModuliPoint& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.g.size(); ++i)
    worst = std::max(worst, (a.g[i].m - b.g[i].m).norm());
  return worst;
}

}  // namespace

TEST_CASE("hamiltonian_vector: constant, cylinder closed form, FD solve") {
  Rng rng(301);
  const auto cyl = build_chart(stock::pattern("cylinder"), LieGroupModel::su2());
  const auto p = random_point(cyl, rng);

  // constant f
  LoopFunction constant{{}, InvariantFunction::constant(2.0)};
  CHECK(hamiltonian_vector(cyl, p, constant).norm() < 1e-12);

  // f = phi(a): X_f = (0, phi_dot(a)) in (a,c) components
  LoopFunction f{parse_word("a"), InvariantFunction::re_trace()};
  double res = 0.0;
  const Tangent v = hamiltonian_vector(cyl, p, f, &res);
  CHECK(res < 1e-12);
  const int d = cyl.group->dim();
  const Rvec expected =
      phi_dot(f.phi, p.g[static_cast<size_t>(cyl.gen_index.at("a"))]);
  CHECK(v.segment(cyl.gen_index.at("a") * d, d).norm() < 1e-12);
  CHECK((v.segment(cyl.gen_index.at("c") * d, d) - expected).norm() < 1e-12);

  // independent pseudoinverse route on a torus invariant function
  const auto torus =
      build_chart(stock::pattern("one_holed_torus"), LieGroupModel::su2());
  const auto tp = random_point(torus, rng);
  LoopFunction g{parse_word("a b a^-1"), InvariantFunction::re_trace()};
  const Tangent xg = hamiltonian_vector(torus, tp, g);
  const Eigen::MatrixXd omega = omega_at(torus, tp);
  const Eigen::MatrixXd dphi = boundary_differential(torus, tp);
  Eigen::MatrixXd stacked(omega.rows() + dphi.rows(), omega.cols());
  stacked << omega.transpose(), dphi;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(stacked.rows());
  rhs.head(omega.rows()) = -d_loop(torus, tp, g);
  const Eigen::VectorXd oracle =
      stacked.completeOrthogonalDecomposition().solve(rhs);
  CHECK((xg - oracle).norm() < 1e-8);
}

TEST_CASE("hamiltonian_vector rejects non-invariant data") {
  Rng rng(302);
  const auto torus =
      build_chart(stock::pattern("one_holed_torus"), LieGroupModel::su2());
  const auto p = random_point(torus, rng);
  // a random covector is generically inadmissible
  Eigen::VectorXd df(torus.tangent_dim());
  for (int i = 0; i < df.size(); ++i) df(i) = rng.uniform();
  CHECK_THROWS_AS(hamiltonian_vector_raw(torus, p, df), DynamicsError);
}

TEST_CASE("boundary_loop_flow: cylinder") {
  Rng rng(303);
  const auto cyl = build_chart(stock::pattern("cylinder"), LieGroupModel::su2());
  const auto p = random_point(cyl, rng);
  const auto phi = InvariantFunction::re_trace();
  const Word a_word = parse_word("a");
  const auto [va, ta] = cyl.info.letter_endpoints.at("a");

  // t = 0 fixes the point
  CHECK(point_distance(boundary_loop_flow(cyl, p, va, a_word, phi, 0.0), p) ==
        0.0);

  // (a, c) -> (a, c exp(t phi_dot(a)))
  const double t = 0.73;
  const auto moved = boundary_loop_flow(cyl, p, va, a_word, phi, t);
  const Cmat a0 = p.g[static_cast<size_t>(cyl.gen_index.at("a"))].m;
  const Cmat c0 = p.g[static_cast<size_t>(cyl.gen_index.at("c"))].m;
  const Rvec xi = phi_dot(phi, GroupElement(cyl.group, a0));
  CHECK((moved.g[static_cast<size_t>(cyl.gen_index.at("a"))].m - a0).norm() <
        1e-12);
  CHECK((moved.g[static_cast<size_t>(cyl.gen_index.at("c"))].m -
         c0 * cyl.group->exp_matrix(t * xi))
            .norm() < 1e-12);

  // derivative at t = 0 is the Hamiltonian vector field
  LoopFunction f{a_word, phi};
  const Tangent xf = hamiltonian_vector(cyl, p, f);
  const double h = 1e-6;
  const auto pp = boundary_loop_flow(cyl, p, va, a_word, phi, h);
  const auto pm = boundary_loop_flow(cyl, p, va, a_word, phi, -h);
  const int d = cyl.group->dim();
  for (int i = 0; i < cyl.num_generators(); ++i) {
    const Cmat diff = (p.g[static_cast<size_t>(i)].m.inverse() *
                       (pp.g[static_cast<size_t>(i)].m -
                        pm.g[static_cast<size_t>(i)].m)) /
                      (2.0 * h);
    CHECK((cyl.group->coords_of(diff, 1e-3) - xf.segment(i * d, d)).norm() <
          1e-7);
  }

  // one-parameter group law
  const auto two_step = boundary_loop_flow(
      cyl, boundary_loop_flow(cyl, p, va, a_word, phi, 0.31), va, a_word, phi,
      0.42);
  const auto direct = boundary_loop_flow(cyl, p, va, a_word, phi, 0.73);
  CHECK(point_distance(two_step, direct) < 1e-12);

  // flows fix the boundary holonomies
  const auto phi_before = boundary_holonomy(cyl, p);
  const auto phi_after = boundary_holonomy(cyl, moved);
  for (size_t e = 0; e < phi_before.size(); ++e)
    CHECK((phi_after[e].m - phi_before[e].m).norm() < 1e-10);

  // a vertex sharing its boundary circle with another vertex is rejected
  const auto cyl2 =
      build_chart(stock::pattern("cylinder2"), LieGroupModel::su2());
  const auto p2 = random_point(cyl2, rng);
  const auto [s1, t1] = cyl2.info.letter_endpoints.at("a1");
  CHECK_THROWS_AS(
      boundary_loop_flow(cyl2, p2, t1, parse_word("a1 a2"), phi, 0.5),
      DynamicsError);
}

TEST_CASE("goldman_flow: no crossings, single crossing, certified data") {
  Rng rng(304);
  const auto torus =
      build_chart(stock::pattern("one_holed_torus"), LieGroupModel::su2());
  const auto p = random_point(torus, rng);
  const auto phi = InvariantFunction::re_trace();

  // l = 0: nothing moves
  IntersectionData trivial;
  trivial.segments = {parse_word("b")};
  trivial.loop = parse_word("a");
  CHECK((goldman_flow_holonomy(torus, p, trivial, phi, 0.8).m -
         holonomy(torus, p, parse_word("b")).m)
            .norm() == 0.0);

  // single crossing with empty leading segment: left twist by exp(t e xi)
  IntersectionData lead;
  lead.segments = {{}, parse_word("b")};
  lead.signs = {1};
  lead.loop = parse_word("a");
  const Rvec xi = phi_dot(phi, holonomy(torus, p, parse_word("a")));
  const Cmat expect = torus.group->exp_matrix(0.8 * xi) *
                      holonomy(torus, p, parse_word("b")).m;
  CHECK((goldman_flow_holonomy(torus, p, lead, phi, 0.8).m - expect).norm() <
        1e-12);

  // certified configuration matches the Hamiltonian vector field of phi_a
  const auto data = torus_a_loop_data();
  LoopFunction f{parse_word("a"), phi};
  const Tangent xf = hamiltonian_vector(torus, p, f);
  CHECK((flow_derivative(torus, p, data, phi) - xf).norm() < 1e-7);

  // boundary holonomies are preserved along the flow
  const auto flowed = goldman_flow(torus, p, data, phi, 1.3);
  CHECK((boundary_holonomy(torus, flowed)[0].m -
         boundary_holonomy(torus, p)[0].m)
            .norm() < 1e-10);

  // one-parameter group law
  const auto ab = goldman_flow(torus, goldman_flow(torus, p, data, phi, 0.5),
                               data, phi, 0.7);
  const auto once = goldman_flow(torus, p, data, phi, 1.2);
  CHECK(point_distance(ab, once) < 1e-12);

  // inconsistent segmentation is rejected
  IntersectionData bad;
  bad.segments = {parse_word("a"), parse_word("b")};
  bad.signs = {1};
  bad.loop = parse_word("a");
  std::map<std::string, IntersectionData> bad_map{{"b", bad}};
  CHECK_THROWS_AS(goldman_flow(torus, p, bad_map, phi, 0.5), DynamicsError);
}

TEST_CASE("flow_integrate: constant field, cylinder cross-check, omega") {
  Rng rng(305);
  const auto cyl = build_chart(stock::pattern("cylinder"), LieGroupModel::su2());
  const auto p = random_point(cyl, rng);
  const auto phi = InvariantFunction::re_trace();

  LoopFunction constant{{}, InvariantFunction::constant(1.0)};
  CHECK(point_distance(flow_integrate(cyl, p, constant, 1.0, 10), p) < 1e-12);

  // RK4 endpoint against the explicit flow at t=1
  LoopFunction f{parse_word("a"), phi};
  double drift = 0.0;
  const auto rk = flow_integrate(cyl, p, f, 1.0, 1000, &drift);
  const auto [va, ta] = cyl.info.letter_endpoints.at("a");
  const auto explicit_flow =
      boundary_loop_flow(cyl, p, va, parse_word("a"), phi, 1.0);
  CHECK(point_distance(rk, explicit_flow) < 1e-6);
  CHECK(drift < 1e-6);

  // L_{X_f} omega = 0: pull omega back through the explicit time-1 flow map
  const int n = cyl.tangent_dim();
  auto flow_map = [&](const ModuliPoint& q) {
    return boundary_loop_flow(cyl, q, va, parse_word("a"), phi, 1.0);
  };
  Eigen::MatrixXd jac(n, n);
  const double h = 1e-6;
  for (int j = 0; j < n; ++j) {
    Tangent dir = Tangent::Zero(n);
    dir(j) = 1.0;
    const auto qp = flow_map(move_point(cyl, p, dir, h));
    const auto qm = flow_map(move_point(cyl, p, dir, -h));
    const int d = cyl.group->dim();
    for (int i = 0; i < cyl.num_generators(); ++i) {
      const Cmat diff = (explicit_flow.g[static_cast<size_t>(i)].m.inverse() *
                         (qp.g[static_cast<size_t>(i)].m -
                          qm.g[static_cast<size_t>(i)].m)) /
                        (2.0 * h);
      jac.block(i * d, j, d, 1) = cyl.group->coords_of(diff, 1e-3);
    }
  }
  const Eigen::MatrixXd pulled =
      jac.transpose() * omega_at(cyl, explicit_flow) * jac;
  CHECK(linalg::operator_norm(pulled - omega_at(cyl, p)) < 1e-5);
}

TEST_CASE("goldman_bracket: disjoint, rebasing, abelian, numeric oracle") {
  Rng rng(306);
  const auto torus =
      build_chart(stock::pattern("one_holed_torus"), LieGroupModel::su2());
  const auto p = random_point(torus, rng);
  const auto phi = InvariantFunction::re_trace();

  BracketData disjoint;
  disjoint.alpha = parse_word("a");
  disjoint.beta = parse_word("a");
  CHECK(goldman_bracket(torus, p, disjoint, phi, phi) == 0.0);

  // the certified a/b configuration equals omega(X_f, X_g)
  BracketData data;
  data.alpha = parse_word("a");
  data.beta = parse_word("b");
  data.crossings = {{-1, parse_word("b")}};
  LoopFunction f{parse_word("a"), phi};
  LoopFunction g{parse_word("b"), phi};
  const double numeric = poisson_bracket_numeric(torus, p, f, g);
  CHECK(std::abs(goldman_bracket(torus, p, data, phi, phi) - numeric) < 1e-8);

  // conjugator independence under rebasing by a loop at the base point
  BracketData rebased = data;
  rebased.crossings[0].conjugator = parse_word("a b^-1 a b");
  CHECK(std::abs(goldman_bracket(torus, p, rebased, phi, phi) -
                 goldman_bracket(torus, p, data, phi, phi)) < 1e-12);

  // abelian model: conjugation is trivial, so the sum telescopes through the
  // signs alone; the two oracles still agree for nonzero total sign, and a
  // balanced sign pattern cancels exactly
  const auto ab =
      build_chart(stock::pattern("one_holed_torus"), LieGroupModel::torus2());
  const auto pa = random_point(ab, rng);
  InvariantFunction tr_ab = InvariantFunction::re_trace();
  LoopFunction fa{parse_word("a"), tr_ab};
  LoopFunction gb{parse_word("b"), tr_ab};
  CHECK(std::abs(goldman_bracket(ab, pa, data, tr_ab, tr_ab) -
                 poisson_bracket_numeric(ab, pa, fa, gb)) < 1e-12);
  BracketData balanced = data;
  balanced.crossings = {{1, parse_word("b")}, {-1, parse_word("a b a^-1")}};
  CHECK(std::abs(goldman_bracket(ab, pa, balanced, tr_ab, tr_ab)) < 1e-13);
}

TEST_CASE("poisson_bracket_numeric: antisymmetry and degenerate cases") {
  Rng rng(307);
  const auto torus =
      build_chart(stock::pattern("one_holed_torus"), LieGroupModel::su2());
  const auto p = random_point(torus, rng);
  const auto phi = InvariantFunction::re_trace();
  LoopFunction f{parse_word("a"), phi};
  LoopFunction g{parse_word("b"), phi};

  CHECK(std::abs(poisson_bracket_numeric(torus, p, f, f)) < 1e-12);
  LoopFunction c{{}, InvariantFunction::constant(4.0)};
  CHECK(std::abs(poisson_bracket_numeric(torus, p, f, c)) < 1e-12);
  CHECK(poisson_bracket_numeric(torus, p, f, g) ==
        doctest::Approx(-poisson_bracket_numeric(torus, p, g, f))
            .epsilon(1e-10));
}
