#include "doctest.h"

#include "modsurf/forms.hpp"
#include "modsurf/linalg.hpp"
#include "modsurf/stock.hpp"

using namespace modsurf;

namespace {

ModuliChart make_chart(const std::string& name, const LieGroupModel& g) {
  return build_chart(stock::pattern(name), g);
}

PairFamily word_family(const Word& w) {
  return [w](const ModuliChart& chart, const ModuliPoint& p) {
    return word_pair(chart, p, w);
  };
}

}  // namespace

TEST_CASE("severa_mul: unit, cancellation, inverse, associativity") {
  const auto chart = make_chart("one_holed_torus", LieGroupModel::su2());
  Rng rng(201);
  const auto p = random_point(chart, rng);

  const SeveraPair a = word_pair(chart, p, parse_word("a"));
  const SeveraPair unit = SeveraPair::unit(chart);

  // (Phi, omega) * (e, 0) = (Phi, omega)
  const SeveraPair right = severa_mul(a, unit);
  CHECK((right.value.m - a.value.m).norm() < 1e-15);
  CHECK((right.diff - a.diff).norm() < 1e-15);
  CHECK((right.two_form - a.two_form).norm() < 1e-15);

  // (g,0) * (g^{-1},0) = (e,0)
  const SeveraPair cancel = severa_mul(a, severa_inverse(a));
  CHECK((cancel.value.m - chart.group->identity_matrix()).norm() < 1e-13);
  CHECK(cancel.diff.norm() < 1e-13);
  CHECK(cancel.two_form.norm() < 1e-13);

  // associativity on random word jets
  const SeveraPair b = word_pair(chart, p, parse_word("b"));
  const SeveraPair c = word_pair(chart, p, parse_word("a b^-1 a"));
  const SeveraPair left_assoc = severa_mul(severa_mul(a, b), c);
  const SeveraPair right_assoc = severa_mul(a, severa_mul(b, c));
  CHECK((left_assoc.two_form - right_assoc.two_form).norm() < 1e-12);
  CHECK((left_assoc.value.m - right_assoc.value.m).norm() < 1e-13);
  CHECK((left_assoc.diff - right_assoc.diff).norm() < 1e-13);

  // antisymmetry is preserved exactly by construction
  CHECK((left_assoc.two_form + left_assoc.two_form.transpose()).norm() <
        1e-13);
}

TEST_CASE("word_pair composes like the word map") {
  const auto chart = make_chart("one_holed_torus", LieGroupModel::su2());
  Rng rng(202);
  const auto p = random_point(chart, rng);
  const Word w = parse_word("a b a^-1 b^-1");
  const SeveraPair pw = word_pair(chart, p, w);
  const auto jet = word_jet(chart, p, w);
  CHECK((pw.value.m - jet.value.m).norm() < 1e-13);
  CHECK((pw.diff - jet.diff).norm() < 1e-12);
}

TEST_CASE("omega_at: 2-gon vanishes") {
  for (const auto* g :
       {&LieGroupModel::su2(), &LieGroupModel::sl2r(), &LieGroupModel::torus2()}) {
    const auto chart = make_chart("ngon2", *g);
    Rng rng(203);
    const auto p = random_point(chart, rng);
    CHECK(omega_at(chart, p).norm() < 1e-14);
  }
}

TEST_CASE("omega_at: triangle matches the explicit two-term formula") {
  const auto chart = make_chart("ngon3", LieGroupModel::su2());
  const int d = chart.group->dim();
  const int n = chart.tangent_dim();
  Rng rng(204);
  const auto p = random_point(chart, rng);

  const auto ja = word_jet(chart, p, parse_word("a"));
  const auto jb = word_jet(chart, p, parse_word("b"));
  const Eigen::MatrixXd cross = 0.5 * ja.diff.transpose() *
                                chart.group->gram() *
                                chart.group->adjoint_matrix(jb.value.m) *
                                jb.diff;
  const Eigen::MatrixXd expected = cross.transpose() - cross;
  CHECK((omega_at(chart, p) - expected).norm() < 1e-13);
  CHECK(n == 2 * d);
}

TEST_CASE("omega_at agrees with the full-letter fold (cyclic invariance)") {
  for (const auto& name : {"ngon4", "one_holed_torus", "cylinder", "genus2"}) {
    const auto chart = make_chart(name, LieGroupModel::su2());
    Rng rng(205);
    const auto p = random_point(chart, rng);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(chart.tangent_dim(),
                                                 chart.tangent_dim());
    for (const Word& poly : chart.pattern.polygons) {
      const SeveraPair fold = word_pair(chart, p, poly);
      CHECK((fold.value.m - chart.group->identity_matrix()).norm() < 1e-10);
      CHECK(fold.diff.norm() < 1e-10);
      full += fold.two_form;
    }
    CHECK((omega_at(chart, p) - full).norm() < 1e-12);
  }
}

TEST_CASE("abelian omega is constant and nondegenerate on the torus chart") {
  const auto chart = make_chart("one_holed_torus", LieGroupModel::torus2());
  Rng rng(206);
  const auto p = random_point(chart, rng);
  const auto q = random_point(chart, rng);
  CHECK((omega_at(chart, p) - omega_at(chart, q)).norm() < 1e-14);
  CHECK(linalg::smallest_singular_value(omega_at(chart, p)) > 0.5);
}

TEST_CASE("verify_d_omega: abelian exact, nonabelian to FD tolerance") {
  Rng rng(207);
  const auto abelian = make_chart("one_holed_torus", LieGroupModel::torus2());
  const auto pa = random_point(abelian, rng);
  CHECK(verify_d_omega(abelian, pa, random_tangent(abelian, rng),
                       random_tangent(abelian, rng),
                       random_tangent(abelian, rng)) < 1e-12);

  for (const auto* g : {&LieGroupModel::su2(), &LieGroupModel::sl2r()}) {
    for (const auto& name : {"ngon4", "one_holed_torus"}) {
      const auto chart = make_chart(name, *g);
      double worst = 0.0;
      for (int s = 0; s < 10; ++s) {
        const auto p = random_point(chart, rng);
        worst = std::max(
            worst, verify_d_omega(chart, p, random_tangent(chart, rng),
                                  random_tangent(chart, rng),
                                  random_tangent(chart, rng)));
      }
      CHECK(worst < 1e-5);
    }
  }
}

TEST_CASE("verify_moment: zero field, vertex-supported fields, random") {
  Rng rng(208);
  for (const auto* g : {&LieGroupModel::su2(), &LieGroupModel::sl2r()}) {
    for (const auto& name : {"ngon4", "one_holed_torus", "cylinder"}) {
      const auto chart = make_chart(name, *g);
      const auto p = random_point(chart, rng);
      const Tangent v = random_tangent(chart, rng);

      CHECK(verify_moment(chart, p,
                          Eigen::VectorXd::Zero(chart.vertex_dim()), v) == 0.0);

      double worst = 0.0;
      for (int s = 0; s < 20; ++s) {
        Eigen::VectorXd xi(chart.vertex_dim());
        for (int i = 0; i < xi.size(); ++i) xi(i) = rng.uniform();
        worst = std::max(worst,
                         verify_moment(chart, p, xi, random_tangent(chart, rng)));
      }
      CHECK(worst < 1e-12);
    }
  }

  // single-vertex support on the square (the second-vertex contraction)
  const auto chart = make_chart("ngon4", LieGroupModel::su2());
  const auto p = random_point(chart, rng);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(chart.vertex_dim());
  for (int i = 0; i < chart.group->dim(); ++i)
    xi(chart.group->dim() + i) = rng.uniform();
  CHECK(verify_moment(chart, p, xi, random_tangent(chart, rng)) < 1e-12);
}

TEST_CASE("kernel_report: torus charts") {
  Rng rng(209);

  // all-identity point: rank 0, stabilizer is the whole algebra
  for (const auto& name : {"one_holed_torus", "genus2"}) {
    const auto chart = make_chart(name, LieGroupModel::su2());
    const auto rep = kernel_report(chart, identity_point(chart));
    CHECK(rep.rank_d_phi == 0);
    CHECK(rep.stabilizer_dim == chart.group->dim());
    CHECK(rep.rank_identity_holds);
    CHECK(rep.min_degeneracy_sigma > 1e-9);
    CHECK(rep.kernel_identity_checked);
    CHECK(rep.kernel_identity_gap < 1e-7);
  }

  // generic SU(2) point on the one-holed torus: trivial stabilizer
  const auto chart = make_chart("one_holed_torus", LieGroupModel::su2());
  const auto p = random_point(chart, rng);
  const auto rep = kernel_report(chart, p);
  CHECK(rep.stabilizer_dim == 0);
  CHECK(rep.rank_d_phi == 3);
  CHECK(rep.rank_identity_holds);
  CHECK(rep.kernel_identity_gap < 1e-7);
  CHECK(rep.min_degeneracy_sigma > 1e-9);

  // abelian: Phi is constant, kernel identity forces the zero space
  const auto ab = make_chart("one_holed_torus", LieGroupModel::torus2());
  const auto pa = random_point(ab, rng);
  const auto rep_ab = kernel_report(ab, pa);
  CHECK(rep_ab.rank_d_phi == 0);
  CHECK(rep_ab.stabilizer_dim == ab.vertex_dim());
  CHECK(rep_ab.rank_identity_holds);
  CHECK(rep_ab.kernel_basis.cols() == 0);
  CHECK(rep_ab.kernel_identity_gap < 1e-7);
}

TEST_CASE("compare_patterns: identity map gives zero deviation") {
  const auto chart = make_chart("one_holed_torus", LieGroupModel::su2());
  Rng rng(210);
  CHECK(compare_patterns(chart, chart, {}, 3, rng) < 1e-14);
}

TEST_CASE("compare_patterns: diagonal cut leaves omega unchanged") {
  Rng rng(211);
  for (const auto& name : {"one_holed_torus", "ngon4", "genus2"}) {
    const auto pattern = stock::pattern(name);
    const auto chart = build_chart(pattern, LieGroupModel::su2());
    auto [cut_pattern, corr] = cut_diagonal(pattern, 0, 0, 2, "zz");
    const auto cut_chart = build_chart(
        cut_pattern, LieGroupModel::su2(),
        diagonal_cut_hints(cut_pattern, "zz", chart.dependents[0].letter));
    // original generators are letters of the cut pattern as well
    CHECK(compare_patterns(chart, cut_chart, {}, 5, rng) < 1e-10);
  }
}

TEST_CASE("compare_patterns: interior vertex insertion pulls back omega") {
  Rng rng(212);
  const auto pattern = stock::pattern("one_holed_torus");
  const auto chart = build_chart(pattern, LieGroupModel::su2());
  auto [big_pattern, corr] = add_interior_vertex_cut(pattern, 0, 2, "g");
  const auto big_chart = build_chart(big_pattern, LieGroupModel::su2());
  CHECK(big_chart.num_generators() == chart.num_generators() + 1);
  CHECK(compare_patterns(chart, big_chart, {}, 5, rng) < 1e-10);
}

TEST_CASE("omega is invariant under the listed Dehn twists") {
  Rng rng(213);
  const auto torus = make_chart("one_holed_torus", LieGroupModel::su2());
  const GeneratorCorrespondence s_move{{"b", parse_word("b a")}};
  const GeneratorCorrespondence t_move{{"a", parse_word("a b^-1")}};
  CHECK(compare_patterns(torus, torus, s_move, 5, rng) < 1e-10);
  CHECK(compare_patterns(torus, torus, t_move, 5, rng) < 1e-10);

  const auto cyl = make_chart("cylinder", LieGroupModel::su2());
  const GeneratorCorrespondence twist{{"c", parse_word("c a")}};
  CHECK(compare_patterns(cyl, cyl, twist, 5, rng) < 1e-10);
}

TEST_CASE("reduction kernel check on the capped genus-2 surface") {
  const auto chart = make_chart("genus2", LieGroupModel::su2());
  Rng rng(214);

  // solve prod of commutators = e by repeating the first handle reversed
  ModuliPoint p = identity_point(chart);
  const GroupElement r1 = random_element(*chart.group, rng);
  const GroupElement r2 = random_element(*chart.group, rng);
  p.g[static_cast<size_t>(chart.gen_index.at("a1"))] = r1;
  p.g[static_cast<size_t>(chart.gen_index.at("b1"))] = r2;
  p.g[static_cast<size_t>(chart.gen_index.at("a2"))] = r2;
  p.g[static_cast<size_t>(chart.gen_index.at("b2"))] = r1;

  const auto check = reduction_kernel_check(chart, p, "c");
  CHECK(check.regular);
  CHECK(check.relation_defect < 1e-12);
  CHECK(check.kernel_gap < 1e-6);

  // the all-identity point is rejected as non-regular
  const auto at_e = reduction_kernel_check(chart, identity_point(chart), "c");
  CHECK_FALSE(at_e.regular);

  // off-level points throw
  CHECK_THROWS_AS(
      reduction_kernel_check(chart, random_point(chart, rng), "c"),
      FormsError);
}

TEST_CASE("abelian reduction: omega nondegenerate, orbit directions vanish") {
  const auto chart = make_chart("genus2", LieGroupModel::torus2());
  Rng rng(215);
  const auto p = random_point(chart, rng);
  // Phi is constant e: the whole space is the level set, the orbit span is
  // zero, and the kernel of omega matches it
  const auto jet = word_jet(chart, p, chart.boundary[0].word);
  CHECK((jet.value.m - chart.group->identity_matrix()).norm() < 1e-13);
  CHECK(linalg::nullspace(omega_at(chart, p)).cols() == 0);
  CHECK(generating_matrix(chart, p).norm() < 1e-14);
}

TEST_CASE("homomorphism map: constants, single letters, additivity") {
  Rng rng(216);
  const auto chart = make_chart("one_holed_torus", LieGroupModel::su2());
  const auto p = random_point(chart, rng);
  const Tangent x1 = random_tangent(chart, rng);
  const Tangent x2 = random_tangent(chart, rng);
  const Tangent x3 = random_tangent(chart, rng);

  PairFamily unit_family = [](const ModuliChart& c, const ModuliPoint&) {
    return SeveraPair::unit(c);
  };
  CHECK(std::abs(homomorphism_defect(chart, p, unit_family, x1, x2, x3)) <
        1e-12);

  // single generator: d(0) = 0, so the value is minus the eta pullback
  PairFamily a_family = word_family(parse_word("a"));
  const auto ja = word_jet(chart, p, parse_word("a"));
  const double expected =
      -chart.group->eta(ja.diff * x1, ja.diff * x2, ja.diff * x3);
  CHECK(homomorphism_defect(chart, p, a_family, x1, x2, x3) ==
        doctest::Approx(expected).epsilon(1e-9));

  // group homomorphism: value(p*q) = value(p) + value(q)
  PairFamily b_family = word_family(parse_word("b a^-1"));
  PairFamily ab_family = [&](const ModuliChart& c, const ModuliPoint& pt) {
    return severa_mul(word_pair(c, pt, parse_word("a")),
                      word_pair(c, pt, parse_word("b a^-1")));
  };
  const double va = homomorphism_defect(chart, p, a_family, x1, x2, x3);
  const double vb = homomorphism_defect(chart, p, b_family, x1, x2, x3);
  const double vab = homomorphism_defect(chart, p, ab_family, x1, x2, x3);
  CHECK(std::abs(vab - va - vb) < 1e-4);

  // abelian model: everything vanishes
  const auto ab = make_chart("one_holed_torus", LieGroupModel::torus2());
  const auto pa = random_point(ab, rng);
  PairFamily ab_word = word_family(parse_word("a b"));
  CHECK(std::abs(homomorphism_defect(ab, pa, ab_word,
                                     random_tangent(ab, rng),
                                     random_tangent(ab, rng),
                                     random_tangent(ab, rng))) < 1e-10);
}
