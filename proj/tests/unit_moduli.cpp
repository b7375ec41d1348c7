#include "doctest.h"

#include "modsurf/moduli.hpp"
#include "modsurf/stock.hpp"

using namespace modsurf;

namespace {

ModuliChart su2_chart(const std::string& name) {
  return build_chart(stock::pattern(name), LieGroupModel::su2());
}

// central finite difference of a word holonomy along t -> point exp(t v)
Rvec word_diff_fd(const ModuliChart& chart, const ModuliPoint& point,
                  const Word& word, const Tangent& v, double h = 1e-6) {
  const GroupElement gp = holonomy(chart, move_point(chart, point, v, h), word);
  const GroupElement gm = holonomy(chart, move_point(chart, point, v, -h), word);
  const GroupElement g0 = holonomy(chart, point, word);
  // left-trivialized derivative via log(g0^{-1} g(t)) ~ g0^{-1} dg
  const Cmat d = (g0.m.inverse() * (gp.m - gm.m)) / (2.0 * h);
  return chart.group->coords_of(d, 1e-4);
}

}  // namespace

TEST_CASE("build_chart: n-gon eliminates the last edge") {
  for (int n = 2; n <= 5; ++n) {
    const auto chart = su2_chart("ngon" + std::to_string(n));
    CHECK(chart.num_generators() == n - 1);
    REQUIRE(chart.dependents.size() == 1);
    // last letter of the word is dependent, with the inverse-product word
    const std::string last = chart.pattern.polygons[0].back().id;
    CHECK(chart.dependents[0].letter == last);
    Word expect;
    for (int k = n - 2; k >= 0; --k)
      expect.push_back(chart.pattern.polygons[0][static_cast<size_t>(k)].inverse());
    CHECK(chart.dependents[0].expanded == expect);
  }
}

TEST_CASE("build_chart: one-holed torus boundary word is a commutator") {
  const auto chart = su2_chart("one_holed_torus");
  CHECK(chart.num_generators() == 2);
  REQUIRE(chart.boundary.size() == 1);
  // relation a b a^-1 b^-1 c = e gives c = b a b^-1 a^-1
  CHECK(word_str(chart.boundary[0].word) == "b a b^-1 a^-1");
}

TEST_CASE("build_chart: cylinder words") {
  const auto chart = su2_chart("cylinder");
  CHECK(chart.num_generators() == 2);
  REQUIRE(chart.boundary.size() == 2);
  // boundary edges: a itself and ap = c a^-1 c^-1
  std::map<std::string, std::string> words;
  for (const auto& b : chart.boundary) words[b.letter] = word_str(b.word);
  CHECK(words.at("a") == "a");
  CHECK(words.at("ap") == "c a^-1 c^-1");
}

TEST_CASE("build_chart: |S| = #V - chi on the chartable corpus") {
  for (const auto& name : stock::chartable_names()) {
    const auto chart = su2_chart(name);
    CHECK(chart.num_generators() ==
          chart.info.num_vertices - chart.info.euler_characteristic);
  }
}

TEST_CASE("build_chart: elimination hints override the default") {
  const auto chart = build_chart(stock::pattern("ngon4"),
                                 LieGroupModel::su2(), {{0, std::string("b")}});
  REQUIRE(chart.dependents.size() == 1);
  CHECK(chart.dependents[0].letter == "b");
  CHECK(word_str(chart.dependents[0].expanded) == "a^-1 d^-1 c^-1");
  // a letter occurring twice in its polygon cannot be eliminated
  CHECK_THROWS_AS(build_chart(stock::pattern("one_holed_torus"),
                              LieGroupModel::su2(), {{0, std::string("b")}}),
                  ModuliError);
}

TEST_CASE("build_chart rejects closed patterns and bad hints") {
  CHECK_THROWS_AS(
      build_chart(stock::pattern("torus_square"), LieGroupModel::su2()),
      ModuliError);
  CHECK_THROWS_AS(build_chart(stock::pattern("one_holed_torus"),
                              LieGroupModel::su2(), {{0, std::string("a")}}),
                  ModuliError);
}

TEST_CASE("holonomy: empty word, cancellation, matrix product oracle") {
  const auto chart = su2_chart("one_holed_torus");
  Rng rng(101);
  const auto p = random_point(chart, rng);

  CHECK((holonomy(chart, p, {}).m - chart.group->identity_matrix()).norm() <
        1e-15);
  CHECK((holonomy(chart, p, parse_word("a a^-1")).m -
         chart.group->identity_matrix())
            .norm() < 1e-15);

  const Cmat a = p.g[static_cast<size_t>(chart.gen_index.at("a"))].m;
  const Cmat b = p.g[static_cast<size_t>(chart.gen_index.at("b"))].m;
  const Cmat oracle = a * b * a.inverse() * b.inverse();
  CHECK((holonomy(chart, p, parse_word("a b a^-1 b^-1")).m - oracle).norm() <
        1e-13);
  CHECK_THROWS_AS(holonomy(chart, p, parse_word("nope")), ModuliError);
}

TEST_CASE("word_jet: single letter, doubled letter at e, FD oracle") {
  const auto chart = su2_chart("one_holed_torus");
  const int d = chart.group->dim();
  Rng rng(102);
  const auto p = random_point(chart, rng);
  const Tangent v = random_tangent(chart, rng);

  const auto js = word_jet(chart, p, parse_word("a"));
  CHECK((js.diff * v - v.segment(chart.gen_index.at("a") * d, d)).norm() <
        1e-14);

  const auto pe = identity_point(chart);
  const auto j2 = word_jet(chart, pe, parse_word("a a"));
  CHECK((j2.diff * v - 2.0 * v.segment(chart.gen_index.at("a") * d, d))
            .norm() < 1e-14);

  for (const auto& w :
       {parse_word("a b a^-1 b^-1"), parse_word("b^-1 a b b a^-1"),
        parse_word("c"), parse_word("a c b^-1")}) {
    const auto jet = word_jet(chart, p, w);
    CHECK((jet.diff * v - word_diff_fd(chart, p, w, v)).norm() < 1e-6);
  }
}

TEST_CASE("boundary holonomy: n-gon relation and identity point") {
  const auto chart = su2_chart("ngon4");
  Rng rng(103);
  const auto p = random_point(chart, rng);
  const auto phis = boundary_holonomy(chart, p);
  // the product around the polygon in traversal-opposite order is the
  // relation; multiply in word order e_1 ... e_n instead
  std::map<std::string, Cmat> val;
  for (size_t i = 0; i < phis.size(); ++i)
    val[chart.boundary[i].letter] = phis[i].m;
  Cmat prod = chart.group->identity_matrix();
  for (const Lit& l : chart.pattern.polygons[0]) prod = prod * val.at(l.id);
  CHECK((prod - chart.group->identity_matrix()).norm() < 1e-12);

  const auto pe = identity_point(chart);
  for (const auto& phi : boundary_holonomy(chart, pe))
    CHECK((phi.m - chart.group->identity_matrix()).norm() < 1e-15);

  // one-holed torus at (a, b) gives the commutator
  const auto tchart = su2_chart("one_holed_torus");
  const auto tp = random_point(tchart, rng);
  const Cmat a = tp.g[static_cast<size_t>(tchart.gen_index.at("a"))].m;
  const Cmat b = tp.g[static_cast<size_t>(tchart.gen_index.at("b"))].m;
  const auto tphi = boundary_holonomy(tchart, tp);
  CHECK((tphi[0].m - b * a * b.inverse() * a.inverse()).norm() < 1e-13);
}

TEST_CASE("action: identity, n-gon formula, equivariance of Phi") {
  const auto chart = su2_chart("ngon4");
  Rng rng(104);
  const auto p = random_point(chart, rng);

  std::vector<GroupElement> id_h(static_cast<size_t>(chart.num_vertices()),
                                 chart.group->identity());
  const auto same = action_apply(chart, id_h, p);
  for (int i = 0; i < chart.num_generators(); ++i)
    CHECK((same.g[static_cast<size_t>(i)].m - p.g[static_cast<size_t>(i)].m)
              .norm() == 0.0);

  std::vector<GroupElement> h;
  for (int i = 0; i < chart.num_vertices(); ++i)
    h.push_back(random_element(*chart.group, rng));
  const auto moved = action_apply(chart, h, p);
  for (int i = 0; i < chart.num_generators(); ++i) {
    const Cmat expect =
        h[static_cast<size_t>(chart.gen_target[static_cast<size_t>(i)])].m *
        p.g[static_cast<size_t>(i)].m *
        h[static_cast<size_t>(chart.gen_source[static_cast<size_t>(i)])]
            .m.inverse();
    CHECK((moved.g[static_cast<size_t>(i)].m - expect).norm() < 1e-13);
  }

  // Phi(h.kappa) = h_t Phi(kappa) h_s^{-1}, componentwise
  const auto phi0 = boundary_holonomy(chart, p);
  const auto phi1 = boundary_holonomy(chart, moved);
  for (size_t e = 0; e < chart.boundary.size(); ++e) {
    const auto& bd = chart.boundary[e];
    const Cmat expect =
        h[static_cast<size_t>(bd.target_vertex)].m * phi0[e].m *
        h[static_cast<size_t>(bd.source_vertex)].m.inverse();
    CHECK((phi1[e].m - expect).norm() < 1e-12);
  }

  // action law (h h').kappa = h.(h'.kappa)
  std::vector<GroupElement> h2;
  for (int i = 0; i < chart.num_vertices(); ++i)
    h2.push_back(random_element(*chart.group, rng));
  std::vector<GroupElement> hh;
  for (int i = 0; i < chart.num_vertices(); ++i)
    hh.push_back(h[static_cast<size_t>(i)] * h2[static_cast<size_t>(i)]);
  const auto lhs = action_apply(chart, hh, p);
  const auto rhs = action_apply(chart, h, action_apply(chart, h2, p));
  for (int i = 0; i < chart.num_generators(); ++i)
    CHECK((lhs.g[static_cast<size_t>(i)].m - rhs.g[static_cast<size_t>(i)].m)
              .norm() < 1e-13);
}

TEST_CASE("generating_vector: zero, loop at identity, FD oracle") {
  const auto chart = su2_chart("one_holed_torus");
  const int d = chart.group->dim();
  Rng rng(105);
  const auto p = random_point(chart, rng);

  CHECK(generating_vector(chart, Eigen::VectorXd::Zero(chart.vertex_dim()), p)
            .norm() == 0.0);

  // loop generator at the identity point: Ad_e xi - xi = 0
  const auto pe = identity_point(chart);
  Eigen::VectorXd xi(chart.vertex_dim());
  for (int i = 0; i < xi.size(); ++i) xi(i) = rng.uniform();
  CHECK(generating_vector(chart, xi, pe).norm() < 1e-14);

  // matches d/dt action of exp(t xi)
  const double h = 1e-6;
  std::vector<GroupElement> hp, hm;
  for (int vtx = 0; vtx < chart.num_vertices(); ++vtx) {
    const Rvec seg = xi.segment(vtx * d, d);
    hp.push_back(chart.group->exponential(h * seg));
    hm.push_back(chart.group->exponential(-h * seg));
  }
  const auto pp = action_apply(chart, hp, p);
  const auto pm = action_apply(chart, hm, p);
  const Tangent v = generating_vector(chart, xi, p);
  for (int i = 0; i < chart.num_generators(); ++i) {
    const Cmat diff =
        (p.g[static_cast<size_t>(i)].m.inverse() *
         (pp.g[static_cast<size_t>(i)].m - pm.g[static_cast<size_t>(i)].m)) /
        (2.0 * h);
    CHECK((chart.group->coords_of(diff, 1e-4) - v.segment(i * d, d)).norm() <
          1e-6);
  }

  // generating_matrix columns agree with generating_vector on basis vectors
  const Eigen::MatrixXd L = generating_matrix(chart, p);
  CHECK((L * xi - v).norm() < 1e-13);
}

TEST_CASE("stabilizer: torus at identity, generic point, cylinder at a=e") {
  const auto chart = su2_chart("one_holed_torus");
  const auto pe = identity_point(chart);
  CHECK(stabilizer_basis(chart, pe).cols() == chart.group->dim());

  Rng rng(106);
  const auto p = random_point(chart, rng);
  const auto stab = stabilizer_basis(chart, p);
  CHECK(stab.cols() == 0);  // generic pair has trivial centralizer

  const auto cyl = su2_chart("cylinder");
  ModuliPoint cp = identity_point(cyl);
  cp.g[static_cast<size_t>(cyl.gen_index.at("c"))] =
      random_element(*cyl.group, rng);
  const auto cstab = stabilizer_basis(cyl, cp);
  CHECK(cstab.cols() == cyl.group->dim());
  // the stabilizer solves xi_2 = Ad_c xi_1
  const int d = cyl.group->dim();
  const Eigen::MatrixXd ad =
      cyl.group->adjoint_matrix(cp.g[static_cast<size_t>(cyl.gen_index.at("c"))].m);
  const auto [sv1, tv1] = cyl.info.letter_endpoints.at("a");
  const auto [sv2, tv2] = cyl.info.letter_endpoints.at("ap");
  for (int k = 0; k < cstab.cols(); ++k) {
    const Rvec x1 = cstab.col(k).segment(sv1 * d, d);
    const Rvec x2 = cstab.col(k).segment(sv2 * d, d);
    CHECK((ad * x1 - x2).norm() < 1e-10);
  }
}

TEST_CASE("mcg_substitute: identity, S-move, cylinder twist") {
  const auto chart = su2_chart("one_holed_torus");
  Rng rng(107);

  const auto same = mcg_substitute(chart, {}, {}, rng);
  CHECK(same.boundary[0].word == chart.boundary[0].word);

  // S: (a,b) -> (a, ba) with inverse (a,b) -> (a, b a^-1)
  std::map<std::string, Word> s_move{{"b", parse_word("b a")}};
  std::map<std::string, Word> s_inv{{"b", parse_word("b a^-1")}};
  const auto twisted = mcg_substitute(chart, s_move, s_inv, rng);
  CHECK(word_str(word_reduce(twisted.boundary[0].word)) ==
        word_str(chart.boundary[0].word));

  // T: (a,b) -> (a b^-1, b)
  std::map<std::string, Word> t_move{{"a", parse_word("a b^-1")}};
  std::map<std::string, Word> t_inv{{"a", parse_word("a b")}};
  const auto t_twisted = mcg_substitute(chart, t_move, t_inv, rng);
  CHECK(word_str(word_reduce(t_twisted.boundary[0].word)) ==
        word_str(chart.boundary[0].word));

  // cylinder Dehn twist (a,c) -> (a, ca) preserves both boundary words
  const auto cyl = su2_chart("cylinder");
  std::map<std::string, Word> d_move{{"c", parse_word("c a")}};
  std::map<std::string, Word> d_inv{{"c", parse_word("c a^-1")}};
  const auto d_twisted = mcg_substitute(cyl, d_move, d_inv, rng);
  for (size_t e = 0; e < cyl.boundary.size(); ++e)
    CHECK(word_str(word_reduce(d_twisted.boundary[e].word)) ==
          word_str(cyl.boundary[e].word));

  // a broken inverse fails the round-trip validation
  std::map<std::string, Word> bad_inv{{"b", parse_word("b")}};
  CHECK_THROWS_AS(mcg_substitute(chart, s_move, bad_inv, rng), ModuliError);
}

TEST_CASE("embedding under diagonal cuts: transported holonomies agree") {
  Rng rng(108);
  for (const auto& name : {"one_holed_torus", "genus2", "ngon5"}) {
    const auto pattern = stock::pattern(name);
    const auto chart = build_chart(pattern, LieGroupModel::su2());
    auto [cut_pattern, corr] = cut_diagonal(pattern, 0, 1, 3, "zz");
    const auto hints =
        diagonal_cut_hints(cut_pattern, "zz", chart.dependents[0].letter);
    const auto cut_chart =
        build_chart(cut_pattern, LieGroupModel::su2(), hints);

    const auto p = random_point(chart, rng);
    const auto q = transport_point(chart, p, cut_chart, corr);

    // every original letter evaluates identically in both charts
    for (const auto& [letter, word] : chart.letter_words) {
      const Cmat lhs = holonomy(chart, p, Word{Lit(letter, 1)}).m;
      const Cmat rhs = holonomy(cut_chart, q, Word{Lit(letter, 1)}).m;
      CHECK((lhs - rhs).norm() < 1e-12);
    }
    // and so does the new diagonal letter against its defining word
    const Cmat lhs = holonomy(chart, p, corr.at("zz")).m;
    const Cmat rhs = holonomy(cut_chart, q, Word{Lit("zz", 1)}).m;
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}
