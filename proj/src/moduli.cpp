#include "modsurf/moduli.hpp"

#include <algorithm>
#include <set>

#include "modsurf/linalg.hpp"

namespace modsurf {

namespace {

// solving word for the letter at position k of the polygon relation
// w_0 ... w_{n-1} = e
Word solve_for(const Word& poly, int k) {
  const int n = static_cast<int>(poly.size());
  Word prefix(poly.begin(), poly.begin() + k);
  Word suffix(poly.begin() + k + 1, poly.end());
  Word rhs = word_concat(word_inverse(prefix), word_inverse(suffix));
  if (poly[static_cast<size_t>(k)].exp == -1) rhs = word_inverse(rhs);
  return word_reduce(rhs);
}

}  // namespace

ModuliChart build_chart(const GluingPattern& pattern,
                        const LieGroupModel& group,
                        const std::map<int, std::string>& elimination_hint) {
  ModuliChart chart;
  chart.pattern = pattern;
  chart.info = analyze(pattern);
  chart.group = &group;
  if (!chart.info.a1)
    throw ModuliError("pattern has a closed component; no chart exists");

  const auto occ = pattern.occurrences();

  // pick one eliminated letter per polygon: the hint if given, otherwise the
  // last letter occurring exactly once in that polygon and not yet dependent
  std::set<std::string> dependent_ids;
  std::vector<std::pair<std::string, int>> picks;  // letter, polygon
  for (int p = 0; p < static_cast<int>(pattern.polygons.size()); ++p) {
    const Word& poly = pattern.polygons[static_cast<size_t>(p)];
    auto count_in_poly = [&](const std::string& id) {
      int c = 0;
      for (const Lit& l : poly)
        if (l.id == id) ++c;
      return c;
    };
    std::string pick;
    auto hint = elimination_hint.find(p);
    if (hint != elimination_hint.end()) {
      pick = hint->second;
      if (count_in_poly(pick) != 1)
        throw ModuliError("elimination hint letter must occur exactly once "
                          "in its polygon: " + pick);
      if (dependent_ids.count(pick))
        throw ModuliError("elimination hint repeats a dependent letter: " +
                          pick);
    } else {
      for (int k = static_cast<int>(poly.size()) - 1; k >= 0; --k) {
        const std::string& id = poly[static_cast<size_t>(k)].id;
        if (count_in_poly(id) == 1 && !dependent_ids.count(id)) {
          pick = id;
          break;
        }
      }
      if (pick.empty())
        throw ModuliError("no eligible dependent letter in polygon " +
                          std::to_string(p));
    }
    dependent_ids.insert(pick);
    picks.emplace_back(pick, p);
  }

  // generators: all remaining letter classes, in first-occurrence order
  for (const Word& poly : pattern.polygons)
    for (const Lit& l : poly)
      if (!dependent_ids.count(l.id) && !chart.gen_index.count(l.id)) {
        chart.gen_index[l.id] = static_cast<int>(chart.generators.size());
        chart.generators.push_back(l.id);
      }

  if (static_cast<int>(chart.generators.size()) !=
      chart.info.graph_edge_count())
    throw ModuliError("generator count does not match #V - chi");

  // order the dependents so each solving word references only generators and
  // earlier dependents, and expand
  std::vector<std::pair<std::string, int>> remaining = picks;
  std::set<std::string> resolved;
  while (!remaining.empty()) {
    bool progressed = false;
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      const auto& [letter, poly_idx] = *it;
      const Word& poly = pattern.polygons[static_cast<size_t>(poly_idx)];
      int pos = -1;
      for (int k = 0; k < static_cast<int>(poly.size()); ++k)
        if (poly[static_cast<size_t>(k)].id == letter) pos = k;
      const Word solving = solve_for(poly, pos);
      bool ok = true;
      for (const Lit& l : solving)
        if (dependent_ids.count(l.id) && !resolved.count(l.id)) ok = false;
      if (!ok) continue;

      ModuliChart::Dependent dep;
      dep.letter = letter;
      dep.polygon = poly_idx;
      dep.solving = solving;
      Word expanded;
      for (const Lit& l : solving) {
        if (!dependent_ids.count(l.id)) {
          expanded.push_back(l);
          continue;
        }
        for (const auto& d : chart.dependents)
          if (d.letter == l.id) {
            const Word sub =
                l.exp == 1 ? d.expanded : word_inverse(d.expanded);
            expanded = word_concat(expanded, sub);
          }
      }
      dep.expanded = word_reduce(expanded);
      chart.dependents.push_back(dep);
      resolved.insert(letter);
      remaining.erase(it);
      progressed = true;
      break;
    }
    if (!progressed)
      throw ModuliError(
          "no acyclic dependent-letter order exists for the chosen "
          "elimination; supply hints");
  }

  for (const auto& s : chart.generators)
    chart.letter_words[s] = Word{Lit(s, 1)};
  for (const auto& d : chart.dependents) chart.letter_words[d.letter] = d.expanded;

  for (const BoundaryEdge& e : chart.info.boundary_edges) {
    ModuliChart::Boundary b;
    b.letter = e.letter;
    b.word = chart.letter_words.at(e.letter);
    b.source_vertex = e.source_vertex;
    b.target_vertex = e.target_vertex;
    b.component = e.component;
    chart.boundary.push_back(b);
  }

  chart.gen_source.resize(chart.generators.size());
  chart.gen_target.resize(chart.generators.size());
  for (int i = 0; i < chart.num_generators(); ++i) {
    const auto [src, dst] =
        chart.info.letter_endpoints.at(chart.generators[static_cast<size_t>(i)]);
    chart.gen_source[static_cast<size_t>(i)] = src;
    chart.gen_target[static_cast<size_t>(i)] = dst;
  }
  return chart;
}

ModuliPoint identity_point(const ModuliChart& chart) {
  ModuliPoint p;
  for (int i = 0; i < chart.num_generators(); ++i)
    p.g.push_back(chart.group->identity());
  return p;
}

ModuliPoint random_point(const ModuliChart& chart, Rng& rng) {
  ModuliPoint p;
  for (int i = 0; i < chart.num_generators(); ++i)
    p.g.push_back(random_element(*chart.group, rng));
  return p;
}

Tangent random_tangent(const ModuliChart& chart, Rng& rng) {
  Tangent v(chart.tangent_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = rng.uniform();
  return v;
}

ModuliPoint move_point(const ModuliChart& chart, const ModuliPoint& point,
                       const Tangent& v, double t) {
  const int d = chart.group->dim();
  ModuliPoint out;
  for (int i = 0; i < chart.num_generators(); ++i) {
    const Rvec step = t * v.segment(i * d, d);
    out.g.emplace_back(chart.group,
                       chart.group->retract(point.g[static_cast<size_t>(i)].m *
                                            chart.group->exp_matrix(step)));
  }
  return out;
}

GroupElement holonomy(const ModuliChart& chart, const ModuliPoint& point,
                      const Word& word) {
  Cmat acc = chart.group->identity_matrix();
  for (const Lit& l : expand_word(chart, word)) {
    const auto it = chart.gen_index.find(l.id);
    const Cmat& g = point.g[static_cast<size_t>(it->second)].m;
    acc = l.exp == 1 ? Cmat(acc * g) : Cmat(acc * g.inverse());
  }
  return GroupElement(chart.group, acc);
}

Word expand_word(const ModuliChart& chart, const Word& word) {
  Word out;
  for (const Lit& l : word) {
    const auto it = chart.letter_words.find(l.id);
    if (it == chart.letter_words.end())
      throw ModuliError("unknown letter: " + l.id);
    const Word& w = it->second;
    out = word_concat(out, l.exp == 1 ? w : word_inverse(w));
  }
  return word_reduce(out);
}

WordJet word_jet(const ModuliChart& chart, const ModuliPoint& point,
                 const Word& word) {
  const int d = chart.group->dim();
  const int n = chart.tangent_dim();
  Cmat val = chart.group->identity_matrix();
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(d, n);
  // delta(uv) = Ad_{v^{-1}} delta u + delta v
  for (const Lit& l : expand_word(chart, word)) {
    const int idx = chart.gen_index.at(l.id);
    const Cmat& g = point.g[static_cast<size_t>(idx)].m;
    Cmat factor;
    Eigen::MatrixXd fdiff = Eigen::MatrixXd::Zero(d, n);
    if (l.exp == 1) {
      factor = g;
      fdiff.block(0, idx * d, d, d) = Eigen::MatrixXd::Identity(d, d);
    } else {
      factor = g.inverse();
      fdiff.block(0, idx * d, d, d) = -chart.group->adjoint_matrix(g);
    }
    diff = chart.group->adjoint_matrix(factor.inverse()) * diff + fdiff;
    val = val * factor;
  }
  return WordJet{GroupElement(chart.group, val), diff};
}

std::vector<GroupElement> boundary_holonomy(const ModuliChart& chart,
                                            const ModuliPoint& point) {
  std::vector<GroupElement> out;
  for (const auto& b : chart.boundary)
    out.push_back(holonomy(chart, point, b.word));
  return out;
}

Eigen::MatrixXd boundary_differential(const ModuliChart& chart,
                                      const ModuliPoint& point) {
  const int d = chart.group->dim();
  Eigen::MatrixXd out(chart.boundary_dim(), chart.tangent_dim());
  for (int e = 0; e < static_cast<int>(chart.boundary.size()); ++e)
    out.middleRows(e * d, d) =
        word_jet(chart, point, chart.boundary[static_cast<size_t>(e)].word).diff;
  return out;
}

ModuliPoint action_apply(const ModuliChart& chart,
                         const std::vector<GroupElement>& h,
                         const ModuliPoint& point) {
  if (static_cast<int>(h.size()) != chart.num_vertices())
    throw ModuliError("action needs one group element per vertex");
  ModuliPoint out;
  for (int i = 0; i < chart.num_generators(); ++i) {
    const auto& ht = h[static_cast<size_t>(chart.gen_target[static_cast<size_t>(i)])];
    const auto& hs = h[static_cast<size_t>(chart.gen_source[static_cast<size_t>(i)])];
    out.g.emplace_back(chart.group,
                       ht.m * point.g[static_cast<size_t>(i)].m *
                           hs.m.inverse());
  }
  return out;
}

Tangent generating_vector(const ModuliChart& chart, const Eigen::VectorXd& xi,
                          const ModuliPoint& point) {
  const int d = chart.group->dim();
  if (xi.size() != chart.vertex_dim())
    throw ModuliError("vertex algebra vector has wrong dimension");
  Tangent v(chart.tangent_dim());
  for (int i = 0; i < chart.num_generators(); ++i) {
    const Rvec xt = xi.segment(chart.gen_target[static_cast<size_t>(i)] * d, d);
    const Rvec xs = xi.segment(chart.gen_source[static_cast<size_t>(i)] * d, d);
    v.segment(i * d, d) =
        chart.group->adjoint_matrix(point.g[static_cast<size_t>(i)].m.inverse()) *
            xt -
        xs;
  }
  return v;
}

Eigen::MatrixXd generating_matrix(const ModuliChart& chart,
                                  const ModuliPoint& point) {
  const int d = chart.group->dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(chart.tangent_dim(),
                                            chart.vertex_dim());
  for (int i = 0; i < chart.num_generators(); ++i) {
    const Eigen::MatrixXd ad_inv =
        chart.group->adjoint_matrix(point.g[static_cast<size_t>(i)].m.inverse());
    m.block(i * d, chart.gen_target[static_cast<size_t>(i)] * d, d, d) += ad_inv;
    m.block(i * d, chart.gen_source[static_cast<size_t>(i)] * d, d, d) -=
        Eigen::MatrixXd::Identity(d, d);
  }
  return m;
}

Eigen::MatrixXd stabilizer_basis(const ModuliChart& chart,
                                 const ModuliPoint& point, double rel_tol) {
  return linalg::nullspace(generating_matrix(chart, point), rel_tol);
}

ModuliPoint substitute_point(const ModuliChart& chart,
                             const std::map<std::string, Word>& subst,
                             const ModuliPoint& point) {
  ModuliPoint out;
  for (const auto& s : chart.generators) {
    auto it = subst.find(s);
    const Word w = it == subst.end() ? Word{Lit(s, 1)} : it->second;
    out.g.push_back(holonomy(chart, point, w));
  }
  return out;
}

std::map<int, std::string> diagonal_cut_hints(
    const GluingPattern& cut_pattern, const std::string& new_letter,
    const std::string& original_dependent) {
  std::map<int, std::string> hints;
  for (int p = 0; p < static_cast<int>(cut_pattern.polygons.size()); ++p) {
    bool has_dep = false, has_new = false;
    for (const Lit& l : cut_pattern.polygons[static_cast<size_t>(p)]) {
      if (l.id == original_dependent) has_dep = true;
      if (l.id == new_letter) has_new = true;
    }
    if (!has_new) continue;  // untouched polygon, default stands
    hints[p] = has_dep ? original_dependent : new_letter;
  }
  return hints;
}

ModuliPoint transport_point(const ModuliChart& from, const ModuliPoint& point,
                            const ModuliChart& to,
                            const GeneratorCorrespondence& corr) {
  ModuliPoint out;
  for (const auto& g : to.generators) {
    auto it = corr.find(g);
    const Word w = it == corr.end() ? Word{Lit(g, 1)} : it->second;
    out.g.push_back(holonomy(from, point, w));
  }
  return out;
}

ModuliChart mcg_substitute(const ModuliChart& chart,
                           const std::map<std::string, Word>& subst,
                           const std::map<std::string, Word>& inverse_subst,
                           Rng& rng) {
  // round-trip the point maps at 5 random points
  for (int trial = 0; trial < 5; ++trial) {
    const ModuliPoint p = random_point(chart, rng);
    const ModuliPoint q = substitute_point(chart, inverse_subst,
                                           substitute_point(chart, subst, p));
    for (int i = 0; i < chart.num_generators(); ++i)
      if ((q.g[static_cast<size_t>(i)].m - p.g[static_cast<size_t>(i)].m)
              .norm() > 1e-10)
        throw ModuliError("substitution fails the inverse round-trip");
  }

  auto rewrite = [&](const Word& w) {
    Word out;
    for (const Lit& l : w) {
      auto it = subst.find(l.id);
      const Word piece = it == subst.end() ? Word{l}
                         : (l.exp == 1 ? it->second
                                       : word_inverse(it->second));
      out = word_concat(out, piece);
    }
    return word_reduce(out);
  };

  ModuliChart out = chart;
  for (auto& b : out.boundary) b.word = rewrite(b.word);
  for (auto& [letter, w] : out.letter_words) w = rewrite(w);
  for (auto& dep : out.dependents) dep.expanded = rewrite(dep.expanded);
  return out;
}

}  // namespace modsurf
