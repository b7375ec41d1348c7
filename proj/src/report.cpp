#include "modsurf/report.hpp"

#include <algorithm>

#include "modsurf/dirac.hpp"
#include "modsurf/dynamics.hpp"
#include "modsurf/forms.hpp"
#include "modsurf/groupoid.hpp"
#include "modsurf/linalg.hpp"
#include "modsurf/stock.hpp"

namespace modsurf {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json cmatrix_json(const Cmat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

class Checks {
 public:
  Checks(const RunConfig& config) : config_(config) {}

  double tol(const std::string& name, double fallback) const {
    auto it = config_.tolerances.find(name);
    return it == config_.tolerances.end() ? fallback : it->second;
  }

  // pass when value <= tolerance
  void le(const std::string& name, double value, double fallback) {
    const double t = tol(name, fallback);
    add(name, value, t, "le", value <= t);
  }

  // pass when value >= threshold
  void ge(const std::string& name, double value, double fallback) {
    const double t = tol(name, fallback);
    add(name, value, t, "ge", value >= t);
  }

  void flag(const std::string& name, bool ok) {
    add(name, ok ? 0.0 : 1.0, 0.5, "le", ok);
  }

  json items() const { return items_; }
  bool all_pass() const { return all_pass_; }

 private:
  void add(const std::string& name, double value, double t,
           const std::string& cmp, bool ok) {
    items_.push_back(json{{"name", name},
                          {"value", value},
                          {"tolerance", t},
                          {"comparison", cmp},
                          {"pass", ok}});
    all_pass_ = all_pass_ && ok;
  }

  const RunConfig& config_;
  json items_ = json::array();
  bool all_pass_ = true;
};

const LieGroupModel& resolve_group(const RunConfig& config) {
  const LieGroupModel* model = LieGroupModel::find(config.group_name);
  if (model == nullptr)
    throw ReportError("unknown group model: " + config.group_name);
  return *model;
}

GluingPattern resolve_pattern(const RunConfig& config) {
  if (config.pattern_text.empty())
    throw ReportError("command '" + config.command + "' needs a pattern");
  return parse_pattern(config.pattern_text);
}

// invariant probe functions: conjugation-invariant composites of boundary
// holonomies along loop edges
std::vector<LoopFunction> loop_probes(const ModuliChart& chart) {
  std::vector<LoopFunction> probes;
  for (const auto& b : chart.boundary)
    if (b.source_vertex == b.target_vertex)
      probes.push_back(LoopFunction{b.word, InvariantFunction::re_trace()});
  return probes;
}

json run_surface(const RunConfig& config, Checks& checks) {
  const auto pattern = resolve_pattern(config);
  const auto info = analyze(pattern);
  json data;
  data["euler_characteristic"] = info.euler_characteristic;
  data["num_vertices"] = info.num_vertices;
  data["num_polygons"] = info.num_polygons;
  data["num_edge_classes"] = info.num_edge_classes;
  data["num_boundary_components"] = info.num_boundary_components;
  data["num_surface_components"] = info.num_surface_components;
  data["num_interior_vertices"] = info.num_interior_vertices();
  data["free_generator_count"] = info.graph_edge_count();
  data["a1"] = info.a1;
  data["a2"] = info.a2;
  data["a3"] = info.a3;
  json edges = json::array();
  for (const auto& e : info.boundary_edges)
    edges.push_back(json{{"letter", e.letter},
                         {"source_vertex", e.source_vertex},
                         {"target_vertex", e.target_vertex},
                         {"component", e.component}});
  data["boundary_edges"] = edges;
  json vertex_loc = json::array();
  for (bool b : info.vertex_on_boundary)
    vertex_loc.push_back(b ? "boundary" : "interior");
  data["vertex_location"] = vertex_loc;
  checks.flag("pattern_valid", true);
  return data;
}

json run_verify(const RunConfig& config, Checks& checks) {
  const auto& group = resolve_group(config);
  const auto pattern = resolve_pattern(config);
  const auto chart = build_chart(pattern, group);
  Rng rng(config.seed);
  json data;

  // Cartan 3-form identities on the group itself
  {
    double inv = 0.0, mult = 0.0, contraction = 0.0;
    Rng sub = rng.fork(1);
    for (int s = 0; s < config.n_samples; ++s) {
      const GroupElement g1 = random_element(group, sub);
      const GroupElement g2 = random_element(group, sub);
      const Rvec u = random_algebra_vector(group, sub);
      const Rvec v = random_algebra_vector(group, sub);
      const Rvec w = random_algebra_vector(group, sub);
      inv = std::max(inv, inv_eta_defect(g1, u, v, w));
      Rvec t1[2] = {u, random_algebra_vector(group, sub)};
      Rvec t2[2] = {v, random_algebra_vector(group, sub)};
      Rvec t3[2] = {w, random_algebra_vector(group, sub)};
      mult = std::max(mult,
                      mult_eta_defect(g1, g2, t1, t2, t3, config.fd_step));
      contraction = std::max(
          contraction,
          contraction_eta_defect(g1, random_algebra_vector(group, sub),
                                 random_algebra_vector(group, sub), v, w,
                                 config.fd_step));
    }
    checks.le("cartan_inv_eta", inv, 1e-8);
    checks.le("cartan_mult_eta", mult, 1e-5);
    checks.le("cartan_contraction_eta", contraction, 1e-5);
  }

  // 2-form properties over random points
  {
    double d_omega = 0.0, moment = 0.0, kernel_gap = 0.0;
    double min_sigma = 1e300;
    int rank_failures = 0;
    Rng sub = rng.fork(2);
    for (int s = 0; s < config.n_samples; ++s) {
      const auto p = random_point(chart, sub);
      d_omega = std::max(
          d_omega, verify_d_omega(chart, p, random_tangent(chart, sub),
                                  random_tangent(chart, sub),
                                  random_tangent(chart, sub),
                                  config.fd_step));
      Eigen::VectorXd xi(chart.vertex_dim());
      for (int i = 0; i < xi.size(); ++i) xi(i) = sub.uniform();
      moment = std::max(
          moment, verify_moment(chart, p, xi, random_tangent(chart, sub)));
      const auto rep = kernel_report(chart, p);
      min_sigma = std::min(min_sigma, rep.min_degeneracy_sigma);
      if (!rep.rank_identity_holds) ++rank_failures;
      if (rep.kernel_identity_checked)
        kernel_gap = std::max(kernel_gap, rep.kernel_identity_gap);
      if (s == 0) data["omega_sample"] = matrix_json(rep.omega);
    }
    checks.le("d_omega", d_omega, group.abelian() ? 1e-12 : 1e-5);
    checks.le("moment", moment, 1e-12);
    checks.ge("min_degeneracy_sigma", min_sigma, 1e-9);
    checks.flag("rank_identity", rank_failures == 0);
    if (chart.info.a3) checks.le("kernel_identity_gap", kernel_gap, 1e-7);
  }

  // gluing-pattern independence, when a diagonal cut applies
  if (pattern.polygons.size() == 1 && pattern.polygons[0].size() >= 4) {
    auto [cut_pattern, corr] = cut_diagonal(pattern, 0, 0, 2, "__cut");
    const auto cut_chart = build_chart(
        cut_pattern, group,
        diagonal_cut_hints(cut_pattern, "__cut", chart.dependents[0].letter));
    Rng sub = rng.fork(3);
    checks.le("pattern_compare_cut",
              compare_patterns(chart, cut_chart, {},
                               std::min(config.n_samples, 10), sub),
              1e-10);
  }
  {
    auto [big_pattern, corr] =
        add_interior_vertex_cut(pattern, 0, 1, "__vtx");
    const auto big_chart = build_chart(big_pattern, group);
    Rng sub = rng.fork(4);
    checks.le("pattern_compare_interior_vertex",
              compare_patterns(chart, big_chart, {},
                               std::min(config.n_samples, 10), sub),
              1e-10);
  }
  return data;
}

json run_flow(const RunConfig& config, Checks& checks) {
  const auto& group = resolve_group(config);
  const auto pattern = resolve_pattern(config);
  const auto chart = build_chart(pattern, group);
  const auto phi = InvariantFunction::re_trace();
  Rng rng(config.seed);
  const auto start = random_point(chart, rng);
  json data;

  const bool is_cylinder = chart.gen_index.count("c") &&
                           chart.gen_index.count("a") &&
                           chart.boundary.size() == 2;
  const bool is_torus = chart.gen_index.count("a") &&
                        chart.gen_index.count("b") &&
                        chart.boundary.size() == 1;
  if (!is_cylinder && !is_torus)
    throw ReportError(
        "flow scenarios cover the cylinder and one-holed torus patterns");

  LoopFunction f{parse_word("a"), phi};
  std::map<std::string, IntersectionData> goldman_data;
  int flow_vertex = -1;
  if (is_cylinder) {
    flow_vertex = chart.info.letter_endpoints.at("a").first;
  } else {
    IntersectionData b_data;
    b_data.segments = {parse_word("b"), {}};
    b_data.signs = {-1};
    b_data.loop = parse_word("a");
    goldman_data["b"] = b_data;
  }
  auto explicit_flow = [&](const ModuliPoint& p, double t) {
    return is_cylinder ? boundary_loop_flow(chart, p, flow_vertex,
                                            parse_word("a"), phi, t)
                       : goldman_flow(chart, p, goldman_data, phi, t);
  };

  // derivative at t = 0 against the linear-system solve
  {
    const Tangent xf = hamiltonian_vector(chart, start, f);
    const double h = 1e-6;
    const auto pp = explicit_flow(start, h);
    const auto pm = explicit_flow(start, -h);
    const int d = group.dim();
    Tangent fd(chart.tangent_dim());
    for (int i = 0; i < chart.num_generators(); ++i) {
      const Cmat diff = (start.g[static_cast<size_t>(i)].m.inverse() *
                         (pp.g[static_cast<size_t>(i)].m -
                          pm.g[static_cast<size_t>(i)].m)) /
                        (2.0 * h);
      fd.segment(i * d, d) = group.coords_of(diff, 1e-3);
    }
    checks.le("flow_derivative_vs_hamiltonian", (fd - xf).norm(), 1e-7);
  }

  // explicit endpoint, drift, one-parameter law
  const auto end_explicit = explicit_flow(start, 1.0);
  {
    double drift = 0.0;
    const auto phi0 = boundary_holonomy(chart, start);
    const auto phi1 = boundary_holonomy(chart, end_explicit);
    for (size_t e = 0; e < phi0.size(); ++e)
      drift = std::max(drift, (phi1[e].m - phi0[e].m).norm());
    checks.le("phi_drift_explicit", drift, 1e-10);

    const auto two_step = explicit_flow(explicit_flow(start, 0.4), 0.6);
    double law = 0.0;
    for (size_t i = 0; i < two_step.g.size(); ++i)
      law = std::max(law,
                     (two_step.g[i].m - end_explicit.g[i].m).norm());
    checks.le("one_parameter_law", law, 1e-12);
  }

  // RK4 cross-check
  {
    double drift = 0.0;
    const auto end_rk4 =
        flow_integrate(chart, start, f, 1.0, 1000, &drift);
    double dist = 0.0;
    for (size_t i = 0; i < end_rk4.g.size(); ++i)
      dist = std::max(dist, (end_rk4.g[i].m - end_explicit.g[i].m).norm());
    checks.le("rk4_vs_explicit", dist, 1e-6);
    checks.le("phi_drift_rk4", drift, 1e-6);
  }

  // omega invariance through the time-1 flow map
  {
    const int n = chart.tangent_dim();
    const int d = group.dim();
    Eigen::MatrixXd jac(n, n);
    const double h = 1e-6;
    for (int j = 0; j < n; ++j) {
      Tangent dir = Tangent::Zero(n);
      dir(j) = 1.0;
      const auto qp = explicit_flow(move_point(chart, start, dir, h), 1.0);
      const auto qm = explicit_flow(move_point(chart, start, dir, -h), 1.0);
      for (int i = 0; i < chart.num_generators(); ++i) {
        const Cmat diff = (end_explicit.g[static_cast<size_t>(i)].m.inverse() *
                           (qp.g[static_cast<size_t>(i)].m -
                            qm.g[static_cast<size_t>(i)].m)) /
                          (2.0 * h);
        jac.block(i * d, j, d, 1) = group.coords_of(diff, 1e-3);
      }
    }
    const Eigen::MatrixXd pulled =
        jac.transpose() * omega_at(chart, end_explicit) * jac;
    checks.le("omega_invariance",
              linalg::operator_norm(pulled - omega_at(chart, start)), 1e-5);
  }

  // time series record
  {
    json series = json::array();
    const auto phi0 = boundary_holonomy(chart, start);
    for (int k = 0; k <= 10; ++k) {
      const double t = 0.1 * k;
      const auto p = explicit_flow(start, t);
      json entry;
      entry["t"] = t;
      json gens = json::array();
      for (int i = 0; i < chart.num_generators(); ++i)
        gens.push_back(
            json{{"generator", chart.generators[static_cast<size_t>(i)]},
                 {"matrix", cmatrix_json(p.g[static_cast<size_t>(i)].m)}});
      entry["generators"] = gens;
      const auto phis = boundary_holonomy(chart, p);
      json edges = json::array();
      double drift = 0.0;
      for (size_t e = 0; e < phis.size(); ++e) {
        edges.push_back(
            json{{"letter", chart.boundary[e].letter},
                 {"matrix", cmatrix_json(phis[e].m)}});
        drift = std::max(drift, (phis[e].m - phi0[e].m).norm());
      }
      entry["boundary_holonomies"] = edges;
      entry["phi_drift"] = drift;
      series.push_back(entry);
    }
    data["time_series"] = series;
  }
  return data;
}

json run_bracket(const RunConfig& config, Checks& checks) {
  const auto& group = resolve_group(config);
  const auto pattern = resolve_pattern(config);
  const auto chart = build_chart(pattern, group);
  if (!chart.gen_index.count("a") || !chart.gen_index.count("b") ||
      chart.boundary.size() != 1)
    throw ReportError("bracket scenario covers the one-holed torus pattern");

  const auto phi = InvariantFunction::re_trace();
  LoopFunction f{parse_word("a"), phi};
  LoopFunction g{parse_word("b"), phi};
  BracketData data;
  data.alpha = parse_word("a");
  data.beta = parse_word("b");
  data.crossings = {{-1, parse_word("b")}};
  BracketData rebased = data;
  rebased.crossings[0].conjugator = parse_word("a b^-1 a b");

  Rng rng(config.seed);
  double vs_numeric = 0.0, antisym = 0.0, rebase = 0.0;
  json samples = json::array();
  for (int s = 0; s < config.n_samples; ++s) {
    const auto p = random_point(chart, rng);
    const double goldman = goldman_bracket(chart, p, data, phi, phi);
    const double numeric = poisson_bracket_numeric(chart, p, f, g);
    vs_numeric = std::max(vs_numeric, std::abs(goldman - numeric));
    antisym = std::max(antisym,
                       std::abs(numeric + poisson_bracket_numeric(
                                              chart, p, g, f)));
    rebase = std::max(rebase,
                      std::abs(goldman - goldman_bracket(chart, p, rebased,
                                                         phi, phi)));
    if (s < 5)
      samples.push_back(json{{"goldman", goldman}, {"numeric", numeric}});
  }
  checks.le("goldman_vs_numeric", vs_numeric, 1e-8);
  checks.le("bracket_antisymmetry", antisym, 1e-10);
  checks.le("conjugator_independence", rebase, 1e-12);
  json out;
  out["samples"] = samples;
  return out;
}

json run_groupoid(const RunConfig& config, Checks& checks) {
  const auto& group = resolve_group(config);
  Rng rng(config.seed);
  const auto rep = verify_groupoid(group, config.n_samples, rng,
                                   config.fd_step);
  checks.le("groupoid_axioms", rep.axiom_defect, 1e-12);
  checks.le("multiplicativity", rep.multiplicativity_defect,
            group.abelian() ? 1e-13 : 1e-10);
  checks.le("d_omega_source_target", rep.d_omega_defect, 1e-5);
  checks.ge("nondegeneracy_sigma", rep.min_nondegeneracy, 1e-9);
  checks.le("dehn_twist_omega", rep.dehn_twist_omega_defect, 1e-10);
  checks.le("closed_form_vs_severa", rep.closed_form_vs_severa, 1e-12);

  // orbit 2-forms
  double momentum = 0.0;
  Rng sub = rng.fork(5);
  for (int s = 0; s < config.n_samples; ++s)
    momentum = std::max(
        momentum,
        orbit_momentum_defect(random_element(group, sub),
                              random_algebra_vector(group, sub),
                              random_algebra_vector(group, sub)));
  checks.le("orbit_momentum_n1", momentum, 1e-12);

  Rng sub2 = rng.fork(6);
  checks.le("orbit_descent_n2",
            orbit_descent_defect(group, std::min(config.n_samples, 20), sub2),
            1e-10);

  double skew = 0.0;
  Rng sub3 = rng.fork(7);
  for (int n : {1, 2, 3}) {
    for (int s = 0; s < 10; ++s) {
      std::vector<GroupElement> tuple;
      for (int k = 0; k < n; ++k) tuple.push_back(random_element(group, sub3));
      Eigen::VectorXd xi(n * group.dim()), zeta(n * group.dim());
      for (int i = 0; i < xi.size(); ++i) {
        xi(i) = sub3.uniform();
        zeta(i) = sub3.uniform();
      }
      const double a = orbit_form(group, tuple, xi, zeta);
      const double b = orbit_form(group, tuple, zeta, xi);
      skew = std::max(skew, std::abs(a + b) / std::max(1.0, std::abs(a)));
    }
  }
  checks.le("orbit_skew_symmetry", skew, 1e-12);

  json data;
  data["multiplicativity_defect"] = rep.multiplicativity_defect;
  data["nondegeneracy_sigma"] = rep.min_nondegeneracy;
  return data;
}

json run_dirac(const RunConfig& config, Checks& checks) {
  const auto& group = resolve_group(config);
  const auto pattern = resolve_pattern(config);
  const auto chart = build_chart(pattern, group);
  Rng rng(config.seed);
  json data;

  double pairing_law = 0.0;
  Rng sub = rng.fork(1);
  for (int s = 0; s < config.n_samples; ++s) {
    const GroupElement g = random_element(group, sub);
    const Rvec a = random_algebra_vector(group, sub);
    const Rvec b = random_algebra_vector(group, sub);
    const Rvec c = random_algebra_vector(group, sub);
    const Rvec d = random_algebra_vector(group, sub);
    const double got = courant_pair(group, trivializing_section(g, a, b),
                                    trivializing_section(g, c, d));
    const double want = group.pair(b, d) - group.pair(a, c);
    pairing_law = std::max(
        pairing_law,
        std::abs(got - want) / std::max({1.0, std::abs(got), std::abs(want)}));
  }
  checks.le("trivialization_pairing_law", pairing_law, 1e-13);

  double isotropy = 0.0, exist = 0.0, comorph = 0.0;
  double uniq = 1e300, ann_gap = 0.0, iso_gap = 0.0;
  double antisym = 0.0, ham = 0.0, bracket_repro = 0.0;
  bool control_failed = true;
  const auto probes = loop_probes(chart);
  Rng sub2 = rng.fork(2);
  const int heavy_samples = std::min(config.n_samples, 25);
  for (int s = 0; s < heavy_samples; ++s) {
    const auto p = random_point(chart, sub2);
    isotropy = std::max(isotropy, structure_fiber(chart, p).isotropy_defect);

    Eigen::MatrixXd omega_used = omega_at(chart, p);
    const Eigen::MatrixXd* override_ptr = nullptr;
    Eigen::MatrixXd perturbed;
    if (config.perturb_omega != 0.0) {
      perturbed = omega_used;
      Rng noise = sub2.fork(900 + static_cast<std::uint64_t>(s));
      for (int i = 0; i < perturbed.rows(); ++i)
        for (int j = i; j < perturbed.cols(); ++j) {
          const double z = config.perturb_omega * noise.uniform();
          perturbed(i, j) += z;
          perturbed(j, i) += z;
        }
      override_ptr = &perturbed;
    }
    const auto rep = verify_dirac_morphism(chart, p, override_ptr);
    exist = std::max(exist, rep.existence_residual);
    comorph = std::max(comorph, rep.comorphism_defect);
    uniq = std::min(uniq, rep.uniqueness_sigma);

    if (!group.abelian() && config.perturb_omega == 0.0) {
      Eigen::MatrixXd bad = omega_used;
      Rng noise = sub2.fork(901 + static_cast<std::uint64_t>(s));
      for (int i = 0; i < bad.rows(); ++i)
        for (int j = i; j < bad.cols(); ++j) {
          const double z = 1e-3 * noise.uniform();
          bad(i, j) += z;
          bad(j, i) += z;
        }
      const auto neg = verify_dirac_morphism(chart, p, &bad);
      control_failed = control_failed && !neg.pass;
    }

    const auto rk = range_kernel_props(chart, p);
    ann_gap = std::max(ann_gap, rk.ann_range_gap);
    iso_gap = std::max(iso_gap, rk.kernel_iso_gap);

    const auto bv = quasi_poisson_bivector(chart, p, probes);
    antisym = std::max(antisym, bv.antisymmetry);
    ham = std::max(ham, bv.hamiltonian_defect);
    for (size_t i = 0; i < probes.size(); ++i)
      for (size_t j = i + 1; j < probes.size(); ++j) {
        const double via_pi =
            bivector_bracket(chart, p, bv.pi, probes[i], probes[j]);
        const double numeric =
            poisson_bracket_numeric(chart, p, probes[i], probes[j]);
        bracket_repro = std::max(bracket_repro, std::abs(via_pi - numeric));
      }
  }
  checks.le("fiber_isotropy", isotropy, 1e-12);
  checks.le("morphism_existence", exist, 1e-8);
  checks.ge("morphism_uniqueness_sigma", uniq, 1e-9);
  checks.le("comorphism_consistency", comorph, 1e-6);
  if (!group.abelian() && config.perturb_omega == 0.0)
    checks.flag("negative_control_fails", control_failed);
  checks.le("ann_range_gap", ann_gap, 1e-7);
  checks.le("kernel_iso_gap", iso_gap, 1e-7);
  checks.le("bivector_antisymmetry", antisym, 1e-12);
  if (!probes.empty()) {
    checks.le("bivector_hamiltonian", ham, 1e-8);
    if (probes.size() > 1)
      checks.le("bivector_bracket_reproduction", bracket_repro, 1e-8);
  }
  data["probe_count"] = probes.size();
  return data;
}

}  // namespace

RunResult run_suite(const RunConfig& config) {
  Checks checks(config);
  json data;
  if (config.command == "surface")
    data = run_surface(config, checks);
  else if (config.command == "verify")
    data = run_verify(config, checks);
  else if (config.command == "flow")
    data = run_flow(config, checks);
  else if (config.command == "bracket")
    data = run_bracket(config, checks);
  else if (config.command == "groupoid")
    data = run_groupoid(config, checks);
  else if (config.command == "dirac")
    data = run_dirac(config, checks);
  else
    throw ReportError("unknown command: " + config.command);

  json report;
  report["schema_version"] = 1;
  report["command"] = config.command;
  json cfg;
  cfg["pattern"] = config.pattern_name;
  cfg["group"] = config.group_name;
  cfg["seed"] = config.seed;
  cfg["samples"] = config.n_samples;
  cfg["fd_step"] = config.fd_step;
  if (config.perturb_omega != 0.0) cfg["perturb_omega"] = config.perturb_omega;
  report["config"] = cfg;
  report["checks"] = checks.items();
  report["data"] = data;
  report["pass"] = checks.all_pass();
  return RunResult{report, checks.all_pass()};
}

std::string serialize_report(const nlohmann::json& report) {
  return report.dump(2) + "\n";
}

}  // namespace modsurf
