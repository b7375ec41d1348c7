#include "modsurf/lie_group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace modsurf {

namespace {

using cplx = std::complex<double>;

Rvec vectorize_real(const Cmat& m) {
  const int n = static_cast<int>(m.rows());
  Rvec v(2 * n * n);
  int k = 0;
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < n; ++row) {
      v(k++) = m(row, col).real();
      v(k++) = m(row, col).imag();
    }
  return v;
}

}  // namespace

LieGroupModel::LieGroupModel(std::string name, std::vector<Cmat> basis,
                             Rmat gram, GroupConstraint constraint)
    : name_(std::move(name)),
      basis_(std::move(basis)),
      gram_(std::move(gram)),
      constraint_(constraint) {
  if (basis_.empty()) throw LieGroupError("empty algebra basis");
  matrix_size_ = static_cast<int>(basis_[0].rows());
  for (const auto& b : basis_) {
    if (b.rows() != matrix_size_ || b.cols() != matrix_size_)
      throw LieGroupError("basis matrices must be square and equally sized");
  }
  const int d = dim();
  if (gram_.rows() != d || gram_.cols() != d)
    throw LieGroupError("gram matrix size mismatch");

  // pseudo-inverse for re-expansion in the basis
  Rmat b(2 * matrix_size_ * matrix_size_, d);
  for (int i = 0; i < d; ++i) b.col(i) = vectorize_real(basis_[i]);
  expand_pinv_ = (b.transpose() * b).ldlt().solve(b.transpose());
  gram_inv_ = gram_.inverse();

  // structure constants from the basis
  c_.assign(static_cast<size_t>(d) * d * d, 0.0);
  abelian_ = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Cmat comm = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      const Rvec coords = coords_of(comm, 1e-9);
      for (int k = 0; k < d; ++k) {
        c_[static_cast<size_t>((i * d + j) * d + k)] = coords(k);
        if (std::abs(coords(k)) > 1e-12) abelian_ = false;
      }
    }
  validate();
}

void LieGroupModel::validate() const {
  const int d = dim();
  if ((gram_ - gram_.transpose()).norm() > 1e-12)
    throw LieGroupError("metric gram matrix is not symmetric");
  if (std::abs(gram_.determinant()) <= 1e-12)
    throw LieGroupError("metric gram matrix is degenerate");
  auto c = [&](int i, int j, int k) { return structure_constant(i, j, k); };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        if (std::abs(c(i, j, k) + c(j, i, k)) > 1e-12)
          throw LieGroupError("structure constants not antisymmetric");
      }
  // Jacobi identity
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int m = 0; m < d; ++m) {
          double s = 0.0;
          for (int l = 0; l < d; ++l)
            s += c(i, j, l) * c(l, k, m) + c(j, k, l) * c(l, i, m) +
                 c(k, i, l) * c(l, j, m);
          if (std::abs(s) > 1e-12)
            throw LieGroupError("structure constants violate Jacobi");
        }
  // Ad-invariance of the metric: <[X,Y],Z> + <Y,[X,Z]> = 0
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
          s += c(i, j, l) * gram_(l, k) + c(i, k, l) * gram_(j, l);
        if (std::abs(s) > 1e-12)
          throw LieGroupError("metric is not ad-invariant");
      }
}

double LieGroupModel::pair(const Rvec& x, const Rvec& y) const {
  return x.dot(gram_ * y);
}

Rvec LieGroupModel::bracket(const Rvec& x, const Rvec& y) const {
  const int d = dim();
  if (x.size() != d || y.size() != d)
    throw LieGroupError("algebra vector dimension mismatch");
  Rvec out = Rvec::Zero(d);
  for (int i = 0; i < d; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < d; ++j) {
      const double xy = x(i) * y(j);
      if (xy == 0.0) continue;
      for (int k = 0; k < d; ++k)
        out(k) += xy * structure_constant(i, j, k);
    }
  }
  return out;
}

Cmat LieGroupModel::algebra_matrix(const Rvec& x) const {
  Cmat m = Cmat::Zero(matrix_size_, matrix_size_);
  for (int i = 0; i < dim(); ++i) m += x(i) * basis_[static_cast<size_t>(i)];
  return m;
}

Rvec LieGroupModel::coords_of(const Cmat& m, double tol) const {
  const Rvec coords = expand_pinv_ * vectorize_real(m);
  const Cmat recon = algebra_matrix(coords);
  if ((recon - m).norm() > tol * std::max(1.0, m.norm()))
    throw LieGroupError("matrix does not lie in the algebra span of " +
                        name_);
  return coords;
}

Cmat LieGroupModel::exp_matrix(const Rvec& x) const {
  return algebra_matrix(x).exp();
}

Rmat LieGroupModel::adjoint_matrix(const Cmat& g) const {
  const int d = dim();
  if (abelian_) return Rmat::Identity(d, d);
  Rmat ad(d, d);
  const Cmat gi = g.inverse();
  for (int i = 0; i < d; ++i)
    ad.col(i) = coords_of(g * basis_[static_cast<size_t>(i)] * gi);
  return ad;
}

Cmat LieGroupModel::identity_matrix() const {
  return Cmat::Identity(matrix_size_, matrix_size_);
}

Cmat LieGroupModel::retract(const Cmat& m) const {
  switch (constraint_) {
    case GroupConstraint::kSpecialUnitary: {
      Eigen::JacobiSVD<Cmat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Cmat u = svd.matrixU() * svd.matrixV().adjoint();
      const cplx det = u.determinant();
      u /= std::pow(det, 1.0 / matrix_size_);
      return u;
    }
    case GroupConstraint::kSpecialLinearReal: {
      Cmat r = m.real().cast<cplx>();
      const double det = r.real().determinant();
      if (det <= 0.0)
        throw LieGroupError("cannot retract: determinant not positive");
      return r / std::pow(det, 1.0 / matrix_size_);
    }
    case GroupConstraint::kUnitDiagonal: {
      Cmat r = Cmat::Zero(matrix_size_, matrix_size_);
      for (int i = 0; i < matrix_size_; ++i) {
        const cplx z = m(i, i);
        r(i, i) = std::abs(z) > 0.0 ? z / std::abs(z) : cplx(1.0, 0.0);
      }
      return r;
    }
    case GroupConstraint::kNone:
      return m;
  }
  return m;
}

double LieGroupModel::constraint_defect(const Cmat& m) const {
  switch (constraint_) {
    case GroupConstraint::kSpecialUnitary:
      return (m.adjoint() * m - identity_matrix()).norm() +
             std::abs(m.determinant() - cplx(1.0));
    case GroupConstraint::kSpecialLinearReal:
      return m.imag().norm() + std::abs(m.determinant() - cplx(1.0));
    case GroupConstraint::kUnitDiagonal: {
      double off = 0.0, diag = 0.0;
      for (int i = 0; i < matrix_size_; ++i)
        for (int j = 0; j < matrix_size_; ++j) {
          if (i == j)
            diag += std::abs(std::abs(m(i, i)) - 1.0);
          else
            off += std::abs(m(i, j));
        }
      return off + diag;
    }
    case GroupConstraint::kNone:
      return 0.0;
  }
  return 0.0;
}

GroupElement LieGroupModel::element(Cmat m, double tol) const {
  if (m.rows() != matrix_size_ || m.cols() != matrix_size_)
    throw LieGroupError("group matrix size mismatch");
  if (constraint_defect(m) > tol)
    throw LieGroupError("matrix violates the group constraint of " + name_);
  return GroupElement(this, std::move(m));
}

GroupElement LieGroupModel::identity() const {
  return GroupElement(this, identity_matrix());
}

GroupElement LieGroupModel::exponential(const Rvec& x) const {
  return GroupElement(this, retract(exp_matrix(x)));
}

double LieGroupModel::eta(const Rvec& u, const Rvec& v, const Rvec& w) const {
  return 0.5 * pair(u, bracket(v, w));
}

GroupElement GroupElement::inverse() const {
  return GroupElement(model, m.inverse());
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (!same_model(other))
    throw LieGroupError("group elements from different models");
  return GroupElement(model, m * other.m);
}

AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& x) {
  return g.model->coords_of(g.m * g.model->algebra_matrix(x) *
                            g.m.inverse());
}

double beta_at(const GroupElement& g1, const GroupElement& g2, const Rvec& u1,
               const Rvec& u2, const Rvec& w1, const Rvec& w2) {
  if (!g1.same_model(g2))
    throw LieGroupError("group elements from different models");
  const LieGroupModel& mod = *g1.model;
  const Rmat ad2 = mod.adjoint_matrix(g2.m);
  return 0.5 * (mod.pair(u1, ad2 * w2) - mod.pair(w1, ad2 * u2));
}

double eta_at(const GroupElement& g, const Rvec& u, const Rvec& v,
              const Rvec& w) {
  return g.model->eta(u, v, w);
}

InvariantFunction InvariantFunction::re_trace() {
  InvariantFunction f;
  f.name = "re_trace";
  f.eval = [](const GroupElement& g) { return g.m.trace().real(); };
  f.directional = [](const GroupElement& g, const Cmat& x) {
    return (g.m * x).trace().real();
  };
  return f;
}

InvariantFunction InvariantFunction::constant(double value) {
  InvariantFunction f;
  f.name = "constant";
  f.eval = [value](const GroupElement&) { return value; };
  f.directional = [](const GroupElement&, const Cmat&) { return 0.0; };
  return f;
}

AlgebraVector phi_dot(const InvariantFunction& f, const GroupElement& g,
                      double fd_step) {
  const LieGroupModel& mod = *g.model;
  const int d = mod.dim();
  Rvec rhs(d);
  for (int i = 0; i < d; ++i) {
    if (f.directional) {
      rhs(i) = f.directional(g, mod.basis(i));
    } else {
      Rvec e = Rvec::Zero(d);
      e(i) = fd_step;
      const GroupElement gp(g.model, g.m * mod.exp_matrix(e));
      const GroupElement gm(g.model, g.m * mod.exp_matrix(-e));
      rhs(i) = (f.eval(gp) - f.eval(gm)) / (2.0 * fd_step);
    }
  }
  return mod.gram().ldlt().solve(rhs);
}

AlgebraVector random_algebra_vector(const LieGroupModel& model, Rng& rng) {
  Rvec x(model.dim());
  for (int i = 0; i < model.dim(); ++i) x(i) = rng.uniform();
  return x;
}

GroupElement random_element(const LieGroupModel& model, Rng& rng) {
  return model.exponential(random_algebra_vector(model, rng));
}

double inv_eta_defect(const GroupElement& g, const Rvec& u, const Rvec& v,
                      const Rvec& w) {
  const LieGroupModel& mod = *g.model;
  // tangent g.x pushes forward through inversion to the left-trivialized
  // tangent -Ad_g x at g^{-1}
  const Rmat ad = mod.adjoint_matrix(g.m);
  const double pulled = mod.eta(-(ad * u), -(ad * v), -(ad * w));
  return std::abs(pulled + mod.eta(u, v, w));
}

namespace {

// beta as a function of the base point, on fixed coordinate tangents
double beta_fn(const LieGroupModel& mod, const Cmat& g2, const Rvec& u1,
               const Rvec& u2, const Rvec& w1, const Rvec& w2) {
  const Rmat ad2 = mod.adjoint_matrix(g2);
  return 0.5 * (mod.pair(u1, ad2 * w2) - mod.pair(w1, ad2 * u2));
}

}  // namespace

double mult_eta_defect(const GroupElement& g1, const GroupElement& g2,
                       const Rvec tri1[2], const Rvec tri2[2],
                       const Rvec tri3[2], double fd_step) {
  const LieGroupModel& mod = *g1.model;
  const Rvec* x[3] = {tri1, tri2, tri3};

  // Mult pushforward: delta(g1 g2) = Ad_{g2^{-1}} delta g1 + delta g2
  const Rmat ad2inv = mod.adjoint_matrix(g2.m.inverse());
  Rvec push[3];
  for (int i = 0; i < 3; ++i) push[i] = ad2inv * x[i][0] + x[i][1];
  const double lhs = mod.eta(push[0], push[1], push[2]);

  const double pr_terms = mod.eta(x[0][0], x[1][0], x[2][0]) +
                          mod.eta(x[0][1], x[1][1], x[2][1]);

  // d beta on constant left-trivialized fields:
  //   sum_cyc X.beta(Y,Z) - sum beta([X,Y],Z)
  auto beta_at_offset = [&](const Rvec& off1, const Rvec& off2, const Rvec* a,
                            const Rvec* b) {
    const Cmat h2 = g2.m * mod.exp_matrix(off2);
    (void)off1;  // beta does not depend on the first factor's base point
    return beta_fn(mod, h2, a[0], a[1], b[0], b[1]);
  };
  auto deriv = [&](const Rvec* dir, const Rvec* a, const Rvec* b) {
    const Rvec p1 = fd_step * dir[0], p2 = fd_step * dir[1];
    return (beta_at_offset(p1, p2, a, b) - beta_at_offset(-p1, -p2, a, b)) /
           (2.0 * fd_step);
  };
  double dbeta = deriv(x[0], x[1], x[2]) - deriv(x[1], x[0], x[2]) +
                 deriv(x[2], x[0], x[1]);
  Rvec br[2];
  // [X,Y] componentwise, then beta([X,Y], Z) etc.
  auto comm = [&](const Rvec* a, const Rvec* b, Rvec* out) {
    out[0] = mod.bracket(a[0], b[0]);
    out[1] = mod.bracket(a[1], b[1]);
  };
  Rvec g2zero[2];
  comm(x[0], x[1], br);
  dbeta -= beta_fn(mod, g2.m, br[0], br[1], x[2][0], x[2][1]);
  comm(x[0], x[2], br);
  dbeta += beta_fn(mod, g2.m, br[0], br[1], x[1][0], x[1][1]);
  comm(x[1], x[2], br);
  dbeta -= beta_fn(mod, g2.m, br[0], br[1], x[0][0], x[0][1]);
  (void)g2zero;

  return std::abs(lhs - (pr_terms - dbeta));
}

double contraction_eta_defect(const GroupElement& g, const Rvec& xi_prime,
                              const Rvec& xi, const Rvec& v, const Rvec& w,
                              double fd_step) {
  const LieGroupModel& mod = *g.model;
  // generator of (g',g).a = g' a g^{-1}: left-trivialized xi - Ad_{a^{-1}} xi'
  auto field = [&](const Cmat& a) -> Rvec {
    return xi - mod.adjoint_matrix(a.inverse()) * xi_prime;
  };
  const double lhs = mod.eta(field(g.m), v, w);

  // lambda = (theta^R.xi' + theta^L.xi)/2 on a constant tangent y at a
  auto lambda = [&](const Cmat& a, const Rvec& y) {
    return 0.5 * (mod.pair(mod.adjoint_matrix(a) * y, xi_prime) +
                  mod.pair(y, xi));
  };
  auto deriv = [&](const Rvec& dir, const Rvec& y) {
    const Cmat ap = g.m * mod.exp_matrix(fd_step * dir);
    const Cmat am = g.m * mod.exp_matrix(-fd_step * dir);
    return (lambda(ap, y) - lambda(am, y)) / (2.0 * fd_step);
  };
  const double dlam =
      deriv(v, w) - deriv(w, v) - lambda(g.m, mod.bracket(v, w));
  return std::abs(lhs + dlam);
}

namespace {

LieGroupModel make_su2() {
  const cplx i(0.0, 1.0);
  Cmat x1(2, 2), x2(2, 2), x3(2, 2);
  x1 << 0, -0.5 * i, -0.5 * i, 0;
  x2 << 0, -0.5, 0.5, 0;
  x3 << -0.5 * i, 0, 0, 0.5 * i;
  // <X,Y> = -tr(XY), positive definite on su(2)
  Rmat gram = 0.5 * Rmat::Identity(3, 3);
  return LieGroupModel("SU2", {x1, x2, x3}, gram,
                       GroupConstraint::kSpecialUnitary);
}

LieGroupModel make_sl2r() {
  Cmat x1(2, 2), x2(2, 2), x3(2, 2);
  x1 << 1, 0, 0, -1;
  x2 << 0, 1, 1, 0;
  x3 << 0, 1, -1, 0;
  // <X,Y> = tr(XY), signature (2,1)
  Rmat gram = Rmat::Zero(3, 3);
  gram(0, 0) = 2.0;
  gram(1, 1) = 2.0;
  gram(2, 2) = -2.0;
  return LieGroupModel("SL2R", {x1, x2, x3}, gram,
                       GroupConstraint::kSpecialLinearReal);
}

LieGroupModel make_torus2() {
  const cplx i(0.0, 1.0);
  Cmat x1 = Cmat::Zero(2, 2), x2 = Cmat::Zero(2, 2);
  x1(0, 0) = i;
  x2(1, 1) = i;
  return LieGroupModel("T2", {x1, x2}, Rmat::Identity(2, 2),
                       GroupConstraint::kUnitDiagonal);
}

}  // namespace

const LieGroupModel& LieGroupModel::su2() {
  static const LieGroupModel model = make_su2();
  return model;
}

const LieGroupModel& LieGroupModel::sl2r() {
  static const LieGroupModel model = make_sl2r();
  return model;
}

const LieGroupModel& LieGroupModel::torus2() {
  static const LieGroupModel model = make_torus2();
  return model;
}

const LieGroupModel* LieGroupModel::find(const std::string& name) {
  if (name == "SU2") return &su2();
  if (name == "SL2R") return &sl2r();
  if (name == "T2") return &torus2();
  return nullptr;
}

std::shared_ptr<const LieGroupModel> LieGroupModel::load_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LieGroupError("cannot open group description: " + path);
  nlohmann::json j;
  in >> j;
  const std::string name = j.at("name").get<std::string>();
  const int n = j.at("matrix_size").get<int>();
  std::vector<Cmat> basis;
  for (const auto& bj : j.at("basis")) {
    Cmat b(n, n);
    // entries row-major: either reals or [re, im] pairs
    int k = 0;
    for (const auto& e : bj) {
      const int row = k / n, col = k % n;
      if (e.is_array())
        b(row, col) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
      else
        b(row, col) = cplx(e.get<double>(), 0.0);
      ++k;
    }
    if (k != n * n) throw LieGroupError("basis matrix entry count mismatch");
    basis.push_back(b);
  }
  const int d = static_cast<int>(basis.size());
  Rmat gram(d, d);
  int k = 0;
  for (const auto& e : j.at("gram")) {
    gram(k / d, k % d) = e.get<double>();
    ++k;
  }
  if (k != d * d) throw LieGroupError("gram entry count mismatch");
  const std::string cs = j.value("constraint", std::string("none"));
  GroupConstraint constraint = GroupConstraint::kNone;
  if (cs == "special_unitary")
    constraint = GroupConstraint::kSpecialUnitary;
  else if (cs == "special_linear_real")
    constraint = GroupConstraint::kSpecialLinearReal;
  else if (cs == "unit_diagonal")
    constraint = GroupConstraint::kUnitDiagonal;
  else if (cs != "none")
    throw LieGroupError("unknown constraint type: " + cs);
  return std::make_shared<LieGroupModel>(name, basis, gram, constraint);
}

}  // namespace modsurf
