#include "modsurf/linalg.hpp"

#include <algorithm>

namespace modsurf::linalg {

namespace {

Eigen::BDCSVD<Eigen::MatrixXd> full_svd(const Eigen::MatrixXd& m) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int rank_from_svd(const Eigen::VectorXd& sv, double rel_tol) {
  if (sv.size() == 0) return 0;
  const double cut = rel_tol * std::max(sv(0), 1.0);
  int r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

}  // namespace

Eigen::MatrixXd col_span(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return Eigen::MatrixXd(m.rows(), 0);
  auto svd = full_svd(m);
  const int r = rank_from_svd(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return Eigen::MatrixXd::Identity(m.cols(), m.cols());
  auto svd = full_svd(m);
  const int r = rank_from_svd(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return rank_from_svd(svd.singularValues(), rel_tol);
}

double smallest_singular_value(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().tail(1)(0);
}

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double subspace_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    double rel_tol) {
  const Eigen::MatrixXd qa = col_span(a, rel_tol);
  const Eigen::MatrixXd qb = col_span(b, rel_tol);
  if (qa.cols() != qb.cols()) return 1.0;
  if (qa.cols() == 0) return 0.0;
  // sin of the largest principal angle, computed both ways for symmetry
  const Eigen::MatrixXd ra = qb - qa * (qa.transpose() * qb);
  const Eigen::MatrixXd rb = qa - qb * (qb.transpose() * qa);
  return std::max(operator_norm(ra), operator_norm(rb));
}

Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      double* residual) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd x = svd.solve(b);
  if (residual != nullptr) *residual = (a * x - b).norm();
  return x;
}

}  // namespace modsurf::linalg
