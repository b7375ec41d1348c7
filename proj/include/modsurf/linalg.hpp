#pragma once

#include <Eigen/Dense>

namespace modsurf::linalg {

// Orthonormal basis of the column span of m, rank decided by a relative
// singular-value threshold.
Eigen::MatrixXd col_span(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

// Orthonormal basis of ker(m); columns span the nullspace.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

double smallest_singular_value(const Eigen::MatrixXd& m);

double operator_norm(const Eigen::MatrixXd& m);

// Largest principal-angle sine between the spans of a and b (both given as
// matrices whose columns span the subspaces; need not be orthonormal).
// Returns 1 when the dimensions disagree. Accurate for small angles.
double subspace_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    double rel_tol = 1e-9);

// Minimum-norm least-squares solve; residual reported if requested.
Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      double* residual = nullptr);

}  // namespace modsurf::linalg
