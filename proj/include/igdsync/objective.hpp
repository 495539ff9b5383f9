#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace igdsync {

/// One peer objective f_i(x) = x'Ax + c'x with A symmetric positive
/// definite. ell_i and L_i are the strong-convexity and smoothness
/// constants of f_i, i.e. the extreme eigenvalues of the Hessian 2A.
struct QuadraticComponent {
  Eigen::MatrixXd A;
  Eigen::VectorXd c;
  double ell_i = 0.0;
  double L_i = 0.0;

  int dim() const { return static_cast<int>(c.size()); }
  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
};

/// (value, gradient) at x. Throws std::invalid_argument on a dimension
/// mismatch.
std::pair<double, Eigen::VectorXd> component_calculus(const QuadraticComponent& comp,
                                                      const Eigen::VectorXd& x);

/// (ell_i, L_i) = (2 lambda_min(A), 2 lambda_max(A)). Rejects
/// non-symmetric or non-PD inputs.
std::pair<double, double> component_constants(const Eigen::MatrixXd& A);

/// Builds a component, validating A and filling the constants.
QuadraticComponent make_component(Eigen::MatrixXd A, Eigen::VectorXd c);

/// The sum objective with its aggregate constants and exact optimum.
struct Problem {
  std::vector<QuadraticComponent> components;
  int n = 0;
  int N = 0;
  double L = 0.0;    // sum_j L_j
  double ell = 0.0;  // min_j ell_j
  Eigen::VectorXd x_star;
  double f_star = 0.0;

  // Aggregates cached for fast f / grad f evaluation.
  Eigen::MatrixXd A_sum;
  Eigen::VectorXd c_sum;

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  double gap(const Eigen::VectorXd& x) const { return value(x) - f_star; }
};

/// Assembles a Problem: aggregate constants and the optimum from a
/// direct dense solve of (2 sum A_i) x = -sum c_i.
Problem problem_summary(std::vector<QuadraticComponent> components);

/// Random instance: A_i = B_i' B_i with B_i an n-by-n standard-normal
/// matrix, c_i standard normal, all from the keyed generator. Adds
/// 1e-6*I when lambda_min(A_i) < 1e-8 so positive definiteness holds
/// numerically. Identical seed yields a bitwise-identical Problem.
Problem random_instance(int n, int N, std::uint64_t seed);

/// Line-oriented snapshot format: "n N" header, then per component the
/// row-major A_i and c_i, 17 significant digits.
void save_problem(std::ostream& out, const Problem& p);
Problem load_problem(std::istream& in);

}  // namespace igdsync
