#include "igdsync/objective.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "igdsync/rng.hpp"

namespace igdsync {

double QuadraticComponent::value(const Eigen::VectorXd& x) const {
  return x.dot(A * x) + c.dot(x);
}

Eigen::VectorXd QuadraticComponent::gradient(const Eigen::VectorXd& x) const {
  return 2.0 * (A * x) + c;
}

std::pair<double, Eigen::VectorXd> component_calculus(const QuadraticComponent& comp,
                                                      const Eigen::VectorXd& x) {
  if (x.size() != comp.c.size())
    throw std::invalid_argument("component_calculus: x has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(comp.c.size()));
  return {comp.value(x), comp.gradient(x)};
}

std::pair<double, double> component_constants(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("component_constants: A not square");
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (((A - A.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale)
    throw std::invalid_argument("component_constants: A not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  double lmax = es.eigenvalues().maxCoeff();
  if (lmin <= 0.0) throw std::invalid_argument("component_constants: A not positive definite");
  return {2.0 * lmin, 2.0 * lmax};
}

QuadraticComponent make_component(Eigen::MatrixXd A, Eigen::VectorXd c) {
  if (A.rows() != c.size()) throw std::invalid_argument("make_component: A and c dimensions differ");
  auto [ell, L] = component_constants(A);
  return QuadraticComponent{std::move(A), std::move(c), ell, L};
}

double Problem::value(const Eigen::VectorXd& x) const {
  return x.dot(A_sum * x) + c_sum.dot(x);
}

Eigen::VectorXd Problem::gradient(const Eigen::VectorXd& x) const {
  return 2.0 * (A_sum * x) + c_sum;
}

Problem problem_summary(std::vector<QuadraticComponent> components) {
  if (components.empty()) throw std::invalid_argument("problem_summary: no components");
  Problem p;
  p.n = components.front().dim();
  p.N = static_cast<int>(components.size());
  p.L = 0.0;
  p.ell = components.front().ell_i;
  p.A_sum = Eigen::MatrixXd::Zero(p.n, p.n);
  p.c_sum = Eigen::VectorXd::Zero(p.n);
  for (const auto& comp : components) {
    if (comp.dim() != p.n) throw std::invalid_argument("problem_summary: mixed dimensions");
    p.L += comp.L_i;
    p.ell = std::min(p.ell, comp.ell_i);
    p.A_sum += comp.A;
    p.c_sum += comp.c;
  }
  p.x_star = (2.0 * p.A_sum).ldlt().solve(-p.c_sum);
  if (!p.x_star.allFinite()) throw std::runtime_error("problem_summary: singular aggregate system");
  p.components = std::move(components);
  p.f_star = p.value(p.x_star);
  return p;
}

Problem random_instance(int n, int N, std::uint64_t seed) {
  if (n < 1 || N < 1) throw std::invalid_argument("random_instance: n and N must be positive");
  std::vector<QuadraticComponent> comps;
  comps.reserve(N);
  for (int i = 0; i < N; ++i) {
    KeyedRng rng({seed, keytag::kInstance, static_cast<std::uint64_t>(i)});
    Eigen::MatrixXd B(n, n);
    std::uint64_t ctr = 0;
    for (int r = 0; r < n; ++r)
      for (int col = 0; col < n; ++col) B(r, col) = rng.gaussian(ctr++);
    Eigen::VectorXd c(n);
    for (int r = 0; r < n; ++r) c[r] = rng.gaussian(ctr++);
    Eigen::MatrixXd A = B.transpose() * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-8)
      A += 1e-6 * Eigen::MatrixXd::Identity(n, n);
    comps.push_back(make_component(std::move(A), std::move(c)));
  }
  return problem_summary(std::move(comps));
}

void save_problem(std::ostream& out, const Problem& p) {
  out.precision(17);
  out << p.n << " " << p.N << "\n";
  for (const auto& comp : p.components) {
    for (int r = 0; r < p.n; ++r) {
      for (int c = 0; c < p.n; ++c) out << (c ? " " : "") << comp.A(r, c);
      out << "\n";
    }
    for (int r = 0; r < p.n; ++r) out << (r ? " " : "") << comp.c[r];
    out << "\n";
  }
}

Problem load_problem(std::istream& in) {
  int n = 0, N = 0;
  if (!(in >> n >> N) || n < 1 || N < 1)
    throw std::invalid_argument("load_problem: bad header");
  std::vector<QuadraticComponent> comps;
  for (int i = 0; i < N; ++i) {
    Eigen::MatrixXd A(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (!(in >> A(r, c))) throw std::invalid_argument("load_problem: truncated matrix");
    Eigen::VectorXd c(n);
    for (int r = 0; r < n; ++r)
      if (!(in >> c[r])) throw std::invalid_argument("load_problem: truncated vector");
    comps.push_back(make_component(std::move(A), std::move(c)));
  }
  return problem_summary(std::move(comps));
}

}  // namespace igdsync
