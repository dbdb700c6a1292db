#include "flowgrowth/schatten.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace flowgrowth::ibf {

namespace {
void require_square(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument("Schatten norm needs a non-empty square matrix");
  }
}
}  // namespace

SchattenValue schatten_norm(const Eigen::MatrixXd& a) {
  require_square(a);
  const Eigen::MatrixXd gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const double fourth = solver.eigenvalues().squaredNorm();
  return {std::sqrt(std::sqrt(fourth))};
}

double schatten_norm_entrywise(const Eigen::MatrixXd& a) {
  require_square(a);
  const auto n = a.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double inner = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) inner += a(i, k) * a(j, k);
      total += inner * inner;
    }
  }
  return std::sqrt(std::sqrt(total));
}

}  // namespace flowgrowth::ibf
