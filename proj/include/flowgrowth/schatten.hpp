#pragma once

#include <Eigen/Core>

namespace flowgrowth::ibf {

/// ||A||_S = (sum_i sigma_i^4)^{1/4}; for the identity in dimension d this
/// is d^{1/4}.
struct SchattenValue {
  double value = 0.0;
};

/// Singular-value route: eigenvalues of A A^T from a symmetric eigensolver.
/// Throws std::invalid_argument for non-square input.
SchattenValue schatten_norm(const Eigen::MatrixXd& a);

/// Entry route: (sum_{ij} (sum_k a_ik a_jk)^2)^{1/4}.
double schatten_norm_entrywise(const Eigen::MatrixXd& a);

}  // namespace flowgrowth::ibf
