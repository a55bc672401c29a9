#pragma once

#include <vector>

#include "dsetdist/core.hpp"

namespace dsetdist {

/// Principal angles in radians, ascending, each in [0, pi/2].
struct PrincipalAngles {
  std::vector<double> angles;
};

/// Orthonormal basis (N x k) of the top-k mean-centered principal directions.
/// Throws InsufficientDataError naming the achievable rank when it is below k.
Eigen::MatrixXd principal_basis(const Matrix& data, int k);

/// Angles between the column spans of two orthonormal bases.
PrincipalAngles principal_angles_between(const Eigen::MatrixXd& basis_a,
                                         const Eigen::MatrixXd& basis_b);

PrincipalAngles principal_angles(const Dataset& a, const Dataset& b, int k);

/// Default subspace dimension: min(10, N).
int default_subspace_dim(Eigen::Index n_features);

double grassmann(const PrincipalAngles& pa);
double chordal(const PrincipalAngles& pa);
double asimov(const PrincipalAngles& pa);

}  // namespace dsetdist
