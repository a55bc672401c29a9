#include "dsetdist/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dsetdist {

Eigen::MatrixXd principal_basis(const Matrix& data, int k) {
  if (k < 1) throw ValidationError("subspace dimension must be positive");
  const Eigen::Index max_k = std::min(data.rows(), data.cols());
  if (k > max_k) {
    throw InsufficientDataError("subspace dimension " + std::to_string(k) +
                                " exceeds min(rows, features) = " + std::to_string(max_k));
  }
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(1e-12, sv.size() > 0 ? sv(0) * 1e-10 : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  if (rank < k) {
    throw InsufficientDataError("centered data has rank " + std::to_string(rank) +
                                ", cannot extract a " + std::to_string(k) +
                                "-dimensional subspace; achievable rank is " + std::to_string(rank));
  }
  return svd.matrixV().leftCols(k);
}

PrincipalAngles principal_angles_between(const Eigen::MatrixXd& basis_a,
                                         const Eigen::MatrixXd& basis_b) {
  if (basis_a.rows() != basis_b.rows()) throw ShapeError("bases live in different ambient spaces");
  // acos loses half the digits near 0, so small angles come from the sines of
  // the residual of b after projecting onto a.
  const Eigen::MatrixXd cross = basis_a.transpose() * basis_b;
  const Eigen::MatrixXd residual = basis_b - basis_a * cross;
  const Eigen::VectorXd cosines = Eigen::JacobiSVD<Eigen::MatrixXd>(cross).singularValues();  // descending
  const Eigen::VectorXd sv_res = Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues();
  std::vector<double> sines(static_cast<std::size_t>(cosines.size()), 0.0);
  for (Eigen::Index i = 0; i < sv_res.size() && i < cosines.size(); ++i) sines[static_cast<std::size_t>(i)] = sv_res(i);
  std::sort(sines.begin(), sines.end());
  PrincipalAngles out;
  out.angles.reserve(static_cast<std::size_t>(cosines.size()));
  for (Eigen::Index i = 0; i < cosines.size(); ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    out.angles.push_back(c * c >= 0.5 ? std::asin(std::clamp(sines[static_cast<std::size_t>(i)], 0.0, 1.0))
                                      : std::acos(c));
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

PrincipalAngles principal_angles(const Dataset& a, const Dataset& b, int k) {
  require_same_cols(a, b);
  return principal_angles_between(principal_basis(a.data(), k), principal_basis(b.data(), k));
}

int default_subspace_dim(Eigen::Index n_features) {
  return static_cast<int>(std::min<Eigen::Index>(10, n_features));
}

double grassmann(const PrincipalAngles& pa) {
  double s = 0.0;
  for (double t : pa.angles) s += t * t;
  return std::sqrt(s);
}

double chordal(const PrincipalAngles& pa) {
  double s = 0.0;
  for (double t : pa.angles) s += std::sin(t) * std::sin(t);
  return std::sqrt(s);
}

double asimov(const PrincipalAngles& pa) {
  return pa.angles.empty() ? 0.0 : pa.angles.back();
}

}  // namespace dsetdist
