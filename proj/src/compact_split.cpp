#include "normal_approx/compact_split.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace normal_approx {
namespace {

void check_tolerance(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw InvalidInput("quasi-nilpotent split: tolerance must be positive and finite");
  }
}

// ||(1 - P) A Q|| for the orthonormal basis Q of a subspace.
double invariance_defect_of(const ComplexMatrix& a, const ComplexMatrix& q) {
  if (q.cols() == 0) return 0.0;
  const ComplexMatrix aq = a * q;
  return (aq - q * (q.adjoint() * aq)).norm();
}

}  // namespace

double spectral_radius(const ComplexMatrix& a) {
  double r = 0.0;
  for (const auto& z : eigenvalues(a)) r = std::max(r, std::abs(z));
  return r;
}

double block_triangular_spectral_radius(const ComplexMatrix& a,
                                        std::span<const Eigen::Index> levels) {
  require_square(a);
  Eigen::Index start = 0;
  double r = 0.0;
  for (const Eigen::Index size : levels) {
    if (start + size > a.rows()) throw ShapeError("block_triangular_spectral_radius: levels overrun");
    r = std::max(r, spectral_radius(a.block(start, start, size, size)));
    start += size;
  }
  if (start != a.rows()) throw ShapeError("block_triangular_spectral_radius: levels do not cover");
  return r;
}

KernelFlag joint_quasinilpotent_flag(const MatrixFamily& family, double tol) {
  check_tolerance(tol);
  const Eigen::Index n = family.dim();
  const auto k = static_cast<Eigen::Index>(family.size());
  ComplexMatrix stacked(k * n, n);
  for (Eigen::Index i = 0; i < k; ++i) stacked.middleRows(i * n, n) = family[i];
  Eigen::JacobiSVD<ComplexMatrix> svd(stacked);
  const double scale = svd.singularValues()(0);
  if (scale == 0.0) {
    return {ComplexMatrix::Identity(n, n), {n}};
  }
  return chained_kernel(family.span(), static_cast<double>(n) * scale * tol);
}

ComplexMatrix joint_quasinilpotent_space(const MatrixFamily& family, double tol) {
  return joint_quasinilpotent_flag(family, tol).basis;
}

ComplexMatrix intersect_subspaces(std::span<const ComplexMatrix> bases, double tol) {
  check_tolerance(tol);
  if (bases.empty()) throw InvalidInput("intersect_subspaces: no subspaces");
  const Eigen::Index n = bases.front().rows();
  for (const auto& b : bases) {
    if (b.rows() != n) throw ShapeError("intersect_subspaces: bases differ in height");
    if (b.cols() == 0) return ComplexMatrix(n, 0);
  }
  const auto k = static_cast<Eigen::Index>(bases.size());
  ComplexMatrix stacked(k * n, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    stacked.middleRows(i * n, n) =
        ComplexMatrix::Identity(n, n) - bases[i] * bases[i].adjoint();
  }
  // Projector complements have unit singular values, so scale is 1.
  return kernel_basis(stacked, tol, 1.0);
}

SplitResult split(const MatrixFamily& family, double tol) {
  KernelFlag flag = joint_quasinilpotent_flag(family, tol);
  const Eigen::Index n = family.dim();
  const Eigen::Index q = flag.basis.cols();

  SplitResult r;
  r.qn_levels = std::move(flag.levels);
  r.qn_basis = std::move(flag.basis);
  if (q == 0) {
    r.n_basis = ComplexMatrix::Identity(n, n);
  } else if (q == n) {
    r.n_basis = ComplexMatrix(n, 0);
  } else {
    Eigen::HouseholderQR<ComplexMatrix> qr(r.qn_basis);
    const ComplexMatrix full = qr.householderQ() * ComplexMatrix::Identity(n, n);
    r.n_basis = full.rightCols(n - q);
  }
  r.orthogonality_defect = (r.qn_basis.adjoint() * r.n_basis).norm();

  for (const auto& a : family.members()) {
    r.invariance_defect = std::max({r.invariance_defect, invariance_defect_of(a, r.qn_basis),
                                    invariance_defect_of(a, r.n_basis)});
    if (q > 0) {
      const ComplexMatrix restricted = r.qn_basis.adjoint() * a * r.qn_basis;
      r.qn_spectral_radii.push_back(block_triangular_spectral_radius(restricted, r.qn_levels));
    } else {
      r.qn_spectral_radii.push_back(0.0);
    }
    if (q < n) {
      r.normality_defects_on_hn.push_back(normality_defect(r.n_basis.adjoint() * a * r.n_basis));
    } else {
      r.normality_defects_on_hn.push_back(0.0);
    }
  }
  return r;
}

}  // namespace normal_approx
