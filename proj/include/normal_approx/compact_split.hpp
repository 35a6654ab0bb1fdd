#pragma once

#include <span>
#include <vector>

#include "normal_approx/core_linear.hpp"
#include "normal_approx/spectra.hpp"

namespace normal_approx {

// A restriction counts as quasi-nilpotent when its spectral radius is at most
// this times (1 + ||A||_F).
inline constexpr double kQuasiNilpotentThreshold = 1e-6;

// max |lambda| over the eigenvalues of a.
double spectral_radius(const ComplexMatrix& a);

// Spectral radius of a matrix that is block upper triangular with respect to
// the given level sizes: the largest spectral radius among its diagonal
// blocks. Entries below the block diagonal are treated as backward error.
double block_triangular_spectral_radius(const ComplexMatrix& a,
                                        std::span<const Eigen::Index> levels);

// Joint generalized kernel at 0, i.e. the intersection of K_inf(0; A_i) over
// the family, as a flag adapted to the joint nilpotent structure.
KernelFlag joint_quasinilpotent_flag(const MatrixFamily& family,
                                     double tol = kDefaultKernelTolerance);

// Orthonormal basis of the joint generalized kernel at 0 (possibly 0 columns).
ComplexMatrix joint_quasinilpotent_space(const MatrixFamily& family,
                                         double tol = kDefaultKernelTolerance);

// Orthonormal basis of the intersection of the column spans of `bases` (each
// with orthonormal columns), via the kernel of the stacked I - P_i.
ComplexMatrix intersect_subspaces(std::span<const ComplexMatrix> bases,
                                  double tol = kDefaultKernelTolerance);

struct SplitResult {
  ComplexMatrix qn_basis;  // H_qn
  ComplexMatrix n_basis;   // H_n, the orthogonal complement
  std::vector<Eigen::Index> qn_levels;
  double invariance_defect = 0.0;    // max_i of ||(1 - P) A_i P|| over both parts
  double orthogonality_defect = 0.0;  // ||qn_basis^* n_basis||_F
  std::vector<double> qn_spectral_radii;        // of A_i restricted to H_qn
  std::vector<double> normality_defects_on_hn;  // of A_i restricted to H_n

  Eigen::Index qn_dim() const noexcept { return qn_basis.cols(); }
  Eigen::Index n_dim() const noexcept { return n_basis.cols(); }
};

// Orthogonal split of the space into the joint quasi-nilpotent part and its
// complement, with diagnostics on how well the family respects it. Nothing is
// assumed: invariance and normality are measured and reported.
SplitResult split(const MatrixFamily& family, double tol = kDefaultKernelTolerance);

}  // namespace normal_approx
