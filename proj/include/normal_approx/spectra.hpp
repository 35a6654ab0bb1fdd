#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "normal_approx/core_linear.hpp"

namespace normal_approx {

inline constexpr double kDefaultKernelTolerance = 1e-12;
inline constexpr int kDefaultSpreadGrid = 1024;
inline constexpr int kDefaultSpreadRefinement = 40;

// All n eigenvalues with algebraic multiplicity, sorted by (Re, Im).
std::vector<Complex> eigenvalues(const ComplexMatrix& a);

struct HermitianEigen {
  Eigen::VectorXd values;  // nondecreasing
  ComplexMatrix vectors;   // unitary, column j pairs with values[j]
};

// Spectral decomposition of a (near-)Hermitian matrix. Inputs farther than
// 1e-8 (1 + ||H||_F) from Hermitian are rejected; the rest are symmetrized.
HermitianEigen hermitian_eigen(const ComplexMatrix& h);

// Orthonormal basis of the numerical kernel of m: right singular vectors whose
// singular value is at most max(rows, cols) * scale * rel_tol. `scale`
// defaults to the largest singular value of m.
ComplexMatrix kernel_basis(const ComplexMatrix& m, double rel_tol = kDefaultKernelTolerance);
ComplexMatrix kernel_basis(const ComplexMatrix& m, double rel_tol, double scale);

// Flag of joint kernels V_1 ⊂ V_2 ⊂ ... of the operators `ops`, where
// V_{j+1} = {x : op x ∈ V_j for every op}. `basis` lists V_1's vectors first,
// then the new directions of V_2, and so on; `levels[j]` is how many columns
// level j + 1 contributed. Every op maps level j into levels < j, so each op
// is block strictly upper triangular in this basis.
struct KernelFlag {
  ComplexMatrix basis;
  std::vector<Eigen::Index> levels;
};
KernelFlag chained_kernel(std::span<const ComplexMatrix> ops, double absolute_threshold);

struct EigenspaceBasis {
  Complex lambda;
  int order = 1;        // smallest m with K_m = K_inf (1 for the trivial space)
  ComplexMatrix basis;  // orthonormal columns spanning K_inf(lambda; A)
};

// Generalized eigenspace K_inf(lambda; A). `tol` is the relative
// singular-value threshold of every kernel decision.
EigenspaceBasis generalized_eigenspace(const ComplexMatrix& a, Complex lambda,
                                       double tol = kDefaultKernelTolerance);

struct SpreadResult {
  double spread = 0.0;
  double theta_star = 0.0;  // in [0, pi)
  std::array<Complex, 2> witnesses{};
  int grid_points = 0;
  // Directional width at theta_star (spread may exceed it by the witness gap).
  double width_at_theta = 0.0;
  // Lipschitz bound on how far the grid maximum can sit below the true one.
  double grid_error_bound = 0.0;
};

// Numerical spread sw(A) = diam W(A), computed as the largest directional
// width max_theta [lambda_max - lambda_min](Re(e^{-i theta} A)).
SpreadResult numerical_spread(const ComplexMatrix& a, int grid = kDefaultSpreadGrid,
                              int refine_iters = kDefaultSpreadRefinement);

// Largest pairwise distance between eigenvalues.
double spectral_diameter(const ComplexMatrix& a);

struct SchurForm {
  ComplexMatrix unitary;     // U
  ComplexMatrix triangular;  // T = U^* A U, upper triangular
};

SchurForm complex_schur(const ComplexMatrix& a);

// Moves the selected diagonal entries of `schur` to the leading positions
// (keeping their relative order) with adjacent Givens swaps. `selected` is
// permuted alongside. Returns the number of selected entries.
Eigen::Index reorder_schur(SchurForm& schur, std::vector<bool>& selected);

struct EigenCluster {
  Complex representative;                   // mean of the members
  std::vector<Eigen::Index> schur_indices;  // positions on diag(T)
  std::vector<Complex> members;
  std::size_t multiplicity() const noexcept { return members.size(); }
};

struct SpectralClusters {
  SchurForm schur;
  std::vector<EigenCluster> clusters;  // sorted by representative, (Re, Im)
};

// Groups the eigenvalues of `a` into clusters. Eigenvalues within
// 1e-8 (1 + ||A||_F) of each other always share a cluster. Wider groups are
// accepted when the corresponding Schur block is numerically mu I + nilpotent,
// which catches the eps^{1/m} scatter of defective eigenvalues.
SpectralClusters cluster_eigenvalues(const ComplexMatrix& a);

// Orthonormal basis of the invariant subspace belonging to `cluster`.
ComplexMatrix cluster_invariant_subspace(const SpectralClusters& spectral,
                                         const EigenCluster& cluster);

}  // namespace normal_approx
