#pragma once

#include <vector>

#include "normal_approx/core_linear.hpp"
#include "normal_approx/spectra.hpp"
#include "normal_approx/triangular.hpp"

namespace normal_approx {

// Relative and absolute slack of the certified inequality lhs <= rhs.
inline constexpr double kBoundRelativeSlack = 1e-8;
inline constexpr double kBoundAbsoluteSlack = 1e-10;
// Certification is only meaningful once triangularization is this accurate.
inline constexpr double kMaxCertifiableSchurResidual = 1e-8;

struct NormalApproximation {
  MatrixFamily normals;  // B_i = U diag(T_i) U^*
  SchurResult schur;
};

// The commuting normal family obtained by keeping only the diagonals of a
// simultaneous Schur form, expressed in the original basis.
NormalApproximation normal_approximation(const MatrixFamily& family,
                                         double tol = kDefaultSchurTolerance);

struct BoundOptions {
  int spread_grid = kDefaultSpreadGrid;
  int spread_refinement = kDefaultSpreadRefinement;
  double schur_tolerance = kDefaultSchurTolerance;
};

struct BoundReport {
  Eigen::Index n = 0;
  std::size_t k = 0;
  double lhs_unnormalized = 0.0;  // sum_i ||A_i - B_i||_2^2
  double rhs_unnormalized = 0.0;  // n * sw(sum_i A_i^* A_i)
  double lhs_normalized = 0.0;    // lhs / n
  double rhs_normalized = 0.0;    // sw(sum_i A_i^* A_i)
  double ratio = 0.0;             // lhs / rhs; 0 when both vanish
  bool ratio_infinite = false;    // rhs vanished but lhs did not
  SpreadResult spread_diag;
  double schur_residual = 0.0;
  // lhs <= rhs (1 + 1e-8) + 1e-10, no grid allowance.
  bool inequality_holds = false;
  // Inequality with the spread grid's Lipschitz allowance added to the slack,
  // and a Schur residual small enough to trust.
  bool certified = false;
};

BoundReport certify_bound(const MatrixFamily& family, const BoundOptions& options = {});
BoundReport certify_bound(const MatrixFamily& family, int spread_grid);

struct NormalityReport {
  std::vector<double> normality_defects;  // ||A_i A_i^* - A_i^* A_i||_F
  double gram_spread = 0.0;               // sw(sum_i A_i^* A_i)
  Complex scalar_estimate;                // trace(gram) / n
  double tolerance = 0.0;
  bool verdict = false;
};

// Checks the hypothesis and conclusion of the scalar gram-sum criterion:
// verdict is true iff sw(gram) <= tol (1 + ||gram||_F) and every member's
// normality defect is at most tol (1 + ||A_i||_F^2).
NormalityReport fraas_check(const MatrixFamily& family, double tol,
                            int spread_grid = kDefaultSpreadGrid);

// max_{i,j} ||B_i B_j^* - B_j^* B_i||_F (i = j included, so this also
// measures normality).
double putnam_fuglede_defect(const MatrixFamily& family);

}  // namespace normal_approx
