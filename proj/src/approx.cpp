#include "normal_approx/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace normal_approx {

NormalApproximation normal_approximation(const MatrixFamily& family, double tol) {
  SchurResult schur = simultaneous_schur(family, tol);
  std::vector<ComplexMatrix> normals;
  normals.reserve(family.size());
  for (const auto& t : schur.triangulars) {
    normals.push_back(conjugate_diagonal(schur.unitary, t.diagonal()));
  }
  // The B_i are simultaneously diagonal, so they commute to rounding; keep the
  // caller's tolerance.
  return {MatrixFamily(std::move(normals), family.commutation_tolerance()), std::move(schur)};
}

BoundReport certify_bound(const MatrixFamily& family, const BoundOptions& options) {
  BoundReport r;
  r.n = family.dim();
  r.k = family.size();
  const NormalApproximation approx = normal_approximation(family, options.schur_tolerance);
  for (std::size_t i = 0; i < family.size(); ++i) {
    r.lhs_unnormalized += (family[i] - approx.normals[i]).squaredNorm();
  }
  r.schur_residual = approx.schur.residual;
  r.spread_diag = numerical_spread(gram_sum(family), options.spread_grid, options.spread_refinement);

  const double n = static_cast<double>(r.n);
  r.rhs_normalized = r.spread_diag.spread;
  r.rhs_unnormalized = n * r.rhs_normalized;
  r.lhs_normalized = r.lhs_unnormalized / n;

  if (r.rhs_unnormalized > kBoundAbsoluteSlack) {
    r.ratio = r.lhs_unnormalized / r.rhs_unnormalized;
  } else if (r.lhs_unnormalized <= kBoundAbsoluteSlack) {
    r.ratio = 0.0;
  } else {
    r.ratio = std::numeric_limits<double>::infinity();
    r.ratio_infinite = true;
  }

  const double bound = r.rhs_unnormalized * (1.0 + kBoundRelativeSlack) + kBoundAbsoluteSlack;
  r.inequality_holds = r.lhs_unnormalized <= bound;
  const double grid_allowance = n * r.spread_diag.grid_error_bound;
  r.certified = r.schur_residual <= kMaxCertifiableSchurResidual &&
                r.lhs_unnormalized <= bound + grid_allowance;
  return r;
}

BoundReport certify_bound(const MatrixFamily& family, int spread_grid) {
  BoundOptions options;
  options.spread_grid = spread_grid;
  return certify_bound(family, options);
}

NormalityReport fraas_check(const MatrixFamily& family, double tol, int spread_grid) {
  if (!(tol >= 0.0)) throw InvalidInput("fraas_check: tolerance must be nonnegative");
  NormalityReport r;
  r.tolerance = tol;
  const ComplexMatrix gram = gram_sum(family);
  r.gram_spread = numerical_spread(gram, spread_grid).spread;
  r.scalar_estimate = gram.trace() / static_cast<double>(family.dim());
  bool ok = r.gram_spread <= tol * (1.0 + gram.norm());
  for (const auto& a : family.members()) {
    const double d = normality_defect(a);
    r.normality_defects.push_back(d);
    ok = ok && d <= tol * (1.0 + a.squaredNorm());
  }
  r.verdict = ok;
  return r;
}

double putnam_fuglede_defect(const MatrixFamily& family) {
  double worst = 0.0;
  for (const auto& bi : family.members()) {
    for (const auto& bj : family.members()) {
      worst = std::max(worst, (bi * bj.adjoint() - bj.adjoint() * bi).norm());
    }
  }
  return worst;
}

}  // namespace normal_approx
