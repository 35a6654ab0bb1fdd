#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "normal_approx/errors.hpp"

namespace normal_approx {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultCommutationTolerance = 1e-10;

// Throws InvalidInput if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what = "matrix");
void require_square(const ComplexMatrix& m, const char* what = "matrix");

// Unnormalized Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const ComplexMatrix& m);

// hs_norm(m) / sqrt(n) for square m.
double hs_norm_normalized(const ComplexMatrix& m);

ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// ||ab - ba||_F
double commutator_defect(const ComplexMatrix& a, const ComplexMatrix& b);

// ||a a* - a* a||_F
double normality_defect(const ComplexMatrix& a);

// Relative commutation defect used by the family invariant:
// ||a b - b a||_F / (1 + ||a||_F ||b||_F).
double relative_commutator_defect(const ComplexMatrix& a, const ComplexMatrix& b);

// A nonempty, ordered list of same-size square matrices that pairwise commute
// within `commutation_tolerance` in the relative sense above. Construction
// validates; a MatrixFamily value is always valid.
class MatrixFamily {
 public:
  explicit MatrixFamily(std::vector<ComplexMatrix> members,
                        double commutation_tolerance = kDefaultCommutationTolerance);

  std::size_t size() const noexcept { return members_.size(); }
  // Common dimension n of the members.
  Eigen::Index dim() const noexcept { return members_.front().rows(); }

  const ComplexMatrix& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<ComplexMatrix>& members() const noexcept { return members_; }
  std::span<const ComplexMatrix> span() const noexcept { return members_; }

  double commutation_tolerance() const noexcept { return tolerance_; }
  // Largest relative commutator defect over all pairs, measured at construction.
  double max_commutation_defect() const noexcept { return max_defect_; }

  // max_i ||A_i||_F
  double max_member_norm() const;

 private:
  std::vector<ComplexMatrix> members_;
  double tolerance_;
  double max_defect_ = 0.0;
};

// Largest relative commutator defect over all pairs of `members`.
double max_relative_commutator_defect(std::span<const ComplexMatrix> members);

// sum_i A_i^* A_i, Hermitian-symmetrized. The span overload accepts
// non-commuting tuples as well.
ComplexMatrix gram_sum(std::span<const ComplexMatrix> members);
ComplexMatrix gram_sum(const MatrixFamily& family);

std::vector<Complex> diagonal_entries(const ComplexMatrix& m);

// Unitary U * diag(d) * U^*.
ComplexMatrix conjugate_diagonal(const ComplexMatrix& unitary, const ComplexVector& diagonal);

}  // namespace normal_approx
