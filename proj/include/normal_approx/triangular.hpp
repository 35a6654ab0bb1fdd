#pragma once

#include <span>
#include <vector>

#include "normal_approx/core_linear.hpp"

namespace normal_approx {

inline constexpr double kDefaultSchurTolerance = 1e-8;

// Simultaneous unitary triangularization U^* A_i U = T_i of a commuting family.
struct SchurResult {
  ComplexMatrix unitary;
  std::vector<ComplexMatrix> triangulars;  // strictly lower parts are exactly zero
  // max_i ||strict lower part discarded from U^* A_i U||_F / (1 + ||A_i||_F)
  double residual = 0.0;
  std::vector<std::vector<Complex>> diag_lambdas;  // diag(T_i), per member
};

// Unit vector v with ||A_i v - <v|A_i v> v|| <= tol (1 + ||A_i||_F) for every
// member. The phase is fixed so that the largest-modulus entry is real and
// positive.
ComplexVector common_eigenvector(const MatrixFamily& family,
                                 double tol = kDefaultSchurTolerance);
ComplexVector common_eigenvector(std::span<const ComplexMatrix> members,
                                 double tol = kDefaultSchurTolerance);

SchurResult simultaneous_schur(const MatrixFamily& family, double tol = kDefaultSchurTolerance);

// basis^* A basis, after checking ||A basis - basis (basis^* A basis)||_F <= tol ||A||_F.
ComplexMatrix restrict_to_subspace(const ComplexMatrix& a, const ComplexMatrix& basis,
                                   double tol = kDefaultSchurTolerance);

// Hermitian unitary reflector H with H e_1 proportional to the unit vector v.
ComplexMatrix householder_from(const ComplexVector& v);

}  // namespace normal_approx
