#include "normal_approx/core_linear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace normal_approx {

JointEigenvectorFailure::JointEigenvectorFailure(const std::string& what,
                                                 std::vector<double> residuals)
    : SolverFailure(what, residuals.empty() ? 0.0
                                            : *std::max_element(residuals.begin(), residuals.end())),
      residuals_(std::move(residuals)) {}

void require_finite(const ComplexMatrix& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        std::ostringstream os;
        os << what << " has a non-finite entry at (" << i << ", " << j << ")";
        throw InvalidInput(os.str());
      }
    }
  }
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << " must be square, got " << m.rows() << "x" << m.cols();
    throw ShapeError(os.str());
  }
}

double hs_norm(const ComplexMatrix& m) {
  require_finite(m);
  return m.norm();
}

double hs_norm_normalized(const ComplexMatrix& m) {
  require_square(m);
  if (m.rows() == 0) throw InvalidInput("hs_norm_normalized: empty matrix");
  return hs_norm(m) / std::sqrt(static_cast<double>(m.rows()));
}

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "matmul: cannot multiply " << a.rows() << "x" << a.cols() << " by " << b.rows()
       << "x" << b.cols();
    throw ShapeError(os.str());
  }
  return a * b;
}

double commutator_defect(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a);
  if (a.rows() != b.rows() || b.rows() != b.cols()) {
    throw ShapeError("commutator_defect: operands must be square of equal size");
  }
  return (a * b - b * a).norm();
}

double normality_defect(const ComplexMatrix& a) {
  require_square(a);
  return (a * a.adjoint() - a.adjoint() * a).norm();
}

double relative_commutator_defect(const ComplexMatrix& a, const ComplexMatrix& b) {
  return commutator_defect(a, b) / (1.0 + a.norm() * b.norm());
}

double max_relative_commutator_defect(std::span<const ComplexMatrix> members) {
  double worst = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      worst = std::max(worst, relative_commutator_defect(members[i], members[j]));
    }
  }
  return worst;
}

MatrixFamily::MatrixFamily(std::vector<ComplexMatrix> members, double commutation_tolerance)
    : members_(std::move(members)), tolerance_(commutation_tolerance) {
  if (members_.empty()) throw InvalidInput("MatrixFamily: no members");
  if (!(tolerance_ >= 0.0) || !std::isfinite(tolerance_)) {
    throw InvalidInput("MatrixFamily: commutation tolerance must be finite and nonnegative");
  }
  const Eigen::Index n = members_.front().rows();
  if (n == 0) throw InvalidInput("MatrixFamily: members must have positive dimension");
  for (const auto& m : members_) {
    require_square(m, "family member");
    if (m.rows() != n) throw ShapeError("MatrixFamily: members differ in dimension");
    require_finite(m, "family member");
  }
  max_defect_ = max_relative_commutator_defect(members_);
  if (max_defect_ > tolerance_) {
    std::ostringstream os;
    os << "MatrixFamily: members do not commute (relative defect " << max_defect_
       << " > tolerance " << tolerance_ << ")";
    throw NonCommutingFamily(os.str(), max_defect_);
  }
}

double MatrixFamily::max_member_norm() const {
  double worst = 0.0;
  for (const auto& m : members_) worst = std::max(worst, m.norm());
  return worst;
}

ComplexMatrix gram_sum(std::span<const ComplexMatrix> members) {
  if (members.empty()) throw InvalidInput("gram_sum: no members");
  const Eigen::Index n = members.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& m : members) {
    if (m.cols() != n) throw ShapeError("gram_sum: members differ in width");
    sum.noalias() += m.adjoint() * m;
  }
  // Remove rounding skew before anything spectral sees it.
  ComplexMatrix sym = 0.5 * (sum + sum.adjoint());
  return sym;
}

ComplexMatrix gram_sum(const MatrixFamily& family) { return gram_sum(family.span()); }

std::vector<Complex> diagonal_entries(const ComplexMatrix& m) {
  const Eigen::Index d = std::min(m.rows(), m.cols());
  std::vector<Complex> out(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) out[i] = m(i, i);
  return out;
}

ComplexMatrix conjugate_diagonal(const ComplexMatrix& unitary, const ComplexVector& diagonal) {
  if (unitary.cols() != diagonal.size()) throw ShapeError("conjugate_diagonal: size mismatch");
  return unitary * diagonal.asDiagonal() * unitary.adjoint();
}

}  // namespace normal_approx
