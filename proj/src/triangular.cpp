#include "normal_approx/triangular.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "normal_approx/spectra.hpp"

namespace normal_approx {
namespace {

void fix_phase(ComplexVector& v) {
  Eigen::Index at = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      at = i;
    }
  }
  if (best > 0.0) v *= std::conj(v(at)) / best;
}

std::vector<double> eigen_residuals(std::span<const ComplexMatrix> members, const ComplexVector& v) {
  std::vector<double> out;
  out.reserve(members.size());
  for (const auto& a : members) {
    const ComplexVector av = a * v;
    out.push_back((av - v.dot(av) * v).norm());
  }
  return out;
}

}  // namespace

ComplexMatrix householder_from(const ComplexVector& v) {
  const Eigen::Index m = v.size();
  if (m == 0) throw InvalidInput("householder_from: empty vector");
  const double nv = v.norm();
  if (!(nv > 0.0)) throw InvalidInput("householder_from: zero vector");
  const Complex lead = v(0);
  const Complex alpha = lead == Complex(0.0) ? Complex(-nv) : -nv * lead / std::abs(lead);
  ComplexVector w = v;
  w(0) -= alpha;
  ComplexMatrix h = ComplexMatrix::Identity(m, m);
  h.noalias() -= (2.0 / w.squaredNorm()) * (w * w.adjoint());
  return h;
}

ComplexMatrix restrict_to_subspace(const ComplexMatrix& a, const ComplexMatrix& basis, double tol) {
  require_square(a);
  if (basis.rows() != a.rows()) throw ShapeError("restrict_to_subspace: basis has wrong height");
  const ComplexMatrix ab = a * basis;
  ComplexMatrix r = basis.adjoint() * ab;
  const double defect = (ab - basis * r).norm();
  if (defect > tol * a.norm()) {
    std::ostringstream os;
    os << "restrict_to_subspace: subspace is not invariant (defect " << defect << ")";
    throw SubspaceNotInvariant(os.str(), defect);
  }
  return r;
}

ComplexVector common_eigenvector(std::span<const ComplexMatrix> members, double tol) {
  if (members.empty()) throw InvalidInput("common_eigenvector: empty family");
  const Eigen::Index n = members.front().rows();
  if (n == 0) throw InvalidInput("common_eigenvector: dimension 0");
  for (const auto& m : members) {
    require_square(m);
    if (m.rows() != n) throw ShapeError("common_eigenvector: members differ in dimension");
  }

  // Narrow down to the invariant subspace of the chosen cluster of each
  // member in turn; every member preserves it because the family commutes.
  ComplexMatrix basis = ComplexMatrix::Identity(n, n);
  std::vector<ComplexMatrix> current(members.begin(), members.end());
  for (std::size_t i = 0; i < current.size() && basis.cols() > 1; ++i) {
    const SpectralClusters spectral = cluster_eigenvalues(current[i]);
    const ComplexMatrix q = cluster_invariant_subspace(spectral, spectral.clusters.front());
    if (q.cols() == basis.cols()) continue;
    for (std::size_t j = 0; j < current.size(); ++j) {
      try {
        current[j] = restrict_to_subspace(current[j], q, tol);
      } catch (const SubspaceNotInvariant& e) {
        std::vector<double> res(current.size(), 0.0);
        res[j] = e.defect();
        throw JointEigenvectorFailure(
            "common_eigenvector: a member does not preserve the chosen eigenspace", res);
      }
    }
    basis = basis * q;
  }

  // Every member is now mu_i + (nearly) nilpotent on span(basis); the joint
  // kernel of the shifted restrictions holds the common eigenvector.
  const Eigen::Index d = basis.cols();
  ComplexVector w = ComplexVector::Ones(1);
  if (d > 1) {
    ComplexMatrix stacked(static_cast<Eigen::Index>(current.size()) * d, d);
    for (std::size_t j = 0; j < current.size(); ++j) {
      ComplexMatrix shifted = current[j];
      shifted.diagonal().array() -= shifted.trace() / static_cast<double>(d);
      stacked.middleRows(static_cast<Eigen::Index>(j) * d, d) = shifted;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(stacked, Eigen::ComputeFullV);
    w = svd.matrixV().col(d - 1);
  }
  ComplexVector v = basis * w;
  v.normalize();
  fix_phase(v);

  auto residuals = eigen_residuals(members, v);
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (residuals[j] > tol * (1.0 + members[j].norm())) {
      std::ostringstream os;
      os << "common_eigenvector: member " << j << " has residual " << residuals[j];
      throw JointEigenvectorFailure(os.str(), std::move(residuals));
    }
  }
  return v;
}

ComplexVector common_eigenvector(const MatrixFamily& family, double tol) {
  return common_eigenvector(family.span(), tol);
}

SchurResult simultaneous_schur(const MatrixFamily& family, double tol) {
  const Eigen::Index n = family.dim();
  if (n == 0) throw InvalidInput("simultaneous_schur: dimension 0");
  const std::size_t k = family.size();

  SchurResult out;
  out.unitary = ComplexMatrix::Identity(n, n);
  out.triangulars = family.members();
  std::vector<double> lower_mass(k, 0.0);
  std::vector<ComplexMatrix> blocks(k);

  for (Eigen::Index s = 0; s + 1 < n; ++s) {
    const Eigen::Index m = n - s;
    for (std::size_t i = 0; i < k; ++i) blocks[i] = out.triangulars[i].bottomRightCorner(m, m);
    const ComplexVector v = common_eigenvector(blocks, tol);
    const ComplexMatrix h = householder_from(v);
    for (std::size_t i = 0; i < k; ++i) {
      ComplexMatrix& t = out.triangulars[i];
      t.rightCols(m) = (t.rightCols(m) * h).eval();
      t.bottomRows(m) = (h.adjoint() * t.bottomRows(m)).eval();
      lower_mass[i] += t.col(s).tail(m - 1).squaredNorm();
      t.col(s).tail(m - 1).setZero();
    }
    out.unitary.rightCols(m) = (out.unitary.rightCols(m) * h).eval();
  }

  for (std::size_t i = 0; i < k; ++i) {
    out.residual = std::max(out.residual, std::sqrt(lower_mass[i]) / (1.0 + family[i].norm()));
    const auto& t = out.triangulars[i];
    out.diag_lambdas.push_back(diagonal_entries(t));
  }
  return out;
}

}  // namespace normal_approx
