#include "normal_approx/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace normal_approx {
namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

// Largest and smallest eigenvalue of Re(e^{-i theta} A).
double directional_width(const ComplexMatrix& a, double theta) {
  const Complex phase = std::polar(1.0, -theta);
  const ComplexMatrix h = 0.5 * (phase * a + std::conj(phase) * a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw SolverFailure("numerical_spread: Hermitian eigensolver did not converge", 0.0);
  }
  const auto& v = es.eigenvalues();
  return v(v.size() - 1) - v(0);
}

// Single-link grouping of points[idx] at distance delta.
std::vector<std::vector<Eigen::Index>> single_link(const std::vector<Complex>& points,
                                                   const std::vector<Eigen::Index>& idx,
                                                   double delta) {
  const std::size_t m = idx.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::abs(points[idx[i]] - points[idx[j]]) <= delta) {
        const std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<long> slot(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(idx[i]);
  }
  return groups;
}

Complex mean_of(const std::vector<Complex>& points, const std::vector<Eigen::Index>& idx) {
  Complex sum = 0.0;
  for (auto i : idx) sum += points[i];
  return sum / static_cast<double>(idx.size());
}

// True when the Schur block of the group is mu I + (numerically) nilpotent.
bool group_is_defective_cluster(const SchurForm& schur, const std::vector<Eigen::Index>& idx,
                                double scale) {
  SchurForm work{ComplexMatrix(0, 0), schur.triangular};
  std::vector<bool> selected(static_cast<std::size_t>(work.triangular.rows()), false);
  for (auto i : idx) selected[i] = true;
  const Eigen::Index m = reorder_schur(work, selected);
  ComplexMatrix block = work.triangular.topLeftCorner(m, m);
  const Complex mu = block.diagonal().mean();
  block.diagonal().array() -= mu;
  const ComplexMatrix ops[] = {block};
  const double threshold = static_cast<double>(m) * scale * 1e-10;
  return chained_kernel(ops, threshold).basis.cols() == m;
}

void refine_groups(const SchurForm& schur, const std::vector<Complex>& points,
                   std::vector<Eigen::Index> group, double delta, double floor_delta,
                   double scale, bool known_bad, std::vector<std::vector<Eigen::Index>>& out) {
  if (group.size() == 1 || delta <= floor_delta) {
    out.push_back(std::move(group));
    return;
  }
  if (!known_bad && group_is_defective_cluster(schur, group, scale)) {
    out.push_back(std::move(group));
    return;
  }
  const double finer = std::max(0.5 * delta, floor_delta);
  auto parts = single_link(points, group, finer);
  if (parts.size() == 1) {
    refine_groups(schur, points, std::move(parts.front()), finer, floor_delta, scale, true, out);
    return;
  }
  for (auto& p : parts) refine_groups(schur, points, std::move(p), finer, floor_delta, scale, false, out);
}

}  // namespace

std::vector<Complex> eigenvalues(const ComplexMatrix& a) {
  require_square(a);
  require_finite(a);
  if (a.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, false);
  if (es.info() != Eigen::Success) {
    throw SolverFailure("eigenvalues: QR iteration did not converge", std::numeric_limits<double>::infinity());
  }
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  require_square(h);
  require_finite(h);
  const double skew = (h - h.adjoint()).norm();
  if (skew > 1e-8 * (1.0 + h.norm())) {
    std::ostringstream os;
    os << "hermitian_eigen: input is not Hermitian (||H - H*||_F = " << skew << ")";
    throw InvalidInput(os.str());
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw SolverFailure("hermitian_eigen: did not converge", std::numeric_limits<double>::infinity());
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix kernel_basis(const ComplexMatrix& m, double rel_tol) {
  return kernel_basis(m, rel_tol, -1.0);
}

ComplexMatrix kernel_basis(const ComplexMatrix& m, double rel_tol, double scale) {
  if (!(rel_tol > 0.0)) throw InvalidInput("kernel_basis: tolerance must be positive");
  const Eigen::Index cols = m.cols();
  if (cols == 0) return ComplexMatrix(0, 0);
  if (m.rows() == 0) return ComplexMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (scale < 0.0) scale = sv(0);
  const double threshold = static_cast<double>(std::max(m.rows(), cols)) * scale * rel_tol;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

KernelFlag chained_kernel(std::span<const ComplexMatrix> ops, double absolute_threshold) {
  if (ops.empty()) throw InvalidInput("chained_kernel: no operators");
  const Eigen::Index n = ops.front().cols();
  const auto k = static_cast<Eigen::Index>(ops.size());
  KernelFlag flag{ComplexMatrix(n, 0), {}};
  ComplexMatrix stacked(k * n, n);
  while (flag.basis.cols() < n) {
    const ComplexMatrix& q = flag.basis;
    const ComplexMatrix proj = ComplexMatrix::Identity(n, n) - q * q.adjoint();
    for (Eigen::Index i = 0; i < k; ++i) stacked.middleRows(i * n, n) = proj * ops[i];
    Eigen::JacobiSVD<ComplexMatrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > absolute_threshold) ++rank;
    const Eigen::Index dim = n - rank;
    if (dim <= q.cols()) break;
    // New directions: the part of the kernel orthogonal to what we have.
    const ComplexMatrix fresh = proj * svd.matrixV().rightCols(dim);
    Eigen::JacobiSVD<ComplexMatrix> orth(fresh, Eigen::ComputeThinU);
    const Eigen::Index added = dim - q.cols();
    ComplexMatrix next(n, q.cols() + added);
    next << q, orth.matrixU().leftCols(added);
    flag.basis = std::move(next);
    flag.levels.push_back(added);
  }
  return flag;
}

EigenspaceBasis generalized_eigenspace(const ComplexMatrix& a, Complex lambda, double tol) {
  require_square(a);
  require_finite(a);
  if (!(tol > 0.0)) throw InvalidInput("generalized_eigenspace: tolerance must be positive");
  const Eigen::Index n = a.rows();
  ComplexMatrix shifted = a;
  shifted.diagonal().array() -= lambda;
  double scale = spectral_norm(shifted);
  if (scale == 0.0) {
    return {lambda, 1, ComplexMatrix::Identity(n, n)};
  }
  const ComplexMatrix ops[] = {shifted};
  KernelFlag flag = chained_kernel(ops, static_cast<double>(n) * scale * tol);
  const int order = std::max<int>(1, static_cast<int>(flag.levels.size()));
  return {lambda, order, std::move(flag.basis)};
}

SpreadResult numerical_spread(const ComplexMatrix& a, int grid, int refine_iters) {
  require_square(a);
  require_finite(a);
  if (grid < 16) throw InvalidInput("numerical_spread: grid must be at least 16");
  if (refine_iters < 0) throw InvalidInput("numerical_spread: negative refinement count");

  const double pi = std::numbers::pi;
  const double h = pi / grid;
  std::vector<double> widths(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) widths[j] = directional_width(a, j * h);

  const double lipschitz_half_cell = spectral_norm(a) * h;
  int best_j = 0;
  for (int j = 1; j < grid; ++j) {
    if (widths[j] > widths[best_j]) best_j = j;
  }

  // Refine around every local grid maximum that could still hide the global
  // one, best first, at most eight of them.
  std::vector<int> seeds;
  for (int j = 0; j < grid; ++j) {
    const double left = widths[(j + grid - 1) % grid];
    const double right = widths[(j + 1) % grid];
    if (widths[j] >= left && widths[j] >= right &&
        widths[j] + 2.0 * lipschitz_half_cell >= widths[best_j]) {
      seeds.push_back(j);
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [&](int x, int y) { return widths[x] > widths[y]; });
  if (seeds.size() > 8) seeds.resize(8);

  double best_theta = best_j * h;
  double best_width = widths[best_j];
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int seed : seeds) {
    double lo = (seed - 1) * h, hi = (seed + 1) * h;
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = directional_width(a, x1), f2 = directional_width(a, x2);
    for (int it = 0; it < refine_iters; ++it) {
      if (f1 >= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = directional_width(a, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = directional_width(a, x2);
      }
    }
    const double x = f1 >= f2 ? x1 : x2;
    const double f = std::max(f1, f2);
    if (f > best_width) {
      best_width = f;
      best_theta = x;
    }
  }
  best_theta = std::fmod(best_theta, pi);
  if (best_theta < 0.0) best_theta += pi;
  if (best_theta >= pi) best_theta = 0.0;

  const Complex phase = std::polar(1.0, -best_theta);
  const ComplexMatrix hmat = 0.5 * (phase * a + std::conj(phase) * a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hmat);
  if (es.info() != Eigen::Success) {
    throw SolverFailure("numerical_spread: Hermitian eigensolver did not converge", 0.0);
  }
  const Eigen::Index n = a.rows();
  const ComplexVector v_max = es.eigenvectors().col(n - 1);
  const ComplexVector v_min = es.eigenvectors().col(0);
  SpreadResult r;
  r.witnesses = {v_max.dot(a * v_max), v_min.dot(a * v_min)};
  r.width_at_theta = es.eigenvalues()(n - 1) - es.eigenvalues()(0);
  r.spread = std::max({best_width, r.width_at_theta, std::abs(r.witnesses[0] - r.witnesses[1])});
  r.theta_star = best_theta;
  r.grid_points = grid;
  r.grid_error_bound = lipschitz_half_cell;
  return r;
}

double spectral_diameter(const ComplexMatrix& a) {
  const auto ev = eigenvalues(a);
  double d = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    for (std::size_t j = i + 1; j < ev.size(); ++j) d = std::max(d, std::abs(ev[i] - ev[j]));
  }
  return d;
}

SchurForm complex_schur(const ComplexMatrix& a) {
  require_square(a);
  require_finite(a);
  const Eigen::Index n = a.rows();
  if (n == 0) return {ComplexMatrix(0, 0), ComplexMatrix(0, 0)};
  Eigen::ComplexSchur<ComplexMatrix> cs(a, true);
  if (cs.info() != Eigen::Success) {
    throw SolverFailure("complex_schur: QR iteration did not converge", std::numeric_limits<double>::infinity());
  }
  SchurForm s{cs.matrixU(), cs.matrixT()};
  s.triangular.triangularView<Eigen::StrictlyLower>().setZero();
  return s;
}

Eigen::Index reorder_schur(SchurForm& schur, std::vector<bool>& selected) {
  ComplexMatrix& t = schur.triangular;
  ComplexMatrix& u = schur.unitary;
  const Eigen::Index n = t.rows();
  const bool track_u = u.size() != 0;
  Eigen::Index placed = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!selected[k]) continue;
    for (Eigen::Index j = k; j > placed; --j) {
      // Swap diagonal positions j-1 and j.
      const Eigen::Index p = j - 1;
      const Complex t11 = t(p, p), t22 = t(j, j), t12 = t(p, j);
      Eigen::Vector2cd x(t12, t22 - t11);
      const double nx = x.norm();
      if (nx > 0.0) {
        x /= nx;
        Eigen::Matrix2cd g;
        g << x(0), -std::conj(x(1)), x(1), std::conj(x(0));
        t.middleRows(p, 2) = (g.adjoint() * t.middleRows(p, 2)).eval();
        t.middleCols(p, 2) = (t.middleCols(p, 2) * g).eval();
        if (track_u) u.middleCols(p, 2) = (u.middleCols(p, 2) * g).eval();
        t(j, p) = 0.0;
        t(p, p) = t22;
        t(j, j) = t11;
      }
      const bool tmp = selected[p];
      selected[p] = selected[j];
      selected[j] = tmp;
    }
    ++placed;
  }
  return placed;
}

SpectralClusters cluster_eigenvalues(const ComplexMatrix& a) {
  SpectralClusters out{complex_schur(a), {}};
  const Eigen::Index n = a.rows();
  if (n == 0) return out;
  const ComplexMatrix& t = out.schur.triangular;
  const std::vector<Complex> points = diagonal_entries(t);
  const double norm = a.norm();
  const double floor_delta = 1e-8 * (1.0 + norm);
  // Scatter radius of an m-fold defective eigenvalue is about (eps ||A||^m)^{1/m}.
  const double eps = std::numeric_limits<double>::epsilon();
  const double coarse =
      std::max(floor_delta, norm * std::pow(64.0 * static_cast<double>(n) * eps, 1.0 / static_cast<double>(n)));
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<Eigen::Index>> groups;
  const double scale = std::max(norm, std::numeric_limits<double>::min());
  for (auto& g : single_link(points, all, coarse)) {
    refine_groups(out.schur, points, std::move(g), coarse, floor_delta, scale, false, groups);
  }
  for (auto& g : groups) {
    std::sort(g.begin(), g.end());
    EigenCluster c;
    c.representative = mean_of(points, g);
    for (auto i : g) c.members.push_back(points[i]);
    c.schur_indices = std::move(g);
    out.clusters.push_back(std::move(c));
  }
  std::stable_sort(out.clusters.begin(), out.clusters.end(),
                   [](const EigenCluster& x, const EigenCluster& y) {
                     return lex_less(x.representative, y.representative);
                   });
  return out;
}

ComplexMatrix cluster_invariant_subspace(const SpectralClusters& spectral,
                                         const EigenCluster& cluster) {
  SchurForm work = spectral.schur;
  std::vector<bool> selected(static_cast<std::size_t>(work.triangular.rows()), false);
  for (auto i : cluster.schur_indices) selected[i] = true;
  const Eigen::Index m = reorder_schur(work, selected);
  return work.unitary.leftCols(m);
}

}  // namespace normal_approx
