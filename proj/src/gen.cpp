#include "normal_approx/gen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/QR>

#include "normal_approx/spectra.hpp"

namespace normal_approx {

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept { return next() % bound; }

double SplitMix64::gaussian() noexcept {
  if (spare_) {
    const double g = *spare_;
    spare_.reset();
    return g;
  }
  const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Complex SplitMix64::complex_gaussian() noexcept {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re, im) * (1.0 / std::numbers::sqrt2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return SplitMix64::mix(seed ^ SplitMix64::mix(index + SplitMix64::kGamma));
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::poly_in_one: return "poly_in_one";
    case GeneratorKind::planted_normal_scalar_sum: return "planted_normal_scalar_sum";
    case GeneratorKind::planted_triangular: return "planted_triangular";
    case GeneratorKind::nilpotent_plus_normal: return "nilpotent_plus_normal";
    case GeneratorKind::truncated_shift: return "truncated_shift";
    case GeneratorKind::cholesky_counterexample: return "cholesky_counterexample";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(std::string_view name) {
  for (auto kind : {GeneratorKind::poly_in_one, GeneratorKind::planted_normal_scalar_sum,
                    GeneratorKind::planted_triangular, GeneratorKind::nilpotent_plus_normal,
                    GeneratorKind::truncated_shift, GeneratorKind::cholesky_counterexample}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidInput("unknown generator kind '" + std::string(name) + "'");
}

MatrixFamily GeneratedFamily::family(double commutation_tolerance) const {
  return MatrixFamily(members, commutation_tolerance);
}

ComplexMatrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng) {
  ComplexMatrix m(rows, cols);
  // Row-major draw order.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.complex_gaussian();
  }
  return m;
}

ComplexMatrix random_unitary(Eigen::Index n, SplitMix64& rng) {
  const ComplexMatrix g = random_gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

std::vector<ComplexMatrix> poly_family(const ComplexMatrix& a,
                                       const std::vector<std::vector<Complex>>& coefficients) {
  require_square(a);
  const Eigen::Index n = a.rows();
  std::vector<ComplexMatrix> out;
  out.reserve(coefficients.size());
  for (const auto& c : coefficients) {
    if (c.empty()) throw InvalidInput("poly_family: empty coefficient list");
    ComplexMatrix p = c.back() * ComplexMatrix::Identity(n, n);
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) {
      p = (p * a).eval();
      p.diagonal().array() += *it;
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

// Random polynomials of degree 1..4 in `a`, each rescaled so that
// ||p_i(a)||_F lies in [0.5, 2].
GeneratedFamily polynomials_of(const ComplexMatrix& a, std::size_t k, SplitMix64& rng) {
  GeneratedFamily out;
  for (std::size_t i = 0; i < k; ++i) {
    ComplexMatrix p;
    do {
      const std::size_t degree = 1 + rng.below(4);
      std::vector<Complex> c(degree + 1);
      for (auto& z : c) z = rng.complex_gaussian();
      p = std::move(poly_family(a, {c}).front());
    } while (!(p.norm() > 0.0));
    const double target = 0.5 + 1.5 * rng.uniform();
    p *= target / p.norm();
    out.members.push_back(std::move(p));
  }
  return out;
}

void require_sizes(Eigen::Index n, std::size_t k, const char* who) {
  if (n < 1 || k < 1) {
    std::ostringstream os;
    os << who << ": need n >= 1 and k >= 1";
    throw InvalidInput(os.str());
  }
}

}  // namespace

GeneratedFamily gen_poly_in_one(Eigen::Index n, std::size_t k, std::uint64_t seed) {
  require_sizes(n, k, "gen_poly_in_one");
  SplitMix64 rng(seed);
  // Circular law: the spectrum of G / sqrt(n) fills the unit disk.
  const ComplexMatrix a = random_gaussian_matrix(n, n, rng) / std::sqrt(static_cast<double>(n));
  return polynomials_of(a, k, rng);
}

GeneratedFamily gen_planted_triangular(Eigen::Index n, std::size_t k, std::uint64_t seed) {
  require_sizes(n, k, "gen_planted_triangular");
  SplitMix64 rng(seed);
  ComplexMatrix a = random_gaussian_matrix(n, n, rng) / std::sqrt(static_cast<double>(n));
  a.triangularView<Eigen::StrictlyLower>().setZero();
  return polynomials_of(a, k, rng);
}

GeneratedFamily gen_planted_normal_scalar_sum(Eigen::Index n, std::size_t k, std::uint64_t seed) {
  require_sizes(n, k, "gen_planted_normal_scalar_sum");
  SplitMix64 rng(seed);
  const ComplexMatrix u = random_unitary(n, rng);
  // Column j of `d` is a uniform point on the unit sphere of C^k.
  ComplexMatrix d(static_cast<Eigen::Index>(k), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    ComplexVector z(static_cast<Eigen::Index>(k));
    do {
      for (auto& x : z) x = rng.complex_gaussian();
    } while (!(z.norm() > 0.0));
    d.col(j) = z / z.norm();
  }
  GeneratedFamily out;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) {
    out.members.push_back(conjugate_diagonal(u, d.row(i).transpose()));
  }
  return out;
}

GeneratedFamily gen_nilpotent_plus_normal(Eigen::Index n_qn, Eigen::Index n_n, std::size_t k,
                                          std::uint64_t seed) {
  if (n_qn < 0 || n_n < 0 || n_qn + n_n == 0 || k < 1) {
    throw InvalidInput("gen_nilpotent_plus_normal: need n_qn, n_n >= 0, not both 0, and k >= 1");
  }
  SplitMix64 rng(seed);
  const Eigen::Index n = n_qn + n_n;

  // Nilpotent generator: strictly upper triangular with a superdiagonal of
  // modulus in [0.5, 1.5], so it is a single Jordan block up to similarity.
  ComplexMatrix nil = ComplexMatrix::Zero(n_qn, n_qn);
  for (Eigen::Index i = 0; i < n_qn; ++i) {
    for (Eigen::Index j = i + 1; j < n_qn; ++j) {
      if (j == i + 1) {
        nil(i, j) = std::polar(0.5 + rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
      } else {
        nil(i, j) = 0.5 * rng.complex_gaussian();
      }
    }
  }
  const ComplexMatrix v = random_unitary(n, rng);

  GeneratedFamily out;
  out.split_dims = std::make_pair(n_qn, n_n);
  for (std::size_t i = 0; i < k; ++i) {
    ComplexMatrix block = ComplexMatrix::Zero(n, n);
    if (n_qn > 0) {
      if (i == 0) {
        block.topLeftCorner(n_qn, n_qn) = nil;
      } else {
        // Polynomial in the generator without constant term.
        std::vector<Complex> c{0.0, rng.complex_gaussian(), rng.complex_gaussian(),
                               rng.complex_gaussian()};
        block.topLeftCorner(n_qn, n_qn) = poly_family(nil, {c}).front();
      }
    }
    for (Eigen::Index j = 0; j < n_n; ++j) {
      block(n_qn + j, n_qn + j) =
          std::polar(0.5 + rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
    }
    out.members.push_back(v * block * v.adjoint());
  }
  return out;
}

ComplexMatrix truncated_shift(Eigen::Index n) {
  if (n < 2) throw InvalidInput("truncated_shift: n must be at least 2");
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) s(j + 1, j) = 1.0;
  return s;
}

ComplexMatrix cholesky_upper(const ComplexMatrix& p) {
  require_square(p);
  require_finite(p);
  const Eigen::Index n = p.rows();
  if (n == 0) return ComplexMatrix(0, 0);
  const double scale = p.norm();
  if ((p - p.adjoint()).norm() > 1e-10 * (1.0 + scale)) {
    throw InvalidInput("cholesky_upper: matrix is not Hermitian");
  }
  const HermitianEigen eig = hermitian_eigen(p);
  if (eig.values(0) < -1e-8 * (1.0 + scale)) {
    std::ostringstream os;
    os << "cholesky_upper: matrix is indefinite (eigenvalue " << eig.values(0) << ")";
    throw InvalidInput(os.str());
  }
  const double spectral = std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1)));
  const double threshold = static_cast<double>(n) * spectral * 1e-12;

  // Row j of T from P(j, l) = sum_{i <= j} conj(T(i, j)) T(i, l).
  ComplexMatrix t = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = p(j, j).real();
    for (Eigen::Index i = 0; i < j; ++i) pivot -= std::norm(t(i, j));
    if (pivot <= threshold) continue;
    const double diag = std::sqrt(pivot);
    t(j, j) = diag;
    for (Eigen::Index l = j + 1; l < n; ++l) {
      Complex acc = p(j, l);
      for (Eigen::Index i = 0; i < j; ++i) acc -= std::conj(t(i, j)) * t(i, l);
      t(j, l) = acc / diag;
    }
  }
  return t;
}

std::pair<ComplexMatrix, ComplexMatrix> cholesky_counterexample() {
  ComplexMatrix plus(2, 2), minus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  minus << 0.5, -0.5, -0.5, 0.5;
  return {cholesky_upper(plus), cholesky_upper(minus)};
}

GeneratedFamily generate(const GeneratorSpec& spec) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw InvalidInput("generator scale must be positive and finite");
  }
  GeneratedFamily out;
  switch (spec.kind) {
    case GeneratorKind::poly_in_one:
      out = gen_poly_in_one(spec.n, spec.k, spec.seed);
      break;
    case GeneratorKind::planted_normal_scalar_sum:
      out = gen_planted_normal_scalar_sum(spec.n, spec.k, spec.seed);
      break;
    case GeneratorKind::planted_triangular:
      out = gen_planted_triangular(spec.n, spec.k, spec.seed);
      break;
    case GeneratorKind::nilpotent_plus_normal:
      out = gen_nilpotent_plus_normal(spec.n_qn, spec.n_n, spec.k, spec.seed);
      break;
    case GeneratorKind::truncated_shift: {
      if (spec.k < 1) throw InvalidInput("truncated_shift: k must be at least 1");
      // Powers S, S^2, ..., S^k.
      const ComplexMatrix s = truncated_shift(spec.n);
      ComplexMatrix power = s;
      for (std::size_t i = 0; i < spec.k; ++i) {
        out.members.push_back(power);
        power = (power * s).eval();
      }
      break;
    }
    case GeneratorKind::cholesky_counterexample: {
      auto [a1, a2] = cholesky_counterexample();
      out.members = {std::move(a1), std::move(a2)};
      break;
    }
  }
  if (spec.scale != 1.0) {
    for (auto& m : out.members) m *= spec.scale;
  }
  return out;
}

}  // namespace normal_approx
