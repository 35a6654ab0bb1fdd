#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normal_approx/core_linear.hpp"

namespace normal_approx {

/// SplitMix64: the i-th output (i = 1, 2, ...) is mix(seed + i * 0x9E3779B97F4A7C15)
/// with
///
///   mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///           z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///           return z ^ (z >> 31)
///
/// Doubles take the top 53 bits. Gaussians use the Box-Muller transform
/// sqrt(-2 ln u1) (cos 2 pi u2, sin 2 pi u2) with u1 in (0, 1], both outputs
/// used in order. These constants are part of the reproducibility contract and
/// must never change.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() noexcept {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on [0, 1).
  double uniform() noexcept;
  // Uniform integer in [0, bound); bound > 0. Modulo reduction.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double gaussian() noexcept;
  // Standard complex Gaussian: (g1 + i g2) / sqrt(2), so E|z|^2 = 1.
  Complex complex_gaussian() noexcept;

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

// Seed of the index-th instance of a batch: mix(seed ^ mix(index + kGamma)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

enum class GeneratorKind {
  poly_in_one,
  planted_normal_scalar_sum,
  planted_triangular,
  nilpotent_plus_normal,
  truncated_shift,
  cholesky_counterexample,
};

std::string_view to_string(GeneratorKind kind);
// Throws InvalidInput for unknown names.
GeneratorKind generator_kind_from_string(std::string_view name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::poly_in_one;
  Eigen::Index n = 4;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  double scale = 1.0;
  // nilpotent_plus_normal only; n = n_qn + n_n.
  Eigen::Index n_qn = 0;
  Eigen::Index n_n = 0;
};

struct GeneratedFamily {
  std::vector<ComplexMatrix> members;
  // Planted split dimensions, for nilpotent_plus_normal.
  std::optional<std::pair<Eigen::Index, Eigen::Index>> split_dims;

  // Validates as a MatrixFamily (throws NonCommutingFamily for the
  // Cholesky counterexample).
  MatrixFamily family(double commutation_tolerance = kDefaultCommutationTolerance) const;
};

ComplexMatrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng);
// QR of a complex Gaussian matrix with R's diagonal made positive.
ComplexMatrix random_unitary(Eigen::Index n, SplitMix64& rng);

// {p_i(A)} for coefficient lists c_0, c_1, ... (lowest degree first),
// evaluated by Horner's rule.
std::vector<ComplexMatrix> poly_family(const ComplexMatrix& a,
                                       const std::vector<std::vector<Complex>>& coefficients);

GeneratedFamily gen_poly_in_one(Eigen::Index n, std::size_t k, std::uint64_t seed);
GeneratedFamily gen_planted_triangular(Eigen::Index n, std::size_t k, std::uint64_t seed);
GeneratedFamily gen_planted_normal_scalar_sum(Eigen::Index n, std::size_t k, std::uint64_t seed);
GeneratedFamily gen_nilpotent_plus_normal(Eigen::Index n_qn, Eigen::Index n_n, std::size_t k,
                                          std::uint64_t seed);

// n x n truncation of the unilateral shift S e_j = e_{j+1}: ones at S(j+1, j).
ComplexMatrix truncated_shift(Eigen::Index n);

// Upper-triangular T with T^* T = P for Hermitian positive semidefinite P.
// Pivots at or below n ||P||_2 1e-12 produce zero rows.
ComplexMatrix cholesky_upper(const ComplexMatrix& p);

// Upper-triangular factors of the two rank-one projections
// [[1/2, 1/2], [1/2, 1/2]] and [[1/2, -1/2], [-1/2, 1/2]] that sum to 1.
// The pair is non-normal and does not commute.
std::pair<ComplexMatrix, ComplexMatrix> cholesky_counterexample();

GeneratedFamily generate(const GeneratorSpec& spec);

}  // namespace normal_approx
